#include "phisolve/arith.hpp"

#include <algorithm>
#include <cmath>

namespace phisolve {

FactoringGaveUp::FactoringGaveUp(u128 value, int effort)
    : std::runtime_error("factoring gave up on " + to_string(value) + " at effort " +
                         std::to_string(effort)),
      value_(value), effort_(effort) {}

u128 gcd(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::optional<u128> checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) {
        return std::nullopt;
    }
    return r;
}

std::optional<u128> checked_add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r)) {
        return std::nullopt;
    }
    return r;
}

namespace {

// t^r <= x, without overflow.
bool power_at_most(u128 t, unsigned r, u128 x) {
    u128 acc = 1;
    for (unsigned i = 0; i < r; ++i) {
        auto next = checked_mul(acc, t);
        if (!next || *next > x) {
            return false;
        }
        acc = *next;
    }
    return true;
}

} // namespace

u128 integer_root(u128 x, unsigned r) {
    if (r == 0) {
        throw std::invalid_argument("integer_root: r must be positive");
    }
    if (r == 1 || x < 2) {
        return x;
    }
    if (r >= 128) {
        return 1;
    }
    const long double estimate = std::pow(static_cast<long double>(x), 1.0L / r);
    u128 t = estimate < 1 ? 1 : static_cast<u128>(estimate);
    while (t > 1 && !power_at_most(t, r, x)) {
        --t;
    }
    while (power_at_most(t + 1, r, x)) {
        ++t;
    }
    return t;
}

std::string to_string(u128 v) {
    if (v == 0) {
        return "0";
    }
    std::string s;
    while (v != 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::optional<u128> parse_u128(std::string_view text) {
    auto parse_digits = [](std::string_view digits) -> std::optional<u128> {
        if (digits.empty()) {
            return std::nullopt;
        }
        u128 value = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
            auto scaled = checked_mul(value, 10);
            if (!scaled) {
                return std::nullopt;
            }
            auto next = checked_add(*scaled, u128(c - '0'));
            if (!next) {
                return std::nullopt;
            }
            value = *next;
        }
        return value;
    };

    const auto e = text.find_first_of("eE");
    if (e == std::string_view::npos) {
        return parse_digits(text);
    }
    auto mantissa = parse_digits(text.substr(0, e));
    auto exponent = parse_digits(text.substr(e + 1));
    if (!mantissa || !exponent || *exponent > 38) {
        return std::nullopt;
    }
    u128 value = *mantissa;
    for (u128 i = 0; i < *exponent; ++i) {
        auto next = checked_mul(value, 10);
        if (!next) {
            return std::nullopt;
        }
        value = *next;
    }
    return value;
}

} // namespace phisolve
