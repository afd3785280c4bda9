#include "phisolve/oracle.hpp"

#include <new>
#include <string>

namespace phisolve {

TotientTable::TotientTable(u64 limit) : limit_(limit) {
    if (limit < 1) {
        throw std::invalid_argument("totient_sieve: limit must be positive");
    }
    if (limit > kMaxTotientLimit) {
        throw std::length_error("totient_sieve: limit " + std::to_string(limit) + " exceeds " +
                                std::to_string(kMaxTotientLimit) + "; use the search instead");
    }
    try {
        phi_.resize(limit + 1);
    } catch (const std::bad_alloc&) {
        throw std::length_error("totient_sieve: out of memory for limit " + std::to_string(limit));
    }
    for (u64 i = 0; i <= limit; ++i) {
        phi_[i] = std::uint32_t(i);
    }
    for (u64 p = 2; p <= limit; ++p) {
        if (phi_[p] != p) {
            continue;  // already touched by a smaller prime, so composite
        }
        for (u64 m = p; m <= limit; m += p) {
            phi_[m] -= phi_[m] / std::uint32_t(p);
        }
    }
}

TotientTable totient_sieve(u64 limit) {
    return TotientTable(limit);
}

std::vector<u64> scan_solutions(const TotientTable& table) {
    std::vector<u64> out;
    for (u64 n = 1; n <= table.limit(); ++n) {
        if (3 * table[n] == 2 * (n + 1)) {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<u64> scan_solutions(u64 limit) {
    return scan_solutions(totient_sieve(limit));
}

Verdict check_single(u128 n) {
    if (n == 0) {
        throw std::invalid_argument("check_single: n must be positive");
    }
    Verdict v;
    v.n = n;
    for (int effort = 1;; ++effort) {
        try {
            v.factors = factorize(n, effort);
            break;
        } catch (const FactoringGaveUp&) {
            if (effort >= 6) {
                throw;
            }
        }
    }
    v.totient = v.factors.totient();
    v.square_free = v.factors.square_free();
    v.mod6 = unsigned(n % 6);
    // 3*phi = 2(n + 1) with n + 1 = 3m  <=>  phi = 2m.
    v.is_solution = n % 3 == 2 && v.totient == 2 * (n / 3 + 1);
    // (4n + 1)/3 is integral exactly when n = 2 (mod 3).
    if (n % 3 == 2) {
        if (n > (kU128Max - 1) / 4) {
            throw ArithmeticOverflow("check_single: 4n + 1 exceeds 128 bits");
        }
        v.relevance = is_prime_wide((4 * n + 1) / 3);
    }
    return v;
}

} // namespace phisolve
