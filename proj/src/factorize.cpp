#include "phisolve/arith.hpp"

#include "montgomery.hpp"

#include <algorithm>
#include <map>

namespace phisolve {

namespace {

using detail::Montgomery128;
using detail::Montgomery64;

constexpr u64 kTrialBound = 4096;
constexpr int kRhoAttempts = 8;
constexpr u64 kRhoBlock = 128;

const std::vector<u64>& trial_primes() {
    static const std::vector<u64> primes = [] {
        PrimeTable table(kTrialBound);
        return std::vector<u64>(table.primes().begin(), table.primes().end());
    }();
    return primes;
}

u128 gcd_any(u128 a, u128 b) { return gcd(a, b); }

// Brent's cycle-finding variant of Pollard rho on x -> x^2 + c.
// Returns a divisor of n (possibly n itself), or 0 if the budget ran out.
template <class Mont>
typename Mont::value_type brent_rho(const Mont& m, typename Mont::value_type seed,
                                    typename Mont::value_type c, u64 budget) {
    using T = typename Mont::value_type;
    const T n = m.modulus();
    const T cm = m.to(c);
    auto step = [&](T v) { return m.add(m.mul(v, v), cm); };

    T y = m.to(seed);
    T x = y;
    T ys = y;
    T q = m.one();
    T g = 1;
    u64 r = 1;
    u64 spent = 0;
    do {
        x = y;
        for (u64 i = 0; i < r; ++i) {
            y = step(y);
        }
        u64 k = 0;
        do {
            ys = y;
            const u64 block = std::min(kRhoBlock, r - k);
            for (u64 i = 0; i < block; ++i) {
                y = step(y);
                q = m.mul(q, m.sub(x, y));
            }
            g = T(gcd_any(q, n));
            k += block;
            spent += block;
        } while (k < r && g == 1);
        spent += r;
        r <<= 1;
        if (g == 1 && spent > budget) {
            return 0;
        }
    } while (g == 1);

    if (g == n) {
        // The block product overshot; replay one step at a time.
        do {
            ys = step(ys);
            g = T(gcd_any(m.sub(x, ys), n));
        } while (g == 1);
    }
    return g;
}

u128 find_factor(u128 n, int effort) {
    const u64 budget = u64(1) << std::min(16 + 2 * effort, 40);
    for (int attempt = 0; attempt < kRhoAttempts; ++attempt) {
        const u64 c = 1 + u64(attempt);
        const u64 seed = 2 + 3 * u64(attempt);
        u128 d;
        if (n < kU64End) {
            d = brent_rho(Montgomery64(u64(n)), u64(seed), u64(c), budget);
        } else {
            d = brent_rho(Montgomery128(n), u128(seed), u128(c), budget);
        }
        if (d != 0 && d != 1 && d != n) {
            return d;
        }
    }
    throw FactoringGaveUp(n, effort);
}

} // namespace

Factorization factorize(u128 n, int effort) {
    if (n == 0) {
        throw std::invalid_argument("factorize: n must be positive");
    }
    std::map<u128, unsigned> found;
    u128 rest = n;
    for (u64 p : trial_primes()) {
        if (u128(p) * p > rest) {
            break;
        }
        while (rest % p == 0) {
            rest /= p;
            ++found[p];
        }
    }

    std::vector<u128> pending;
    if (rest != 1) {
        pending.push_back(rest);
    }
    while (!pending.empty()) {
        const u128 c = pending.back();
        pending.pop_back();
        if (c < u128(kTrialBound) * kTrialBound || is_prime_wide(c)) {
            // Everything below kTrialBound was divided out, so a small
            // cofactor here is prime.
            ++found[c];
            continue;
        }
        bool split = false;
        for (unsigned e = 2; !split; ++e) {
            // Every prime factor of c exceeds kTrialBound.
            const u128 t = integer_root(c, e);
            if (t < kTrialBound) {
                break;
            }
            u128 pw = 1;
            for (unsigned i = 0; i < e; ++i) {
                pw *= t;
            }
            if (pw == c) {
                for (unsigned i = 0; i < e; ++i) {
                    pending.push_back(t);
                }
                split = true;
            }
        }
        if (split) {
            continue;
        }
        const u128 d = find_factor(c, effort);
        pending.push_back(d);
        pending.push_back(c / d);
    }

    Factorization f;
    f.value = n;
    for (const auto& [p, e] : found) {
        f.factors.push_back({p, e});
    }
    return f;
}

bool Factorization::square_free() const {
    return std::all_of(factors.begin(), factors.end(),
                       [](const PrimePower& pp) { return pp.exponent == 1; });
}

std::vector<u128> Factorization::divisors() const {
    std::vector<u128> out{1};
    for (const auto& [p, e] : factors) {
        const std::size_t base = out.size();
        u128 pk = 1;
        for (unsigned i = 0; i < e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) {
                out.push_back(out[j] * pk);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

u128 Factorization::totient() const {
    u128 phi = 1;
    for (const auto& [p, e] : factors) {
        phi *= p - 1;
        for (unsigned i = 1; i < e; ++i) {
            phi *= p;
        }
    }
    return phi;
}

} // namespace phisolve
