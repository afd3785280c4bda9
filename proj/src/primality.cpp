#include "phisolve/arith.hpp"

#include "montgomery.hpp"

#include <array>

namespace phisolve {

namespace {

using detail::Montgomery128;
using detail::Montgomery64;
using detail::pow_mont;

constexpr std::array<unsigned, 12> kSmallPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Sinclair's set: no strong pseudoprime below 2^64 passes all seven.
constexpr std::array<u64, 7> kBases64 = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};

// First 13 primes; complete below this bound (Sorenson and Webster).
constexpr std::array<unsigned, 13> kBases13 = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
constexpr u128 kBound13 = u128(3317044ULL) * 1000000000000000000ULL + 64679887385961981ULL;

template <class Mont>
bool strong_probable_prime(const Mont& m, typename Mont::value_type base) {
    using T = typename Mont::value_type;
    const T n = m.modulus();
    base %= n;
    if (base == 0) {
        return true;
    }
    T d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    const T one = m.one();
    const T minus_one = m.sub(0, one);
    T x = pow_mont(m, m.to(base), d);
    if (x == one || x == minus_one) {
        return true;
    }
    for (int i = 1; i < s; ++i) {
        x = m.mul(x, x);
        if (x == minus_one) {
            return true;
        }
        if (x == one) {
            return false;
        }
    }
    return false;
}

// Jacobi symbol (a/n) for odd n.
int jacobi(u128 a, u128 n) {
    a %= n;
    int result = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            const unsigned r = unsigned(n & 7);
            if (r == 3 || r == 5) {
                result = -result;
            }
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) {
            result = -result;
        }
        a %= n;
    }
    return n == 1 ? result : 0;
}

bool is_square(u128 n) {
    const u128 r = integer_root(n, 2);
    return r * r == n;
}

// Strong Lucas test with Selfridge parameters (P = 1, Q = (1 - D) / 4).
bool strong_lucas_probable_prime(u128 n) {
    if (is_square(n)) {
        return false;
    }
    long long d_signed = 5;
    for (;;) {
        const u128 abs_d = u128(d_signed < 0 ? -d_signed : d_signed);
        const u128 d_mod = d_signed < 0 ? n - abs_d % n : abs_d % n;
        const int j = jacobi(d_mod, n);
        if (j == -1) {
            break;
        }
        if (j == 0 && abs_d % n != 0) {
            return false;
        }
        d_signed = d_signed < 0 ? -d_signed + 2 : -(d_signed + 2);
    }

    const Montgomery128 m(n);
    const u128 d_abs = u128(d_signed < 0 ? -d_signed : d_signed);
    const u128 d_res = d_signed < 0 ? n - d_abs % n : d_abs % n;
    // Q = (1 - D) / 4, reduced mod n.
    const long long q_signed = (1 - d_signed) / 4;
    const u128 q_abs = u128(q_signed < 0 ? -q_signed : q_signed);
    const u128 q_res = q_signed < 0 ? (n - q_abs % n) % n : q_abs % n;

    const u128 D = m.to(d_res);
    const u128 Q = m.to(q_res);

    u128 k = n + 1;
    int s = 0;
    while ((k & 1) == 0) {
        k >>= 1;
        ++s;
    }

    // Left-to-right ladder over the bits of k, starting from index 1.
    u128 u = m.one();
    u128 v = m.one();
    u128 qk = Q;
    int top = 127;
    while (((k >> top) & 1) == 0) {
        --top;
    }
    for (int bit = top - 1; bit >= 0; --bit) {
        u = m.mul(u, v);
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        qk = m.mul(qk, qk);
        if ((k >> bit) & 1) {
            const u128 u_next = m.half(m.add(u, v));
            const u128 v_next = m.half(m.add(m.mul(D, u), v));
            u = u_next;
            v = v_next;
            qk = m.mul(qk, Q);
        }
    }

    if (u == 0 || v == 0) {
        return true;
    }
    for (int r = 1; r < s; ++r) {
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        if (v == 0) {
            return true;
        }
        qk = m.mul(qk, qk);
    }
    return false;
}

} // namespace

bool is_prime(u64 n) {
    if (n < 2) {
        return false;
    }
    for (unsigned p : kSmallPrimes) {
        if (n % p == 0) {
            return n == p;
        }
    }
    if (n < 41 * 41) {
        return true;
    }
    const Montgomery64 m(n);
    for (u64 base : kBases64) {
        if (!strong_probable_prime(m, base)) {
            return false;
        }
    }
    return true;
}

bool is_prime_wide(u128 n) {
    if (n < kU64End) {
        return is_prime(u64(n));
    }
    for (unsigned p : kSmallPrimes) {
        if (n % p == 0) {
            return false;
        }
    }
    const Montgomery128 m(n);
    if (n < kBound13) {
        for (unsigned base : kBases13) {
            if (!strong_probable_prime(m, u128(base))) {
                return false;
            }
        }
        return true;
    }
    return strong_probable_prime(m, u128(2)) && strong_lucas_probable_prime(n);
}

} // namespace phisolve
