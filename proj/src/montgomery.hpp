#pragma once

// Montgomery multiplication for odd moduli, 64- and 128-bit.
// Both classes expose the same interface so primality and rho code can be
// written once as templates.

#include "phisolve/arith.hpp"

namespace phisolve::detail {

class Montgomery64 {
public:
    using value_type = u64;

    explicit Montgomery64(u64 n) : n_(n) {
        u64 inv = n;
        for (int i = 0; i < 6; ++i) {
            inv *= 2 - n * inv;
        }
        neg_inv_ = 0 - inv;
        // 2^128 mod n, i.e. R^2 mod n for R = 2^64.
        r2_ = static_cast<u64>((0 - static_cast<u128>(n)) % n);
        one_ = to(1);
    }

    u64 modulus() const { return n_; }
    u64 one() const { return one_; }

    u64 to(u64 x) const { return mul(x % n_, r2_); }
    u64 from(u64 x) const { return reduce(x); }

    u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }

    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        if (s < a || s >= n_) {
            s -= n_;
        }
        return s;
    }

    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a - b + n_; }

    u64 half(u64 a) const {
        if ((a & 1) == 0) {
            return a >> 1;
        }
        return (a >> 1) + (n_ >> 1) + 1;
    }

private:
    u64 reduce(u128 t) const {
        u64 m = static_cast<u64>(t) * neg_inv_;
        u128 mn = static_cast<u128>(m) * n_;
        u64 lo = static_cast<u64>(t);
        u64 carry = lo != 0 ? 1 : 0;
        u128 hi = (t >> 64) + (mn >> 64) + carry;
        if (hi >= n_) {
            hi -= n_;
        }
        return static_cast<u64>(hi);
    }

    u64 n_;
    u64 neg_inv_;
    u64 r2_;
    u64 one_;
};

struct U256 {
    u128 hi;
    u128 lo;
};

inline U256 mul_wide(u128 a, u128 b) {
    const u128 mask = (u128(1) << 64) - 1;
    u128 a0 = a & mask, a1 = a >> 64;
    u128 b0 = b & mask, b1 = b >> 64;
    u128 p00 = a0 * b0;
    u128 p01 = a0 * b1;
    u128 p10 = a1 * b0;
    u128 p11 = a1 * b1;
    u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    U256 r;
    r.lo = (p00 & mask) | (mid << 64);
    r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    return r;
}

// a * b mod n by shift-and-add; only used for one-off setup values.
inline u128 mulmod_slow(u128 a, u128 b, u128 n) {
    a %= n;
    b %= n;
    u128 r = 0;
    while (b != 0) {
        if (b & 1) {
            r = (r >= n - a) ? r - (n - a) : r + a;
        }
        a = (a >= n - a) ? a - (n - a) : a + a;
        b >>= 1;
    }
    return r;
}

class Montgomery128 {
public:
    using value_type = u128;

    explicit Montgomery128(u128 n) : n_(n) {
        u128 inv = n;
        for (int i = 0; i < 7; ++i) {
            inv *= 2 - n * inv;
        }
        neg_inv_ = 0 - inv;
        u128 r1 = (0 - n) % n;
        r2_ = mulmod_slow(r1, r1, n);
        one_ = r1;
    }

    u128 modulus() const { return n_; }
    u128 one() const { return one_; }

    u128 to(u128 x) const { return mul(x % n_, r2_); }
    u128 from(u128 x) const { return reduce({0, x}); }

    u128 mul(u128 a, u128 b) const { return reduce(mul_wide(a, b)); }

    u128 add(u128 a, u128 b) const {
        u128 s = a + b;
        if (s < a || s >= n_) {
            s -= n_;
        }
        return s;
    }

    u128 sub(u128 a, u128 b) const { return a >= b ? a - b : a - b + n_; }

    u128 half(u128 a) const {
        if ((a & 1) == 0) {
            return a >> 1;
        }
        return (a >> 1) + (n_ >> 1) + 1;
    }

private:
    u128 reduce(U256 t) const {
        u128 m = t.lo * neg_inv_;
        U256 mn = mul_wide(m, n_);
        u128 carry = t.lo != 0 ? 1 : 0;
        u128 s1 = t.hi + mn.hi;
        bool over = s1 < t.hi;
        u128 s2 = s1 + carry;
        over = over || s2 < s1;
        if (over || s2 >= n_) {
            s2 -= n_;
        }
        return s2;
    }

    u128 n_;
    u128 neg_inv_;
    u128 r2_;
    u128 one_;
};

template <class Mont>
typename Mont::value_type pow_mont(const Mont& m, typename Mont::value_type base,
                                   typename Mont::value_type exp) {
    auto result = m.one();
    while (exp != 0) {
        if (exp & 1) {
            result = m.mul(result, base);
        }
        base = m.mul(base, base);
        exp >>= 1;
    }
    return result;
}

} // namespace phisolve::detail
