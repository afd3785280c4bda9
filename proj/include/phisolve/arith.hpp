#pragma once

// Exact integer substrate: prime tables, primality, factoring, roots.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phisolve {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u128 kU128Max = ~u128(0);
inline constexpr u128 kU64End = u128(1) << 64;

/// A value left the 128-bit working range. Never silently wrapped.
class ArithmeticOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// factorize() ran out of its rho budget at the given effort level.
class FactoringGaveUp : public std::runtime_error {
public:
    FactoringGaveUp(u128 value, int effort);
    u128 value() const { return value_; }
    int effort() const { return effort_; }

private:
    u128 value_;
    int effort_;
};

/// Ascending primes up to a sieve limit, with cumulative log sums used by
/// the finiteness bound.
class PrimeTable {
public:
    explicit PrimeTable(u64 limit);

    u64 limit() const { return limit_; }
    std::size_t size() const { return primes_.size(); }
    u64 operator[](std::size_t i) const { return primes_[i]; }
    std::span<const u64> primes() const { return primes_; }

    /// Index of the first prime strictly greater than x (size() if none).
    std::size_t upper_index(u64 x) const;
    /// Index of the first prime >= x (size() if none).
    std::size_t lower_index(u64 x) const;
    /// Membership for x <= limit().
    bool contains(u64 x) const;

    /// Sum of log(1 - 1/p) over primes with index in [first, last).
    double log_survival(std::size_t first, std::size_t last) const {
        return log_survival_[last] - log_survival_[first];
    }
    /// Sum of log(p) over primes with index in [first, last).
    double log_product(std::size_t first, std::size_t last) const {
        return log_prime_[last] - log_prime_[first];
    }

private:
    u64 limit_;
    std::vector<u64> primes_;
    std::vector<double> log_survival_;
    std::vector<double> log_prime_;
};

/// Throws std::length_error when the sieve would not fit in memory.
PrimeTable build_prime_table(u64 limit);

/// Deterministic for every 64-bit input.
bool is_prime(u64 n);

/// 128-bit primality. Deterministic below 3317044064679887385961981
/// (Miller-Rabin on the first 13 prime bases); above that, Baillie-PSW.
bool is_prime_wide(u128 n);

struct PrimePower {
    u128 prime;
    unsigned exponent;
};

struct Factorization {
    u128 value = 1;
    std::vector<PrimePower> factors;

    bool square_free() const;
    /// Every divisor, ascending.
    std::vector<u128> divisors() const;
    /// Euler's totient, computed from the factors.
    u128 totient() const;
};

/// Complete factorization. effort scales the Pollard rho iteration budget
/// (x4 per level); throws FactoringGaveUp when the budget is exhausted.
Factorization factorize(u128 n, int effort = 1);

u128 gcd(u128 a, u128 b);

/// Largest t with t^r <= x.
u128 integer_root(u128 x, unsigned r);

/// Exact a * b, or nullopt on 128-bit overflow.
std::optional<u128> checked_mul(u128 a, u128 b);
std::optional<u128> checked_add(u128 a, u128 b);

std::string to_string(u128 v);

/// Decimal digits, optionally followed by e<digits> (1e14). The mantissa
/// must be an integer. nullopt on malformed input or overflow.
std::optional<u128> parse_u128(std::string_view text);

} // namespace phisolve
