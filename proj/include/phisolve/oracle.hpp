#pragma once

// Brute-force cross-check, independent of the search: a totient sieve, a
// direct scan for 3*phi(n) = 2(n + 1), and a factorization-based verdict
// for single values.

#include "phisolve/arith.hpp"

#include <vector>

namespace phisolve {

/// Largest limit the sieve accepts.
inline constexpr u64 kMaxTotientLimit = 200'000'000;

class TotientTable {
public:
    explicit TotientTable(u64 limit);

    u64 limit() const { return limit_; }
    /// phi(n) for 1 <= n <= limit().
    u64 operator[](u64 n) const { return phi_[n]; }

private:
    u64 limit_;
    std::vector<std::uint32_t> phi_;  // index 0 unused
};

/// Throws std::length_error above kMaxTotientLimit.
TotientTable totient_sieve(u64 limit);

/// Every n <= limit with phi(n) = 2(n + 1)/3, ascending.
std::vector<u64> scan_solutions(u64 limit);
std::vector<u64> scan_solutions(const TotientTable& table);

struct Verdict {
    u128 n = 0;
    bool is_solution = false;
    Factorization factors;
    u128 totient = 0;
    bool square_free = false;
    unsigned mod6 = 0;
    bool relevance = false;  // (4n + 1)/3 is an integer and prime
};

/// Diagnoses one value via factorize(). Throws FactoringGaveUp if factoring
/// fails at every effort level tried.
Verdict check_single(u128 n);

} // namespace phisolve
