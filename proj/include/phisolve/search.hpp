#pragma once

// Branch-and-prune enumeration of prime sets Q (all primes >= 5) with
//     3 * prod(q - 1) - 2 * prod(q) = 2,
// equivalently every n = prod(Q) with phi(n) = 2(n + 1)/3.

#include "phisolve/arith.hpp"
#include "phisolve/equation.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace phisolve {

/// Without a limit, exhaustive search is only attempted up to this many factors.
inline constexpr int kMaxUnboundedK = 6;

struct Solution {
    u128 n = 0;
    std::vector<u64> factors;

    int k() const { return int(factors.size()); }
    friend bool operator==(const Solution&, const Solution&) = default;
};

/// Switches for the individual prunes. Disabling finiteness requires a
/// prime_cap; the remaining switches exist to check that prunes never
/// remove solutions.
struct PruneToggles {
    bool corollary = true;
    bool gcd = true;
    bool finiteness = true;
    bool congruence = true;
};

/// Receives every pruned absorption and every endgame. Calls may arrive
/// from several worker threads at once.
class SearchTrace {
public:
    struct Prune {
        std::vector<u64> prefix;
        u64 prime;
        PruneReason reason;
        u128 common_divisor;
    };

    void record(Prune prune);
    void record(EndgameTrace endgame);

    std::vector<Prune> prunes() const;
    std::vector<EndgameTrace> endgames() const;

private:
    mutable std::mutex mutex_;
    std::vector<Prune> prunes_;
    std::vector<EndgameTrace> endgames_;
};

struct SearchConfig {
    int k_min = 1;
    int k_max = 1;
    std::optional<u128> limit;
    unsigned threads = 1;
    double epsilon = 1e-9;
    PruneToggles prunes;
    std::optional<u64> prime_cap;   // test mode: no chosen prime above this
    SearchTrace* trace = nullptr;
};

struct SearchStats {
    u64 nodes = 0;           // states expanded
    u64 endgames = 0;        // two-prime endgames entered
    u64 factorizations = 0;  // endgame targets actually factored
    u64 pruned_gcd = 0;
    u64 pruned_finiteness = 0;
    u64 pruned_limit = 0;
    u64 pruned_corollary = 0;
    u64 pruned_congruence = 0;

    SearchStats& operator+=(const SearchStats& o);
};

struct SearchResult {
    std::vector<Solution> solutions;  // ascending by n, no duplicates
    SearchStats stats;
};

/// Configuration errors (unbounded k above kMaxUnboundedK, k_min > k_max, ...).
class InvalidSearch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Largest k such that the product of the first k primes from 5 upward is <= limit.
int max_k_for_limit(u128 limit);

/// Throws InvalidSearch. Returns the effective k range: with a limit, k_max
/// is clamped to max_k_for_limit since larger sets exceed the limit.
std::pair<int, int> validate(const SearchConfig& config);

SearchResult search(const SearchConfig& config);
SearchResult search_exact_k(int k, std::optional<u128> limit, SearchConfig config);
SearchResult search_up_to_limit(u128 limit, SearchConfig config);

/// Every completion of an arbitrary residual state: prime sets extending
/// root.prefix by root.remaining primes that satisfy root's equation (and
/// prefix * new primes <= limit when a limit is set). k_min/k_max are ignored.
/// The corollary prune is only sound for gamma = 1 or the canonical root;
/// disable it for other equations.
SearchResult complete_state(const EquationState& root, SearchConfig config);

/// Exact check of the canonical identity in arbitrary precision.
bool satisfies_canonical(const std::vector<u64>& factors);

/// Exact check of root's residual equation over factors[root.prefix.size()..].
bool satisfies_residual(const EquationState& root, const std::vector<u64>& factors);

/// Whether (4n + 1)/3 is prime. n = 5 (mod 6) for every solution, so
/// 4n + 1 = 21 = 0 (mod 3) and the quotient is always an integer there;
/// other residues give false.
bool companion_is_prime(u128 n);

/// Prime table shared by searches; rebuilt (never shrunk) when a larger one is requested.
std::shared_ptr<const PrimeTable> shared_prime_table(u64 min_limit);

} // namespace phisolve
