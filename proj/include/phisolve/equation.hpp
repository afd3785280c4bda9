#pragma once

// The residual equation
//
//     alpha * prod(q - 1) = beta * prod(q) + gamma
//
// over the primes q not yet chosen. The root (3, 2, 2) is the canonical
// equation 3 * prod(q - 1) - 2 * prod(q) = 2; each chosen prime is absorbed
// into (alpha, beta) and the triple is divided by gcd(alpha, beta).

#include "phisolve/arith.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phisolve {

struct EquationState {
    std::vector<u64> prefix;  // chosen primes, strictly increasing, all >= 5
    u128 alpha = 3;
    u128 beta = 2;
    u128 gamma = 2;
    int remaining = 0;
    u128 prefix_product = 1;  // saturates at kU128Max

    u64 largest_prime() const { return prefix.empty() ? 3 : prefix.back(); }
    u128 delta() const { return alpha - beta; }
};

EquationState root_state(int k);

/// No p in prefix divides r - 1. Since every prefix prime is below r, the
/// reverse direction (r | p - 1) cannot occur and is not tested.
bool corollary_filter(std::span<const u64> prefix, u128 r);

enum class PruneReason {
    none,
    gcd,         // gcd(alpha', beta') does not divide gamma
    corollary,   // a prefix prime divides q - 1
    degenerate,  // alpha' <= beta': the remaining product cannot reach beta/alpha
};

const char* to_string(PruneReason reason);

struct AbsorbOptions {
    bool normalize = true;  // off: keep the raw triple, no gcd prune
    bool corollary = true;
};

struct AbsorbResult {
    std::optional<EquationState> state;
    PruneReason reason = PruneReason::none;
    u128 common_divisor = 1;  // gcd(alpha', beta') before normalization

    explicit operator bool() const { return state.has_value(); }
};

/// Throws ArithmeticOverflow if alpha * (q - 1) or beta * q leaves 128 bits.
AbsorbResult absorb_prime(const EquationState& state, u64 q, AbsorbOptions options = {});

/// The finiteness bound needs more primes than the table holds.
class TableExhausted : public std::runtime_error {
public:
    explicit TableExhausted(u64 wanted_limit);
    u64 wanted_limit() const { return wanted_limit_; }

private:
    u64 wanted_limit_;
};

struct BoundOptions {
    double epsilon = 1e-9;     // log-domain margin below which the exact test decides
    std::optional<u64> cap;    // stop scanning once the bound reaches this prime
};

/// True iff choosing every remaining prime above table[m] is impossible:
///     alpha * prod(p_{m+i} - 1) > beta * prod(p_{m+i}) + gamma,  i = 1..remaining.
bool finiteness_excludes(const EquationState& state, const PrimeTable& table, std::size_t m,
                         double epsilon = 1e-9);

/// The smallest table prime p_m (scanning up from the largest prefix prime)
/// for which finiteness_excludes holds. The next chosen prime must be <= it.
/// With a cap, returns the first prime >= cap if the bound is not reached
/// earlier. Throws TableExhausted when the table runs out first.
u64 finiteness_bound(const EquationState& state, const PrimeTable& table, BoundOptions options = {});

/// integer_root(L / prefix_product, remaining), saturated to 64 bits.
/// Zero when the prefix product already exceeds L.
u64 limit_bound(const EquationState& state, u128 limit);

enum class CandidateVerdict {
    accepted,
    residue,        // f1 is not congruent to -alpha mod delta
    composite,      // q or r is not prime
    not_above_min,  // q <= min_prime
    not_increasing, // q >= r
    corollary,
    over_limit,     // prefix * q * r > L
};

const char* to_string(CandidateVerdict verdict);

struct FactorPair {
    u128 f1;
    u128 f2;
    u128 target;
};

struct EndgameCandidate {
    FactorPair pair;
    u128 q = 0;
    u128 r = 0;
    CandidateVerdict verdict = CandidateVerdict::accepted;
};

/// Everything two_prime_solve decided, for tests and diagnostics.
struct EndgameTrace {
    std::vector<u64> prefix;
    u128 alpha = 0;
    u128 beta = 0;
    u128 gamma = 0;
    u128 delta = 0;
    u128 target = 0;
    u128 residue = 0;   // -alpha mod delta
    bool limit_cut = false;
    Factorization factorization;
    std::vector<EndgameCandidate> candidates;
};

struct EndgameOptions {
    std::optional<u128> limit;
    bool congruence = true;  // off: every divisor pair is mapped and tested
    bool corollary = true;
    int max_effort = 4;
};

struct EndgameResult {
    std::vector<std::pair<u64, u64>> pairs;  // sorted by q
    u64 congruence_rejects = 0;
    u64 limit_rejects = 0;
    bool limit_cut = false;
    bool factored = false;
};

/// Prefix-aware failure: carries the branch whose endgame could not be completed.
class BranchFailure : public std::runtime_error {
public:
    BranchFailure(std::vector<u64> prefix, const std::string& what);
    const std::vector<u64>& prefix() const { return prefix_; }

private:
    std::vector<u64> prefix_;
};

/// Solves the last two primes through
///     (delta*q - alpha) * (delta*r - alpha) = alpha*beta + gamma*delta.
/// With a limit, gives up early (no factoring) when the target is too large
/// for any n <= L. Throws BranchFailure if factoring fails at max_effort or a
/// prime candidate does not fit in 64 bits.
EndgameResult two_prime_solve(const EquationState& state, u64 min_prime, const EndgameOptions& options = {},
                              EndgameTrace* trace = nullptr);

/// The single remaining prime, q = (alpha + gamma) / (alpha - beta), if it is
/// integral, prime and above the prefix.
std::optional<u64> one_prime_solve(const EquationState& state);

} // namespace phisolve
