#include "phisolve/equation.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace phisolve {

using boost::multiprecision::cpp_int;

namespace {

cpp_int wide(u128 v) {
    cpp_int r = u64(v >> 64);
    r <<= 64;
    r += u64(v);
    return r;
}

u128 narrow(const cpp_int& v) {
    return (u128(static_cast<u64>(v >> 64)) << 64) | u128(static_cast<u64>(v & cpp_int(~u64(0))));
}

std::string prefix_string(std::span<const u64> prefix) {
    std::string s = "[";
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (i != 0) {
            s += ',';
        }
        s += std::to_string(prefix[i]);
    }
    return s + "]";
}

} // namespace

EquationState root_state(int k) {
    if (k < 1) {
        throw std::invalid_argument("root_state: k must be positive");
    }
    EquationState s;
    s.remaining = k;
    return s;
}

bool corollary_filter(std::span<const u64> prefix, u128 r) {
    const u128 r_minus_one = r - 1;
    return std::none_of(prefix.begin(), prefix.end(), [&](u64 p) { return r_minus_one % p == 0; });
}

const char* to_string(PruneReason reason) {
    switch (reason) {
    case PruneReason::none: return "none";
    case PruneReason::gcd: return "gcd";
    case PruneReason::corollary: return "corollary";
    case PruneReason::degenerate: return "degenerate";
    }
    return "?";
}

const char* to_string(CandidateVerdict verdict) {
    switch (verdict) {
    case CandidateVerdict::accepted: return "accepted";
    case CandidateVerdict::residue: return "residue";
    case CandidateVerdict::composite: return "composite";
    case CandidateVerdict::not_above_min: return "not-above-min";
    case CandidateVerdict::not_increasing: return "not-increasing";
    case CandidateVerdict::corollary: return "corollary";
    case CandidateVerdict::over_limit: return "over-limit";
    }
    return "?";
}

AbsorbResult absorb_prime(const EquationState& state, u64 q, AbsorbOptions options) {
    if (state.remaining < 1) {
        throw std::invalid_argument("absorb_prime: no primes remaining");
    }
    if (q <= state.largest_prime()) {
        throw std::invalid_argument("absorb_prime: " + std::to_string(q) + " does not extend " +
                                    prefix_string(state.prefix));
    }
    auto alpha = checked_mul(state.alpha, q - 1);
    auto beta = checked_mul(state.beta, q);
    if (!alpha || !beta) {
        throw ArithmeticOverflow("absorb_prime: coefficients exceed 128 bits at " +
                                 prefix_string(state.prefix) + " + " + std::to_string(q));
    }
    u128 gamma = state.gamma;

    AbsorbResult result;
    if (options.normalize) {
        const u128 g = gcd(*alpha, *beta);
        result.common_divisor = g;
        if (gamma % g != 0) {
            result.reason = PruneReason::gcd;
            return result;
        }
        *alpha /= g;
        *beta /= g;
        gamma /= g;
    }
    if (options.corollary && !corollary_filter(state.prefix, q)) {
        result.reason = PruneReason::corollary;
        return result;
    }
    if (*alpha <= *beta) {
        result.reason = PruneReason::degenerate;
        return result;
    }

    EquationState next;
    next.prefix = state.prefix;
    next.prefix.push_back(q);
    next.alpha = *alpha;
    next.beta = *beta;
    next.gamma = gamma;
    next.remaining = state.remaining - 1;
    next.prefix_product = checked_mul(state.prefix_product, q).value_or(kU128Max);
    result.state = std::move(next);
    return result;
}

TableExhausted::TableExhausted(u64 wanted_limit)
    : std::runtime_error("prime table too small; need limit " + std::to_string(wanted_limit)),
      wanted_limit_(wanted_limit) {}

bool finiteness_excludes(const EquationState& state, const PrimeTable& table, std::size_t m,
                         double epsilon) {
    const auto r = std::size_t(state.remaining);
    if (m + r >= table.size()) {
        throw TableExhausted(std::max<u64>(table.limit() * 4, 1024));
    }
    const std::size_t first = m + 1;
    const std::size_t last = m + 1 + r;

    // log(alpha/beta) + sum log(1 - 1/p) - log(1 + gamma / (beta * prod p))
    const long double ratio = std::log1p(static_cast<long double>(state.delta()) /
                                         static_cast<long double>(state.beta));
    const long double log_tail = std::log(static_cast<long double>(state.gamma)) -
                                 std::log(static_cast<long double>(state.beta)) -
                                 table.log_product(first, last);
    const long double margin = ratio + table.log_survival(first, last) - std::log1p(std::exp(log_tail));
    if (margin > epsilon) {
        return true;
    }
    if (margin < -epsilon) {
        return false;
    }

    cpp_int lhs = wide(state.alpha);
    cpp_int rhs = wide(state.beta);
    for (std::size_t i = first; i < last; ++i) {
        lhs *= table[i] - 1;
        rhs *= table[i];
    }
    rhs += wide(state.gamma);
    return lhs > rhs;
}

u64 finiteness_bound(const EquationState& state, const PrimeTable& table, BoundOptions options) {
    if (state.remaining < 1) {
        throw std::invalid_argument("finiteness_bound: no primes remaining");
    }
    const u64 largest = state.largest_prime();
    if (largest > table.limit()) {
        throw TableExhausted(std::max<u64>(largest * 4, table.limit() * 4));
    }
    const std::size_t start = table.lower_index(largest);
    const std::size_t r = std::size_t(state.remaining);
    if (table.size() <= start + r) {
        throw TableExhausted(std::max<u64>(table.limit() * 4, 1024));
    }
    const std::size_t last_testable = table.size() - r - 1;
    const std::size_t cap_index =
        options.cap ? table.lower_index(*options.cap) : std::numeric_limits<std::size_t>::max();

    auto excludes = [&](std::size_t m) { return finiteness_excludes(state, table, m, options.epsilon); };

    if (cap_index <= start || excludes(start)) {
        return table[start];
    }

    // Exponential then binary search for the first excluding index; the
    // predicate is monotone in m.
    std::size_t lo = start;  // known not to exclude
    std::size_t hi = start;
    std::size_t step = 1;
    for (;;) {
        hi = std::min({lo + step, cap_index, last_testable});
        const bool hit = excludes(hi);
        if (hit) {
            break;
        }
        if (hi == cap_index) {
            return table[cap_index];
        }
        if (hi == last_testable) {
            throw TableExhausted(std::max<u64>(table.limit() * 4, 1024));
        }
        lo = hi;
        step *= 2;
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (excludes(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return table[hi];
}

u64 limit_bound(const EquationState& state, u128 limit) {
    if (state.remaining < 1) {
        throw std::invalid_argument("limit_bound: no primes remaining");
    }
    if (state.prefix_product > limit) {
        return 0;
    }
    const u128 root = integer_root(limit / state.prefix_product, unsigned(state.remaining));
    return root >= kU64End ? std::numeric_limits<u64>::max() : u64(root);
}

BranchFailure::BranchFailure(std::vector<u64> prefix, const std::string& what)
    : std::runtime_error("branch " + prefix_string(prefix) + ": " + what), prefix_(std::move(prefix)) {}

EndgameResult two_prime_solve(const EquationState& state, u64 min_prime, const EndgameOptions& options,
                              EndgameTrace* trace) {
    if (state.remaining != 2) {
        throw std::invalid_argument("two_prime_solve: exactly two primes must remain");
    }
    if (state.alpha <= state.beta) {
        throw std::invalid_argument("two_prime_solve: requires alpha > beta");
    }
    const u128 alpha = state.alpha;
    const u128 delta = state.delta();
    const cpp_int target_wide = wide(alpha) * wide(state.beta) + wide(state.gamma) * wide(delta);

    EndgameResult result;
    if (trace) {
        trace->prefix = state.prefix;
        trace->alpha = alpha;
        trace->beta = state.beta;
        trace->gamma = state.gamma;
        trace->delta = delta;
        trace->residue = (delta - alpha % delta) % delta;
        trace->target = target_wide > wide(kU128Max) ? kU128Max : narrow(target_wide);
    }

    // Both factors are positive and below delta*q and delta*r, so
    // T < delta^2 * q * r = delta^2 * n / prefix; nothing fits under L once
    // T * prefix >= delta^2 * L.
    if (options.limit) {
        if (target_wide * wide(state.prefix_product) >= wide(delta) * wide(delta) * wide(*options.limit)) {
            result.limit_cut = true;
            if (trace) {
                trace->limit_cut = true;
            }
            return result;
        }
    }
    if (target_wide > wide(kU128Max)) {
        throw BranchFailure(state.prefix, "endgame target exceeds 128 bits");
    }
    const u128 target = narrow(target_wide);

    Factorization factors;
    for (int effort = 1;; ++effort) {
        try {
            factors = factorize(target, effort);
            break;
        } catch (const FactoringGaveUp& e) {
            if (effort >= options.max_effort) {
                throw BranchFailure(state.prefix, e.what());
            }
        }
    }
    result.factored = true;

    const u128 residue = (delta - alpha % delta) % delta;
    const cpp_int limit_wide = options.limit ? wide(*options.limit) : cpp_int(0);
    std::vector<u64> with_q = state.prefix;
    with_q.push_back(0);

    for (u128 f1 : factors.divisors()) {
        const u128 f2 = target / f1;
        if (f1 > f2) {
            break;
        }
        EndgameCandidate cand{{f1, f2, target}};
        auto record = [&](CandidateVerdict v) {
            cand.verdict = v;
            if (trace) {
                trace->candidates.push_back(cand);
            }
        };

        // The residue test alone implies r is integral only when gcd(alpha, delta) = 1.
        const bool residue_ok = !options.congruence || f1 % delta == residue;
        const bool integral = residue_ok && (wide(f1) + alpha) % wide(delta) == 0 &&
                              (wide(f2) + alpha) % wide(delta) == 0;
        if (!integral) {
            if (options.congruence) {
                ++result.congruence_rejects;
            }
            record(CandidateVerdict::residue);
            continue;
        }
        const cpp_int q_wide = (wide(f1) + alpha) / wide(delta);
        const cpp_int r_wide = (wide(f2) + alpha) / wide(delta);
        if (r_wide > wide(kU128Max)) {
            throw BranchFailure(state.prefix, "endgame candidate exceeds 128 bits");
        }
        cand.q = narrow(q_wide);
        cand.r = narrow(r_wide);

        if (cand.q <= min_prime) {
            record(CandidateVerdict::not_above_min);
            continue;
        }
        if (cand.q >= cand.r) {
            record(CandidateVerdict::not_increasing);
            continue;
        }
        if (options.limit && wide(state.prefix_product) * q_wide * r_wide > limit_wide) {
            ++result.limit_rejects;
            record(CandidateVerdict::over_limit);
            continue;
        }
        if (!is_prime_wide(cand.q) || !is_prime_wide(cand.r)) {
            record(CandidateVerdict::composite);
            continue;
        }
        if (cand.r >= kU64End) {
            throw BranchFailure(state.prefix, "prime " + to_string(cand.r) + " exceeds 64 bits");
        }
        if (options.corollary) {
            with_q.back() = u64(cand.q);
            if (!corollary_filter(state.prefix, cand.q) || !corollary_filter(with_q, cand.r)) {
                record(CandidateVerdict::corollary);
                continue;
            }
        }
        record(CandidateVerdict::accepted);
        result.pairs.emplace_back(u64(cand.q), u64(cand.r));
    }

    if (trace) {
        trace->factorization = factors;
    }
    return result;
}

std::optional<u64> one_prime_solve(const EquationState& state) {
    if (state.remaining != 1) {
        throw std::invalid_argument("one_prime_solve: exactly one prime must remain");
    }
    const u128 delta = state.delta();
    auto numerator = checked_add(state.alpha, state.gamma);
    if (!numerator) {
        throw ArithmeticOverflow("one_prime_solve: alpha + gamma exceeds 128 bits");
    }
    if (*numerator % delta != 0) {
        return std::nullopt;
    }
    const u128 q = *numerator / delta;
    if (q <= state.largest_prime()) {
        return std::nullopt;
    }
    if (q >= kU64End) {
        throw ArithmeticOverflow("one_prime_solve: prime candidate exceeds 64 bits");
    }
    if (!is_prime(u64(q))) {
        return std::nullopt;
    }
    return u64(q);
}

} // namespace phisolve
