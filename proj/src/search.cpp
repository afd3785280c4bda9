#include "phisolve/search.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

namespace phisolve {

using boost::multiprecision::cpp_int;

namespace {

constexpr u64 kInitialTableLimit = u64(1) << 22;

cpp_int to_cpp_int(u128 v) {
    cpp_int r = u64(v >> 64);
    r <<= 64;
    r += u64(v);
    return r;
}

constexpr unsigned kTasksPerThread = 4;

class Worker {
public:
    Worker(const SearchConfig& config, const PrimeTable& table, const EquationState& root)
        : config_(config), table_(table), root_(root) {}

    // Calls visit(child) for every admissible one-prime extension of state.
    template <class Visit>
    void expand(const EquationState& state, Visit&& visit) {
        ++stats_.nodes;
        const u128 delta = state.delta();
        // alpha' > beta' after absorbing q requires q > alpha/delta.
        const u128 floor_ratio = state.alpha / delta;
        const u64 start = floor_ratio >= u128(state.largest_prime())
                              ? (floor_ratio >= kU64End ? std::numeric_limits<u64>::max() : u64(floor_ratio))
                              : state.largest_prime();

        u64 upper = std::numeric_limits<u64>::max();
        if (config_.limit) {
            upper = limit_bound(state, *config_.limit);
            if (upper <= start) {
                ++stats_.pruned_limit;
                return;
            }
        }
        if (config_.prime_cap) {
            upper = std::min(upper, *config_.prime_cap);
        }
        if (config_.prunes.finiteness) {
            BoundOptions options{config_.epsilon, std::nullopt};
            if (upper != std::numeric_limits<u64>::max()) {
                options.cap = upper;
            }
            const u64 bound = finiteness_bound(state, table_, options);
            if (bound < upper) {
                upper = bound;
                ++stats_.pruned_finiteness;
            }
        }
        if (upper > table_.limit()) {
            throw TableExhausted(upper);
        }

        const AbsorbOptions absorb_options{config_.prunes.gcd, false};
        for (std::size_t i = table_.upper_index(start); i < table_.size() && table_[i] <= upper; ++i) {
            const u64 q = table_[i];
            if (config_.prunes.corollary && !corollary_filter(state.prefix, q)) {
                ++stats_.pruned_corollary;
                trace_prune(state, q, PruneReason::corollary, 1);
                continue;
            }
            AbsorbResult absorbed = absorb_prime(state, q, absorb_options);
            if (!absorbed) {
                if (absorbed.reason == PruneReason::gcd) {
                    ++stats_.pruned_gcd;
                } else {
                    ++stats_.pruned_finiteness;
                }
                trace_prune(state, q, absorbed.reason, absorbed.common_divisor);
                continue;
            }
            visit(std::move(*absorbed.state));
        }
    }

    void run(const EquationState& state) {
        if (state.remaining == 1) {
            solve_last(state);
        } else if (state.remaining == 2) {
            solve_endgame(state);
        } else {
            expand(state, [this](EquationState child) { run(child); });
        }
    }

    SearchStats& stats() { return stats_; }
    std::vector<Solution>& found() { return found_; }

private:
    void trace_prune(const EquationState& state, u64 q, PruneReason reason, u128 divisor) {
        if (config_.trace) {
            config_.trace->record(SearchTrace::Prune{state.prefix, q, reason, divisor});
        }
    }

    void solve_endgame(const EquationState& state) {
        ++stats_.endgames;
        EndgameOptions options;
        options.limit = config_.limit;
        options.congruence = config_.prunes.congruence;
        options.corollary = config_.prunes.corollary;
        EndgameTrace trace;
        const EndgameResult result =
            two_prime_solve(state, state.largest_prime(), options, config_.trace ? &trace : nullptr);
        stats_.factorizations += result.factored ? 1 : 0;
        stats_.pruned_congruence += result.congruence_rejects;
        stats_.pruned_limit += result.limit_rejects + (result.limit_cut ? 1 : 0);
        if (config_.trace) {
            config_.trace->record(std::move(trace));
        }
        for (const auto& [q, r] : result.pairs) {
            std::vector<u64> factors = state.prefix;
            factors.push_back(q);
            factors.push_back(r);
            emit(std::move(factors));
        }
    }

    void solve_last(const EquationState& state) {
        ++stats_.endgames;
        const auto q = one_prime_solve(state);
        if (!q) {
            return;
        }
        if (config_.prunes.corollary && !corollary_filter(state.prefix, *q)) {
            ++stats_.pruned_corollary;
            return;
        }
        std::vector<u64> factors = state.prefix;
        factors.push_back(*q);
        emit(std::move(factors));
    }

    void emit(std::vector<u64> factors) {
        u128 n = 1;
        for (u64 q : factors) {
            auto next = checked_mul(n, q);
            if (!next) {
                throw ArithmeticOverflow("solution product exceeds 128 bits");
            }
            n = *next;
        }
        if (config_.limit && n > *config_.limit) {
            ++stats_.pruned_limit;
            return;
        }
        if (!satisfies_residual(root_, factors)) {
            throw std::logic_error("search produced a prime set failing its equation: n = " + to_string(n));
        }
        found_.push_back(Solution{n, std::move(factors)});
    }

    const SearchConfig& config_;
    const PrimeTable& table_;
    const EquationState& root_;
    SearchStats stats_;
    std::vector<Solution> found_;
};

SearchResult run_from(const EquationState& root, const SearchConfig& config, const PrimeTable& table) {
    const unsigned threads = std::max(1u, config.threads);
    Worker seed(config, table, root);

    // Breadth-first fan-out until there are enough independent subtrees.
    std::vector<EquationState> frontier{root};
    while (frontier.size() < kTasksPerThread * threads) {
        const bool expandable = std::any_of(frontier.begin(), frontier.end(),
                                            [](const EquationState& s) { return s.remaining > 2; });
        if (!expandable) {
            break;
        }
        std::vector<EquationState> next;
        for (const auto& state : frontier) {
            if (state.remaining > 2) {
                seed.expand(state, [&](EquationState child) { next.push_back(std::move(child)); });
            } else {
                next.push_back(state);
            }
        }
        frontier = std::move(next);
    }

    std::vector<Worker> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back(config, table, root);
    }
    std::atomic<std::size_t> next_task{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto drain = [&](Worker& worker) {
        try {
            for (std::size_t i = next_task++; i < frontier.size() && !failed; i = next_task++) {
                worker.run(frontier[i]);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            failed = true;
        }
    };

    if (threads == 1) {
        drain(workers[0]);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] { drain(workers[t]); });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    SearchResult result;
    result.stats = seed.stats();
    for (auto& worker : workers) {
        result.stats += worker.stats();
        auto& found = worker.found();
        result.solutions.insert(result.solutions.end(), std::make_move_iterator(found.begin()),
                                std::make_move_iterator(found.end()));
    }
    return result;
}

SearchResult run_with_table_growth(const EquationState& root, const SearchConfig& config) {
    u64 wanted = kInitialTableLimit;
    for (;;) {
        auto table = shared_prime_table(wanted);
        try {
            return run_from(root, config, *table);
        } catch (const TableExhausted& e) {
            wanted = std::max(e.wanted_limit(), table->limit() * 4);
        }
    }
}

void sort_unique(std::vector<Solution>& solutions) {
    std::sort(solutions.begin(), solutions.end(), [](const Solution& a, const Solution& b) { return a.n < b.n; });
    solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());
}

} // namespace

void SearchTrace::record(Prune prune) {
    std::lock_guard lock(mutex_);
    prunes_.push_back(std::move(prune));
}

void SearchTrace::record(EndgameTrace endgame) {
    std::lock_guard lock(mutex_);
    endgames_.push_back(std::move(endgame));
}

std::vector<SearchTrace::Prune> SearchTrace::prunes() const {
    std::lock_guard lock(mutex_);
    return prunes_;
}

std::vector<EndgameTrace> SearchTrace::endgames() const {
    std::lock_guard lock(mutex_);
    return endgames_;
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
    nodes += o.nodes;
    endgames += o.endgames;
    factorizations += o.factorizations;
    pruned_gcd += o.pruned_gcd;
    pruned_finiteness += o.pruned_finiteness;
    pruned_limit += o.pruned_limit;
    pruned_corollary += o.pruned_corollary;
    pruned_congruence += o.pruned_congruence;
    return *this;
}

int max_k_for_limit(u128 limit) {
    int k = 0;
    u128 product = 1;
    for (u64 p = 5;; p += 2) {
        if (!is_prime(p)) {
            continue;
        }
        auto next = checked_mul(product, p);
        if (!next || *next > limit) {
            return k;
        }
        product = *next;
        ++k;
    }
}

std::pair<int, int> validate(const SearchConfig& config) {
    if (config.k_min < 1) {
        throw InvalidSearch("k must be at least 1");
    }
    if (config.k_min > config.k_max) {
        throw InvalidSearch("k_min exceeds k_max");
    }
    if (config.threads < 1) {
        throw InvalidSearch("threads must be at least 1");
    }
    if (!(config.epsilon > 0)) {
        throw InvalidSearch("epsilon must be positive");
    }
    if (!config.prunes.finiteness && !config.prime_cap) {
        throw InvalidSearch("disabling the finiteness bound requires a prime cap");
    }
    if (!config.limit) {
        if (config.k_max > kMaxUnboundedK) {
            throw InvalidSearch("unbounded search is limited to k <= " + std::to_string(kMaxUnboundedK) +
                                "; give a limit for larger k");
        }
        return {config.k_min, config.k_max};
    }
    return {config.k_min, std::min(config.k_max, max_k_for_limit(*config.limit))};
}

SearchResult search(const SearchConfig& config) {
    const auto [k_min, k_max] = validate(config);
    SearchResult total;
    for (int k = k_min; k <= k_max; ++k) {
        SearchResult part = run_with_table_growth(root_state(k), config);
        total.stats += part.stats;
        total.solutions.insert(total.solutions.end(), part.solutions.begin(), part.solutions.end());
    }
    sort_unique(total.solutions);
    return total;
}

SearchResult complete_state(const EquationState& root, SearchConfig config) {
    if (root.remaining < 1) {
        throw InvalidSearch("complete_state: no primes remaining");
    }
    if (root.alpha <= root.beta || root.gamma < 1) {
        throw InvalidSearch("complete_state: requires alpha > beta and gamma >= 1");
    }
    config.k_min = 1;
    config.k_max = 1;
    validate(config);
    if (!config.limit && root.remaining > kMaxUnboundedK) {
        throw InvalidSearch("unbounded search is limited to " + std::to_string(kMaxUnboundedK) + " primes");
    }
    SearchResult result = run_with_table_growth(root, config);
    sort_unique(result.solutions);
    return result;
}

SearchResult search_exact_k(int k, std::optional<u128> limit, SearchConfig config) {
    config.k_min = k;
    config.k_max = k;
    config.limit = limit;
    return search(config);
}

SearchResult search_up_to_limit(u128 limit, SearchConfig config) {
    config.limit = limit;
    config.k_min = 1;
    config.k_max = max_k_for_limit(limit);
    if (config.k_max < 1) {
        return {};
    }
    return search(config);
}

bool satisfies_canonical(const std::vector<u64>& factors) {
    cpp_int totient_part = 3;
    cpp_int product = 2;
    for (u64 q : factors) {
        totient_part *= q - 1;
        product *= q;
    }
    return totient_part - product == 2;
}

bool satisfies_residual(const EquationState& root, const std::vector<u64>& factors) {
    cpp_int lhs = to_cpp_int(root.alpha);
    cpp_int rhs = to_cpp_int(root.beta);
    for (std::size_t i = root.prefix.size(); i < factors.size(); ++i) {
        lhs *= factors[i] - 1;
        rhs *= factors[i];
    }
    return lhs == rhs + to_cpp_int(root.gamma);
}

bool companion_is_prime(u128 n) {
    if (n % 3 != 2) {
        return false;
    }
    auto four_n = checked_mul(n, 4);
    if (!four_n || *four_n == kU128Max) {
        throw ArithmeticOverflow("companion_is_prime: 4n + 1 exceeds 128 bits");
    }
    return is_prime_wide((*four_n + 1) / 3);
}

std::shared_ptr<const PrimeTable> shared_prime_table(u64 min_limit) {
    static std::mutex mutex;
    static std::shared_ptr<const PrimeTable> table;
    std::lock_guard lock(mutex);
    if (!table || table->limit() < min_limit) {
        table = std::make_shared<const PrimeTable>(std::max(min_limit, kInitialTableLimit));
    }
    return table;
}

} // namespace phisolve
