// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "phisolve/arith.hpp"
#include "phisolve/equation.hpp"
#include "phisolve/search.hpp"

#include <json.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace phisolve;
using boost::multiprecision::cpp_int;

namespace {

constexpr double kKnownSolutionsSeconds = 10;
constexpr double kFiveSixSeconds = 600;
constexpr double kBoundedSeconds = 3600;
constexpr double kOracleSeconds = 60;

using Factors = std::vector<u64>;
const std::set<Factors> kKnown = {{5}, {5, 7}, {5, 7, 37}, {5, 7, 37, 1297}};

struct Run {
    int code = -1;
    std::string out;
    double seconds = 0;
};

Run run_cli(const std::string& args) {
    const std::string command = std::string(PHISOLVE_CLI_PATH) + " " + args;
    const auto started = std::chrono::steady_clock::now();
    Run run;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        return run;
    }
    std::array<char, 4096> buffer{};
    while (std::size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) {
        run.out.append(buffer.data(), n);
    }
    const int status = pclose(pipe);
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return run;
}

struct Emitted {
    u128 n = 0;
    Factors factors;
};

// Every solution line seen by any criterion, for the structural check.
std::vector<Emitted> g_emitted;

std::set<Factors> parse_json_lines(const std::string& text, bool* ok) {
    std::set<Factors> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("factors")) {
            *ok = false;
            continue;
        }
        Emitted e;
        e.factors = j["factors"].get<Factors>();
        const auto& n = j["n"];
        e.n = n.is_string() ? *parse_u128(n.get<std::string>()) : u128(n.get<u64>());
        g_emitted.push_back(e);
        out.insert(e.factors);
    }
    return out;
}

bool report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  AC" << id << "  " << name << "  (" << detail << ")" << std::endl;
    return pass;
}

std::string seconds(double s) {
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << s << " s";
    return o.str();
}

bool criterion_known_solutions() {
    const Run r = run_cli("search --k-min 1 --k-max 4 --threads 1 --format json");
    bool ok = r.code == 0;
    const auto got = parse_json_lines(r.out, &ok);
    ok = ok && got == kKnown && r.seconds < kKnownSolutionsSeconds;
    return report(1, "k = 1..4 gives exactly the four known solutions", ok,
                  std::to_string(got.size()) + " solutions, " + seconds(r.seconds) + " single-threaded, limit " +
                      seconds(kKnownSolutionsSeconds));
}

bool criterion_five_six() {
    const Run five = run_cli("search --k 5 --format json");
    const Run six = run_cli("search --k 6 --format json");
    const bool ok = five.code == 0 && six.code == 0 && five.out.empty() && six.out.empty() &&
                    five.seconds + six.seconds <= kFiveSixSeconds;
    return report(2, "k = 5 and k = 6 have no solutions", ok,
                  "k=5 " + seconds(five.seconds) + ", k=6 " + seconds(six.seconds) + ", limit " +
                      seconds(kFiveSixSeconds));
}

bool criterion_bounded() {
    const Run r = run_cli("search --k-min 1 --k-max 12 --limit 1e10 --format json");
    bool ok = r.code == 0;
    const auto got = parse_json_lines(r.out, &ok);
    ok = ok && got == kKnown && r.seconds <= kBoundedSeconds;
    return report(3, "n <= 1e10 gives only the four known solutions", ok,
                  std::to_string(got.size()) + " solutions, " + seconds(r.seconds) + ", limit " +
                      seconds(kBoundedSeconds));
}

bool criterion_oracle() {
    const Run scan = run_cli("scan --limit 1e7 --format json");
    const Run search = run_cli("search --limit 1e7 --format json");
    bool ok = scan.code == 0 && search.code == 0;
    const auto a = parse_json_lines(scan.out, &ok);
    const auto b = parse_json_lines(search.out, &ok);
    ok = ok && a == b && !a.empty() && scan.seconds < kOracleSeconds && search.seconds < kOracleSeconds;
    return report(4, "scan and search agree up to 1e7", ok,
                  std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " solutions, scan " +
                      seconds(scan.seconds) + ", search " + seconds(search.seconds));
}

bool criterion_golden() {
    bool a = false, b = false, c = false;

    // (a) [5, 11]: gcd(60, 55) = 5 does not divide gamma = 1.
    SearchTrace trace;
    SearchConfig config;
    config.k_min = config.k_max = 4;
    config.prunes.corollary = false;
    config.threads = 1;
    config.trace = &trace;
    search(config);
    for (const auto& p : trace.prunes()) {
        if (p.prefix == Factors{5} && p.prime == 11) {
            a = p.reason == PruneReason::gcd && p.common_divisor == 5;
        }
    }
    auto s5 = absorb_prime(root_state(4), 5);
    const auto direct = absorb_prime(*s5.state, 11);
    a = a && !direct && direct.reason == PruneReason::gcd && direct.common_divisor == 5;

    for (const auto& e : trace.endgames()) {
        if (e.prefix == Factors{5, 13}) {
            // (b) T = 4687 = 43 * 109, residue 5 mod 7, nothing survives.
            const auto& f = e.factorization.factors;
            const bool factors_ok = f.size() == 2 && f[0].prime == 43 && f[1].prime == 109;
            bool none = true;
            for (const auto& cand : e.candidates) {
                none = none && cand.verdict == CandidateVerdict::residue;
            }
            b = e.target == 4687 && factors_ok && e.delta == 7 && e.residue == 5 && none && e.candidates.size() == 2;
        }
        if (e.prefix == Factors{5, 7}) {
            // (c) T = 1261 = 13 * 97: (37, 1297) accepted, (49, 133) rejected.
            bool accepted = false, rejected = false;
            for (const auto& cand : e.candidates) {
                if (cand.q == 37 && cand.r == 1297) {
                    accepted = cand.verdict == CandidateVerdict::accepted;
                }
                if (cand.q == 49 && cand.r == 133) {
                    rejected = cand.verdict == CandidateVerdict::composite;
                }
            }
            c = e.target == 1261 && accepted && rejected;
        }
    }
    return report(5, "golden subcase traces", a && b && c,
                  std::string("[5,11] gcd 5: ") + (a ? "ok" : "mismatch") + ", [5,13] T=4687: " +
                      (b ? "ok" : "mismatch") + ", [5,7] T=1261: " + (c ? "ok" : "mismatch"));
}

bool trial_prime(u64 n) {
    if (n < 2) {
        return false;
    }
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

bool property_round_trip() {
    std::mt19937_64 rng(20261018);
    for (int i = 0; i < 100'000; ++i) {
        const u128 n = (u128(rng()) << 64 | rng()) >> (rng() % 72 + 56);
        if (n == 0) {
            continue;
        }
        const auto f = factorize(n, 4);
        u128 product = 1;
        for (const auto& pp : f.factors) {
            if (!is_prime_wide(pp.prime)) {
                return false;
            }
            for (unsigned e = 0; e < pp.exponent; ++e) {
                product *= pp.prime;
            }
        }
        if (product != n) {
            return false;
        }
    }
    return true;
}

bool property_is_prime() {
    for (u64 n = 0; n <= 1'000'000; ++n) {
        if (is_prime(n) != trial_prime(n)) {
            return false;
        }
    }
    return true;
}

bool property_endgame_brute_force(std::size_t* states_checked) {
    static const PrimeTable table(1 << 20);
    const u64 cap = 1'000'000, r_max = 100'000;
    std::vector<EquationState> states;
    std::function<void(const EquationState&)> walk = [&](const EquationState& s) {
        if (s.remaining == 2) {
            states.push_back(s);
            return;
        }
        const u64 bound = finiteness_bound(s, table, BoundOptions{1e-9, u64(cap / s.prefix_product)});
        for (std::size_t i = table.upper_index(s.largest_prime()); table[i] <= bound; ++i) {
            if (s.prefix_product * table[i] > cap) {
                break;
            }
            if (auto r = absorb_prime(s, table[i])) {
                walk(*r.state);
            }
        }
    };
    for (int k = 2; k <= 8; ++k) {
        walk(root_state(k));
    }
    *states_checked = states.size();
    const std::size_t end = table.upper_index(r_max);
    for (const auto& s : states) {
        std::set<std::pair<u64, u64>> solved, brute;
        for (auto [q, r] : two_prime_solve(s, s.largest_prime()).pairs) {
            if (r <= r_max) {
                solved.emplace(q, r);
            }
        }
        const cpp_int a = u64(s.alpha), b = u64(s.beta), g = u64(s.gamma);
        for (std::size_t i = table.upper_index(s.largest_prime()); i < end; ++i) {
            const cpp_int q = table[i];
            const cpp_int coef = a * (q - 1) - b * q;
            if (coef <= 0) {
                continue;
            }
            const cpp_int num = a * (q - 1) + g;
            if (num % coef != 0) {
                continue;
            }
            const cpp_int r = num / coef;
            if (r > q && r <= r_max && table.contains(u64(r))) {
                brute.emplace(table[i], u64(r));
            }
        }
        if (solved != brute) {
            return false;
        }
    }
    return !states.empty();
}

bool property_prune_soundness() {
    for (int k = 1; k <= 5; ++k) {
        SearchConfig full;
        full.k_min = full.k_max = k;
        full.prime_cap = 100;
        const auto reference = search(full).solutions;
        for (PruneToggles t : {PruneToggles{false, false, false, false}, PruneToggles{false, true, true, true},
                               PruneToggles{true, false, true, true}, PruneToggles{true, true, false, true},
                               PruneToggles{true, true, true, false}}) {
            SearchConfig c = full;
            c.prunes = t;
            if (search(c).solutions != reference) {
                return false;
            }
        }
    }
    return true;
}

bool property_threads() {
    const Run one = run_cli("search --limit 1e10 --threads 1");
    const Run two = run_cli("search --limit 1e10 --threads 2");
    const Run eight = run_cli("search --limit 1e10 --threads 8");
    const Run six1 = run_cli("search --k-min 1 --k-max 6 --threads 1");
    const Run six8 = run_cli("search --k-min 1 --k-max 6 --threads 8");
    return one.code == 0 && !one.out.empty() && one.out == two.out && one.out == eight.out &&
           six1.out == six8.out && !six1.out.empty();
}

bool criterion_properties() {
    std::size_t states = 0;
    const bool round_trip = property_round_trip();
    const bool primality = property_is_prime();
    const bool endgame = property_endgame_brute_force(&states);
    const bool soundness = property_prune_soundness();
    const bool threads = property_threads();
    auto mark = [](bool b) { return b ? "ok" : "FAILED"; };
    std::ostringstream detail;
    detail << "round-trip 1e5: " << mark(round_trip) << ", is_prime <= 1e6: " << mark(primality)
           << ", endgame vs brute force on " << states << " states: " << mark(endgame)
           << ", prune soundness: " << mark(soundness) << ", threads 1/2/8: " << mark(threads);
    return report(6, "property suites", round_trip && primality && endgame && soundness && threads, detail.str());
}

bool criterion_structure() {
    std::size_t violations = 0;
    for (const auto& e : g_emitted) {
        cpp_int n = 1, prod = 1, prod_minus = 1;
        bool ok = !e.factors.empty();
        for (std::size_t i = 0; i < e.factors.size(); ++i) {
            const u64 q = e.factors[i];
            ok = ok && q >= 5 && is_prime(q);
            for (std::size_t j = 0; j < i; ++j) {
                // Strictly increasing distinct primes: square-free, and p does not divide r - 1.
                ok = ok && e.factors[j] < q && (q - 1) % e.factors[j] != 0;
            }
            n *= q;
            prod *= q;
            prod_minus *= q - 1;
        }
        ok = ok && 3 * prod_minus - 2 * prod == 2;
        ok = ok && n % 6 == 5;
        ok = ok && n == cpp_int(u64(e.n >> 64)) * (cpp_int(1) << 64) + cpp_int(u64(e.n));
        violations += ok ? 0 : 1;
    }
    return report(7, "structural invariants on every emitted solution", violations == 0 && !g_emitted.empty(),
                  std::to_string(g_emitted.size()) + " solutions checked, " + std::to_string(violations) +
                      " violations");
}

} // namespace

int main() {
    bool all = true;
    all &= criterion_known_solutions();
    all &= criterion_five_six();
    all &= criterion_bounded();
    all &= criterion_oracle();
    all &= criterion_golden();
    all &= criterion_properties();
    all &= criterion_structure();
    std::cout << (all ? "all acceptance criteria passed" : "acceptance criteria FAILED") << std::endl;
    return all ? 0 : 1;
}
