#include "phisolve/cli.hpp"

#include "phisolve/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ostream>
#include <sstream>
#include <thread>

namespace phisolve::cli {

namespace {

using nlohmann::json;

json number_json(u128 v) {
    if (v < kU64End) {
        return json(u64(v));
    }
    return json(to_string(v));
}

std::string join(const std::vector<u64>& values, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            s += sep;
        }
        s += std::to_string(values[i]);
    }
    return s;
}

std::vector<u64> prime_list(const Factorization& f) {
    std::vector<u64> out;
    for (const auto& pp : f.factors) {
        for (unsigned i = 0; i < pp.exponent; ++i) {
            out.push_back(u64(pp.prime));
        }
    }
    return out;
}

std::string format_factorization(const Factorization& f) {
    if (f.factors.empty()) {
        return "1";
    }
    std::string s;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        if (i != 0) {
            s += " * ";
        }
        s += to_string(f.factors[i].prime);
        if (f.factors[i].exponent > 1) {
            s += "^" + std::to_string(f.factors[i].exponent);
        }
    }
    return s;
}

u128 parse_number_or_throw(const std::string& text, const char* what) {
    auto v = parse_u128(text);
    if (!v) {
        throw CLI::ValidationError(what, "expected a non-negative integer (digits, or NeM), got '" + text + "'");
    }
    return *v;
}

void emit_solutions(const std::vector<Solution>& solutions, const std::string& format, std::ostream& out) {
    for (const auto& s : solutions) {
        out << (format == "json" ? format_json(s) : format_text(s)) << '\n';
    }
}

int cmd_search(const std::string& k_text, int k_min, int k_max, const std::string& limit_text, unsigned threads,
               const std::string& format, bool stats, bool k_given, bool range_given, std::ostream& out,
               std::ostream& err) {
    if (k_given && range_given) {
        err << "error: --k cannot be combined with --k-min/--k-max\n";
        return kUsage;
    }
    SearchConfig config;
    config.threads = threads;
    if (!limit_text.empty()) {
        config.limit = parse_number_or_throw(limit_text, "--limit");
    }
    if (k_given) {
        const auto k = parse_u128(k_text);
        if (!k || *k < 1 || *k > 1000) {
            err << "error: --k expects a positive integer\n";
            return kUsage;
        }
        config.k_min = config.k_max = int(*k);
    } else if (range_given) {
        config.k_min = k_min;
        config.k_max = k_max;
    } else if (config.limit) {
        config.k_min = 1;
        config.k_max = max_k_for_limit(*config.limit);
        if (config.k_max < 1) {
            RunReport report;
            report.config = config;
            if (stats && format == "json") {
                out << format_report_json(report) << '\n';
            }
            return kOk;
        }
    } else {
        err << "error: give --k, --k-min/--k-max, or --limit\n";
        return kUsage;
    }

    RunReport report;
    report.config = config;
    try {
        report.k_range = validate(config);
    } catch (const InvalidSearch& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    const auto started = std::chrono::steady_clock::now();
    SearchResult result = search(config);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.solutions = std::move(result.solutions);
    report.stats = result.stats;

    emit_solutions(report.solutions, format, out);
    if (stats) {
        if (format == "json") {
            out << format_report_json(report) << '\n';
        } else {
            const auto& st = report.stats;
            err << "k " << report.k_range.first << ".." << report.k_range.second << ", threads "
                << config.threads << ", " << report.wall_seconds << " s\n"
                << "nodes " << st.nodes << ", endgames " << st.endgames << ", factorizations "
                << st.factorizations << '\n'
                << "pruned: gcd " << st.pruned_gcd << ", finiteness " << st.pruned_finiteness << ", limit "
                << st.pruned_limit << ", corollary " << st.pruned_corollary << ", congruence "
                << st.pruned_congruence << '\n';
        }
    }
    return kOk;
}

int cmd_scan(const std::string& limit_text, const std::string& format, std::ostream& out, std::ostream& err) {
    const u128 limit = parse_number_or_throw(limit_text, "--limit");
    if (limit > kMaxTotientLimit) {
        err << "error: scan limit above " << kMaxTotientLimit << "; use 'search --limit' instead\n";
        return kUsage;
    }
    if (limit < 1) {
        return kOk;
    }
    for (u64 n : scan_solutions(u64(limit))) {
        const Verdict v = check_single(n);
        Solution s{n, prime_list(v.factors)};
        out << (format == "json" ? format_json(s) : format_text(s)) << '\n';
    }
    return kOk;
}

int cmd_check(const std::string& n_text, std::ostream& out, std::ostream& err) {
    const auto n = parse_u128(n_text);
    if (!n || *n < 1) {
        err << "error: expected a positive integer, got '" << n_text << "'\n";
        return kUsage;
    }
    const Verdict v = check_single(*n);
    out << "n: " << to_string(v.n) << '\n'
        << "solution: " << (v.is_solution ? "yes" : "no") << '\n'
        << "factors: " << format_factorization(v.factors) << '\n'
        << "phi: " << to_string(v.totient) << '\n'
        << "square-free: " << (v.square_free ? "yes" : "no") << '\n'
        << "n mod 6: " << v.mod6 << '\n';
    if (v.n % 3 == 2) {
        const u128 companion = (4 * v.n + 1) / 3;
        out << "relevance: " << (v.relevance ? "yes" : "no") << " ((4n+1)/3 = " << to_string(companion)
            << (v.relevance ? " prime" : " not prime") << ")\n";
    } else {
        out << "relevance: no ((4n+1)/3 not an integer)\n";
    }
    return v.is_solution ? kOk : kNotASolution;
}

} // namespace

std::string format_text(const Solution& s) {
    return "n=" + to_string(s.n) + " k=" + std::to_string(s.k()) + " factors=[" + join(s.factors, ",") +
           "] relevance=" + (companion_is_prime(s.n) ? "yes" : "no");
}

std::string format_json(const Solution& s) {
    json j;
    j["n"] = number_json(s.n);
    j["factors"] = s.factors;
    j["k"] = s.k();
    j["relevance"] = companion_is_prime(s.n);
    return j.dump();
}

std::string format_report_json(const RunReport& report) {
    const auto& c = report.config;
    const auto& st = report.stats;
    json config = {
        {"k_min", report.k_range.first},
        {"k_max", report.k_range.second},
        {"limit", c.limit ? number_json(*c.limit) : json(nullptr)},
        {"threads", c.threads},
        {"epsilon", c.epsilon},
    };
    json stats = {
        {"nodes", st.nodes},
        {"endgames", st.endgames},
        {"factorizations", st.factorizations},
        {"pruned", {{"gcd", st.pruned_gcd},
                    {"finiteness", st.pruned_finiteness},
                    {"limit", st.pruned_limit},
                    {"corollary", st.pruned_corollary},
                    {"congruence", st.pruned_congruence}}},
    };
    json report_json = {
        {"config", config},
        {"solutions", report.solutions.size()},
        {"stats", stats},
        {"wall_seconds", report.wall_seconds},
        {"threads", c.threads},
    };
    return json{{"report", report_json}}.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finds every n with phi(n) = 2(n + 1)/3"};
    app.require_subcommand(1);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

    std::string k_text;
    int k_min = 1;
    int k_max = 1;
    std::string limit_text;
    unsigned threads = hw;
    std::string format = "text";
    bool stats = false;
    auto* search_cmd = app.add_subcommand("search", "branch-and-prune search over prime sets");
    auto* k_opt = search_cmd->add_option("--k", k_text, "exact number of prime factors");
    auto* kmin_opt = search_cmd->add_option("--k-min", k_min, "smallest number of prime factors")
                         ->check(CLI::PositiveNumber);
    auto* kmax_opt = search_cmd->add_option("--k-max", k_max, "largest number of prime factors")
                         ->check(CLI::PositiveNumber);
    search_cmd->add_option("--limit", limit_text, "only n <= limit (accepts 1e14)");
    search_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    search_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    search_cmd->add_flag("--stats", stats, "print branch statistics");

    std::string scan_limit;
    std::string scan_format = "text";
    auto* scan_cmd = app.add_subcommand("scan", "brute-force totient scan");
    scan_cmd->add_option("--limit", scan_limit, "scan 1..limit (at most 2e8)")->required();
    scan_cmd->add_option("--format", scan_format, "text or json")->check(CLI::IsMember({"text", "json"}));

    std::string check_n;
    auto* check_cmd = app.add_subcommand("check", "diagnose a single n");
    check_cmd->add_option("n", check_n, "value to check")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (search_cmd->parsed()) {
            const bool k_given = k_opt->count() > 0;
            const bool range_given = kmin_opt->count() > 0 || kmax_opt->count() > 0;
            if (range_given && kmin_opt->count() == 0) {
                k_min = 1;
            }
            if (range_given && kmax_opt->count() == 0) {
                k_max = k_min;
            }
            return cmd_search(k_text, k_min, k_max, limit_text, threads, format, stats, k_given, range_given, out,
                              err);
        }
        if (scan_cmd->parsed()) {
            return cmd_scan(scan_limit, scan_format, out, err);
        }
        return cmd_check(check_n, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidSearch& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const BranchFailure& e) {
        err << "arithmetic failure: " << e.what() << '\n';
        return kArithmetic;
    } catch (const FactoringGaveUp& e) {
        err << "arithmetic failure: " << e.what() << '\n';
        return kArithmetic;
    } catch (const ArithmeticOverflow& e) {
        err << "arithmetic failure: " << e.what() << '\n';
        return kArithmetic;
    } catch (const std::length_error& e) {
        err << "resource failure: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace phisolve::cli
