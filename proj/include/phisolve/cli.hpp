#pragma once

#include "phisolve/search.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phisolve::cli {

enum ExitCode : int {
    kOk = 0,
    kNotASolution = 1,
    kUsage = 2,
    kArithmetic = 3,
};

struct RunReport {
    SearchConfig config;
    std::pair<int, int> k_range{0, 0};
    std::vector<Solution> solutions;
    SearchStats stats;
    double wall_seconds = 0;
};

/// One output line per solution.
std::string format_text(const Solution& s);
std::string format_json(const Solution& s);
std::string format_report_json(const RunReport& report);

/// Entry point shared by the executable and the tests; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace phisolve::cli
