#pragma once

#include <string>
#include <vector>

#include "kernelcur/records.hpp"

namespace kernelcur::cli {

struct ReportOptions {
    std::vector<double> p_thresholds{1.0};
    int k = 10;
    bool include_zeros = false;
    std::string source;  // echoed in the header line
};

// One column per level tag (plus "all"); a task's level comes from the
// "level" extra field of its records.
std::string render_report(const std::vector<TaskGroup>& groups, const ReportOptions& options);

}  // namespace kernelcur::cli
