#pragma once

#include "serrin/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace serrin {

inline constexpr const char* kReportSchema = "serrinlab-report/1";

/// One declared check: the operation it exercises, the property verified,
/// the measured value and the limit it is compared against.
struct CheckResult {
    std::string name;
    std::string operation;
    std::string property;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

struct RunReport {
    std::string out_dir;
    std::vector<CheckResult> checks;
    std::vector<std::string> files;  // relative to out_dir, in write order

    bool all_passed() const;
};

/// Runs the configured experiment and writes its reports (config echo,
/// run.json, CSVs, summary.txt) to the output directory. Outputs depend only
/// on the configuration and seed, not on the thread count. Errors from the
/// numerical operations propagate after summary.txt records them.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace serrin
