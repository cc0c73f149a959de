#pragma once

#include "serrin/geometry.hpp"
#include "serrin/operators.hpp"
#include "serrin/radial.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace serrin {

/// Malformed configuration; `line` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// Flat `section.key = value` pairs; '#' starts a comment. Duplicate keys are
/// rejected.
std::map<std::string, ConfigEntry> parse_config_text(std::istream& in, const std::string& source);

/// Reals accept plain numbers and products/quotients with `pi`, e.g. "2*pi/3"
/// or "1/64".
double parse_real(const std::string& text);

enum class ExperimentKind { solve, sector_beta, beta_limit, moving_planes, boundary_check, gauss_map, verify_all };

std::string to_string(ExperimentKind kind);

struct DomainConfig {
    std::string shape = "disk";  // disk, ellipse, egg, stadium
    double R = 1.0;
    double a = 1.5;
    double b = 1.0;
    double amplitude = 0.2;
    double half_flat = 1.0;
    double radius = 0.5;

    DomainCurve make() const;
};

struct NumericsConfig {
    double h = 1.0 / 64;
    int K = 8;
    double tol = 1e-6;
    double dt = 0.0;
    int max_iter = 0;
    std::string method = "policy";  // policy or explicit
    int samples = 64;
    int directions = 16;
    double ds_fraction = 1e-3;
};

struct SectorConfig {
    std::vector<double> theta;
    std::vector<int> m_list{1, 2, 4, 8, 16, 32};
    bool decay_fit = false;
    double decay_h = 1.0 / 128;
    double r_in = 0.05;
};

/// Declared checks; unset optional thresholds are skipped.
struct CheckConfig {
    std::optional<double> max_error;
    std::optional<double> c0_rel;
    std::optional<double> defect_max;
    std::optional<double> defect_min;
    std::vector<double> beta_expected;
    double beta_tol = 1e-3;
    double decay_tol = 0.05;
    double limit_tol = 0.05;
    std::optional<std::string> verdict;
    std::optional<double> measure;
    double measure_tol = 1e-12;
    bool curvature = true;
    bool mixed = true;
    bool u_nn = true;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::solve;
    OperatorSpec op = OperatorSpec::laplacian();
    SourceSpec source = SourceSpec::constant(1.0);
    DomainConfig domain;
    NumericsConfig numerics;
    SectorConfig sector;
    double gauss_eps = 0.0;
    CheckConfig checks;
    std::string out_dir = "serrinlab-out";
    std::uint64_t seed = 0;
    /// Normalised key/value pairs as read, for the report echo.
    std::map<std::string, std::string> echo;
};

/// Parses and validates every field against the preconditions of the
/// operations the experiment will call. Throws ConfigError.
ExperimentConfig load_experiment(std::istream& in, const std::string& source);
ExperimentConfig load_experiment_file(const std::string& path);

}  // namespace serrin
