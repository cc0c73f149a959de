#include "serrin/config.hpp"

#include "serrin/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace serrin {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_factor(const std::string& tok) {
    if (tok == "pi") return std::numbers::pi;
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw std::invalid_argument("not a number: '" + tok + "'");
    }
    return v;
}

int parse_int(const std::string& text) {
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["experiment"] = [](ExperimentConfig& c, const std::string& v) {
            static const std::map<std::string, ExperimentKind> kinds{
                {"solve", ExperimentKind::solve},
                {"sector-beta", ExperimentKind::sector_beta},
                {"beta-limit", ExperimentKind::beta_limit},
                {"moving-planes", ExperimentKind::moving_planes},
                {"boundary-check", ExperimentKind::boundary_check},
                {"gauss-map", ExperimentKind::gauss_map},
                {"verify-all", ExperimentKind::verify_all},
            };
            const auto it = kinds.find(v);
            if (it == kinds.end()) throw std::invalid_argument("unknown experiment '" + v + "'");
            c.kind = it->second;
        };
        t["seed"] = [](ExperimentConfig& c, const std::string& v) {
            std::uint64_t s = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
            if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
                throw std::invalid_argument("seed must be a nonnegative integer");
            }
            c.seed = s;
        };
        t["output.dir"] = [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; };

        t["operator.variant"] = [](ExperimentConfig& c, const std::string& v) {
            if (v == "minus") c.op.variant = PucciVariant::minus;
            else if (v == "plus") c.op.variant = PucciVariant::plus;
            else throw std::invalid_argument("operator.variant must be minus or plus");
        };
        t["operator.lambda"] = [](ExperimentConfig& c, const std::string& v) { c.op.lambda = parse_real(v); };
        t["operator.Lambda"] = [](ExperimentConfig& c, const std::string& v) { c.op.Lambda = parse_real(v); };
        t["operator.k"] = [](ExperimentConfig& c, const std::string& v) { c.op.k = parse_real(v); };
        t["operator.grad_sign"] = [](ExperimentConfig& c, const std::string& v) { c.op.grad_sign = parse_int(v); };

        t["source.c"] = [](ExperimentConfig& c, const std::string& v) { c.source = SourceSpec::constant(parse_real(v)); };
        t["source.a"] = [](ExperimentConfig& c, const std::string& v) { c.source.a = parse_real(v); };
        t["source.b"] = [](ExperimentConfig& c, const std::string& v) { c.source.b = parse_real(v); };

        t["domain.shape"] = [](ExperimentConfig& c, const std::string& v) {
            if (v != "disk" && v != "ellipse" && v != "egg" && v != "stadium") {
                throw std::invalid_argument("domain.shape must be disk, ellipse, egg or stadium");
            }
            c.domain.shape = v;
        };
        t["domain.R"] = [](ExperimentConfig& c, const std::string& v) { c.domain.R = parse_real(v); };
        t["domain.a"] = [](ExperimentConfig& c, const std::string& v) { c.domain.a = parse_real(v); };
        t["domain.b"] = [](ExperimentConfig& c, const std::string& v) { c.domain.b = parse_real(v); };
        t["domain.amplitude"] = [](ExperimentConfig& c, const std::string& v) { c.domain.amplitude = parse_real(v); };
        t["domain.half_flat"] = [](ExperimentConfig& c, const std::string& v) { c.domain.half_flat = parse_real(v); };
        t["domain.radius"] = [](ExperimentConfig& c, const std::string& v) { c.domain.radius = parse_real(v); };

        t["numerics.h"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.h = parse_real(v); };
        t["numerics.K"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.K = parse_int(v); };
        t["numerics.tol"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.tol = parse_real(v); };
        t["numerics.dt"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.dt = parse_real(v); };
        t["numerics.max_iter"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.max_iter = parse_int(v); };
        t["numerics.method"] = [](ExperimentConfig& c, const std::string& v) {
            if (v != "policy" && v != "explicit") throw std::invalid_argument("numerics.method must be policy or explicit");
            c.numerics.method = v;
        };
        t["numerics.samples"] = [](ExperimentConfig& c, const std::string& v) { c.numerics.samples = parse_int(v); };
        t["numerics.directions"] = [](ExperimentConfig& c, const std::string& v) {
            c.numerics.directions = parse_int(v);
        };
        t["numerics.ds_fraction"] = [](ExperimentConfig& c, const std::string& v) {
            c.numerics.ds_fraction = parse_real(v);
        };

        t["sector.theta"] = [](ExperimentConfig& c, const std::string& v) {
            c.sector.theta.clear();
            for (const auto& item : split_list(v)) c.sector.theta.push_back(parse_real(item));
        };
        t["sector.m_list"] = [](ExperimentConfig& c, const std::string& v) {
            c.sector.m_list.clear();
            for (const auto& item : split_list(v)) c.sector.m_list.push_back(parse_int(item));
        };
        t["sector.decay_fit"] = [](ExperimentConfig& c, const std::string& v) { c.sector.decay_fit = parse_bool(v); };
        t["sector.decay_h"] = [](ExperimentConfig& c, const std::string& v) { c.sector.decay_h = parse_real(v); };
        t["sector.r_in"] = [](ExperimentConfig& c, const std::string& v) { c.sector.r_in = parse_real(v); };

        t["gauss.eps"] = [](ExperimentConfig& c, const std::string& v) { c.gauss_eps = parse_real(v); };

        t["check.max_error"] = [](ExperimentConfig& c, const std::string& v) { c.checks.max_error = parse_real(v); };
        t["check.c0_rel"] = [](ExperimentConfig& c, const std::string& v) { c.checks.c0_rel = parse_real(v); };
        t["check.defect_max"] = [](ExperimentConfig& c, const std::string& v) { c.checks.defect_max = parse_real(v); };
        t["check.defect_min"] = [](ExperimentConfig& c, const std::string& v) { c.checks.defect_min = parse_real(v); };
        t["check.beta_expected"] = [](ExperimentConfig& c, const std::string& v) {
            c.checks.beta_expected.clear();
            for (const auto& item : split_list(v)) c.checks.beta_expected.push_back(parse_real(item));
        };
        t["check.beta_tol"] = [](ExperimentConfig& c, const std::string& v) { c.checks.beta_tol = parse_real(v); };
        t["check.decay_tol"] = [](ExperimentConfig& c, const std::string& v) { c.checks.decay_tol = parse_real(v); };
        t["check.limit_tol"] = [](ExperimentConfig& c, const std::string& v) { c.checks.limit_tol = parse_real(v); };
        t["check.verdict"] = [](ExperimentConfig& c, const std::string& v) {
            if (v != "ball" && v != "not-ball" && v != "insufficient-coverage") {
                throw std::invalid_argument("check.verdict must be ball, not-ball or insufficient-coverage");
            }
            c.checks.verdict = v;
        };
        t["check.measure"] = [](ExperimentConfig& c, const std::string& v) { c.checks.measure = parse_real(v); };
        t["check.measure_tol"] = [](ExperimentConfig& c, const std::string& v) { c.checks.measure_tol = parse_real(v); };
        t["check.curvature"] = [](ExperimentConfig& c, const std::string& v) { c.checks.curvature = parse_bool(v); };
        t["check.mixed"] = [](ExperimentConfig& c, const std::string& v) { c.checks.mixed = parse_bool(v); };
        t["check.u_nn"] = [](ExperimentConfig& c, const std::string& v) { c.checks.u_nn = parse_bool(v); };
        return t;
    }();
    return table;
}

void require(bool ok, const std::string& source, int line, const std::string& message) {
    if (!ok) throw ConfigError(source, line, message);
}

int line_of(const std::map<std::string, ConfigEntry>& entries, const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
}

void validate_config(const ExperimentConfig& c, const std::map<std::string, ConfigEntry>& e, const std::string& src) {
    try {
        validate(c.op);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(src, line_of(e, "operator.lambda"), ex.what());
    }
    const auto& n = c.numerics;
    require(n.h > 0.0, src, line_of(e, "numerics.h"), "numerics.h must be positive");
    try {
        (void)Stencil(n.K);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(src, line_of(e, "numerics.K"), ex.what());
    }
    require(n.tol > 0.0, src, line_of(e, "numerics.tol"), "numerics.tol must be positive");
    require(n.dt >= 0.0, src, line_of(e, "numerics.dt"), "numerics.dt must be nonnegative (0 selects the bound)");
    require(n.max_iter >= 0, src, line_of(e, "numerics.max_iter"), "numerics.max_iter must be nonnegative");
    require(n.samples >= 16, src, line_of(e, "numerics.samples"), "numerics.samples must be at least 16");
    require(n.directions >= 1, src, line_of(e, "numerics.directions"), "numerics.directions must be at least 1");
    require(n.ds_fraction > 0.0 && n.ds_fraction <= 1e-3, src, line_of(e, "numerics.ds_fraction"),
            "numerics.ds_fraction must lie in (0, 1e-3]");

    const auto& d = c.domain;
    const int dl = line_of(e, "domain.shape");
    if (d.shape == "disk") require(d.R > 0.0, src, line_of(e, "domain.R"), "domain.R must be positive");
    if (d.shape == "ellipse") require(d.a > 0.0 && d.b > 0.0, src, dl, "ellipse semi-axes must be positive");
    if (d.shape == "egg") require(std::abs(d.amplitude) < 1.0, src, line_of(e, "domain.amplitude"),
                                  "domain.amplitude must lie in (-1, 1)");
    if (d.shape == "stadium") require(d.half_flat > 0.0 && d.radius > 0.0, src, dl,
                                      "stadium dimensions must be positive");

    for (double th : c.sector.theta) {
        require(th > 0.0 && th < 2.0 * std::numbers::pi, src, line_of(e, "sector.theta"),
                "sector.theta values must lie in (0, 2 pi)");
        if (c.sector.decay_fit) {
            require(th <= std::numbers::pi, src, line_of(e, "sector.theta"), "decay fits need theta <= pi");
        }
    }
    for (int m : c.sector.m_list) require(m >= 1, src, line_of(e, "sector.m_list"), "sector.m_list entries must be >= 1");
    require(c.sector.decay_h > 0.0, src, line_of(e, "sector.decay_h"), "sector.decay_h must be positive");
    require(c.sector.r_in > 0.0 && c.sector.r_in < 0.4, src, line_of(e, "sector.r_in"),
            "sector.r_in must lie in (0, 0.4)");
    require(c.gauss_eps >= 0.0, src, line_of(e, "gauss.eps"), "gauss.eps must be nonnegative");

    const bool cone = c.kind == ExperimentKind::sector_beta || c.kind == ExperimentKind::beta_limit;
    if (cone) require(c.op.k == 0.0, src, line_of(e, "operator.k"), "cone experiments need operator.k = 0");
    if (c.kind == ExperimentKind::sector_beta) {
        require(!c.sector.theta.empty(), src, 0, "sector-beta needs sector.theta");
        require(c.checks.beta_expected.empty() || c.checks.beta_expected.size() == c.sector.theta.size(), src,
                line_of(e, "check.beta_expected"), "check.beta_expected must list one value per sector.theta");
    }
    if (c.kind == ExperimentKind::beta_limit) {
        require(c.sector.theta.size() <= 1, src, line_of(e, "sector.theta"), "beta-limit takes a single sector.theta");
        require(!c.sector.m_list.empty(), src, line_of(e, "sector.m_list"), "beta-limit needs sector.m_list");
    }
    if (c.checks.max_error || c.checks.c0_rel) {
        require(d.shape == "disk", src, line_of(e, c.checks.max_error ? "check.max_error" : "check.c0_rel"),
                "oracle checks need a disk (radial oracle)");
    }
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

double parse_real(const std::string& text) {
    const std::string s = trim(text);
    double value = 1.0;
    char op = '*';
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find_first_of("*/", pos);
        const double f = parse_factor(trim(s.substr(pos, next - pos)));
        if (op == '*') value *= f;
        else value /= f;
        if (next == std::string::npos) break;
        op = s[next];
        pos = next + 1;
    }
    if (!std::isfinite(value)) throw std::invalid_argument("not a finite number: '" + text + "'");
    return value;
}

std::map<std::string, ConfigEntry> parse_config_text(std::istream& in, const std::string& source) {
    std::map<std::string, ConfigEntry> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line, "empty key");
        if (value.empty()) throw ConfigError(source, line, "empty value for '" + key + "'");
        if (out.contains(key)) throw ConfigError(source, line, "duplicate key '" + key + "'");
        out[key] = {value, line};
    }
    return out;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::sector_beta: return "sector-beta";
        case ExperimentKind::beta_limit: return "beta-limit";
        case ExperimentKind::moving_planes: return "moving-planes";
        case ExperimentKind::boundary_check: return "boundary-check";
        case ExperimentKind::gauss_map: return "gauss-map";
        case ExperimentKind::verify_all: return "verify-all";
    }
    return "unknown";
}

DomainCurve DomainConfig::make() const {
    if (shape == "ellipse") return DomainCurve::ellipse(a, b);
    if (shape == "egg") return DomainCurve::egg(amplitude);
    if (shape == "stadium") return DomainCurve::stadium(half_flat, radius);
    return DomainCurve::circle(R);
}

ExperimentConfig load_experiment(std::istream& in, const std::string& source) {
    const auto entries = parse_config_text(in, source);
    if (!entries.contains("experiment")) throw ConfigError(source, 0, "missing required key 'experiment'");
    if (entries.contains("source.c") && (entries.contains("source.a") || entries.contains("source.b"))) {
        throw ConfigError(source, entries.at("source.c").line, "source.c excludes source.a and source.b");
    }
    ExperimentConfig cfg;
    const auto& table = setters();
    for (const auto& [key, entry] : entries) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(source, entry.line, "unknown key '" + key + "'");
        try {
            it->second(cfg, entry.value);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(source, entry.line, key + ": " + ex.what());
        }
        cfg.echo[key] = entry.value;
    }
    if (cfg.kind == ExperimentKind::sector_beta || cfg.kind == ExperimentKind::beta_limit) {
        if (cfg.sector.theta.empty()) cfg.sector.theta.push_back(std::numbers::pi / 2);
    }
    validate_config(cfg, entries, source);
    return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open configuration file");
    return load_experiment(in, path);
}

}  // namespace serrin
