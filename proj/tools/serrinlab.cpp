#include "serrin/errors.hpp"
#include "serrin/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// --threads wins; otherwise SERRINLAB_THREADS; otherwise 1.
int resolve_threads(const CLI::Option* flag, int value) {
    if (flag->count() > 0) return value;
    const char* env = std::getenv("SERRINLAB_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    std::size_t used = 0;
    const int n = std::stoi(env, &used);
    if (used != std::string(env).size() || n < 1) throw std::invalid_argument("SERRINLAB_THREADS must be a positive integer");
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serrinlab: run a configured experiment and write its reports"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("config", config_path, "experiment configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomised checks (overrides seed)");
    auto* threads_opt =
        app.add_option("--threads", threads, "worker threads (default: SERRINLAB_THREADS or 1)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    serrin::RunOptions options;
    try {
        if (out_opt->count() > 0) options.out_dir = out_dir;
        if (seed_opt->count() > 0) options.seed = seed;
        options.threads = resolve_threads(threads_opt, threads);
    } catch (const std::exception& e) {
        std::cerr << "serrinlab: " << e.what() << '\n';
        return kExitUsage;
    }

    serrin::ExperimentConfig config;
    try {
        config = serrin::load_experiment_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "serrinlab: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const serrin::RunReport report = serrin::run_experiment(config, options);
        for (const auto& c : report.checks) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " limit=" << c.limit
                      << '\n';
        }
        std::cout << "reports in " << report.out_dir << '\n';
        return report.all_passed() ? kExitPass : kExitCheckFailure;
    } catch (const serrin::NumericalError& e) {
        std::cerr << "serrinlab: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const serrin::GeometryError& e) {
        std::cerr << "serrinlab: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "serrinlab: invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "serrinlab: " << e.what() << '\n';
        return kExitNumerical;
    }
}
