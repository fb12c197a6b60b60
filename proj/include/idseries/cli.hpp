#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace idseries {

struct RunConfig {
    std::string subcommand;
    std::optional<std::string> model_path;
    std::optional<std::string> series_path;
    std::optional<std::string> problem_path;
    double t_min = 0.1;
    double t_max = 5.0;
    std::size_t t_steps = 50;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    double c = 1000.0;
    double delta = 0.05;
    double epsilon = 0.05;
    double alpha = 1.0;
    /// "-" writes to standard output.
    std::string output_path = "-";
    unsigned threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitComputation = 2;
inline constexpr int kExitViolation = 3;

/// `args` excludes the program name. Flags override values from `file`
/// (or from `--config` when `file` is empty). Throws Error(cli, ...).
RunConfig parse_config(const std::vector<std::string>& args, const std::optional<std::string>& file = std::nullopt);

/// Evenly spaced grid of t_steps points on [t_min, t_max].
std::vector<double> config_grid(const RunConfig& config);

/// Runs one subcommand and writes its CSV to `out`. Diagnostics go to `err`
/// as `ERROR:<module>:<code> <message>`.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Same, writing to config.output_path.
int dispatch(const RunConfig& config, std::ostream& err);

/// Full command line entry point: parse, dispatch, map errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace idseries
