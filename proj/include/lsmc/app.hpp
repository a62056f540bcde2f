// Config-driven pipelines behind the `lsmc` command-line tool.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmc/basis.hpp"
#include "lsmc/dual.hpp"
#include "lsmc/lsm.hpp"
#include "lsmc/model.hpp"
#include "lsmc/regression.hpp"
#include "lsmc/simulate.hpp"

namespace lsmc::app {

// Malformed or inconsistent configuration; the CLI exits with code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    std::string name = "bermudan_put";
    double strike = 40.0;
    double start = 36.0;
    double rate = 0.06;  // annualized; per-step rate is rate * step
    double vol = 0.2;    // annualized; per-step vol is vol * sqrt(step)
    double step = 0.02;
    int n_dec = 51;
};

struct SimulationConfig {
    std::size_t n_path = 10000;
    std::size_t n_path_eval = 100;
    std::size_t n_subsim = 100;
    std::uint64_t seed = 123;
    bool antithetic = true;
};

struct BasisConfig {
    std::string btype = "power";
    std::vector<std::vector<int>> flags{{1, 1}};
    bool intercept = true;
    std::vector<std::vector<double>> knots{{30.0, 40.0, 50.0}};
    std::vector<std::string> custom{"reciprocal"};
};

struct RegressionConfig {
    std::string backend = "svd";
    std::optional<double> rcond;
    double qr_tol = kQrTolerance;
};

// Artifact paths; relative paths resolve against --out-dir.
struct OutputConfig {
    std::string panel;       // written by `simulate` (".csv" selects CSV)
    std::string fit;         // written by `value`
    std::string bounds_csv;  // written by `bounds`
};

struct InputConfig {
    std::string panel;  // training panel to reuse instead of simulating
    std::string fit;    // continuation fit to reuse in `bounds`
};

struct RunConfig {
    ModelConfig model;
    SimulationConfig simulation;
    BasisConfig basis;
    RegressionConfig regression;
    OutputConfig output;
    InputConfig input;
    double alpha = 0.01;
    std::optional<int> position;  // reported position; model default if unset
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& file);

struct Options {
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::filesystem::path out_dir = ".";
};

// Objects assembled from a config.
struct Pipeline {
    MdpModel model;
    BasisSpec basis;
    Regressor regressor;
    GbmParams gbm;
    int report_position = 0;
    std::vector<std::string> position_names;
};

Pipeline build_pipeline(const RunConfig& config);

// Independent seeds for the training, evaluation and nested panels.
std::uint64_t training_seed(std::uint64_t seed);
std::uint64_t evaluation_seed(std::uint64_t seed);
std::uint64_t nested_seed(std::uint64_t seed);

struct BoundsRun {
    Interval interval;
    BoundResult result;
    MartIncrements mart;
    PolicyTable policy;
};

// Fresh evaluation and nested panels, prescribed policy, increments, bounds.
BoundsRun run_bounds(const Pipeline& pipeline, const ContinuationFit& fit,
                     const SimulationConfig& sim, double alpha, int threads);

int cmd_value(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_bounds(const RunConfig& config, const Options& options, std::ostream& out);
int cmd_simulate(const RunConfig& config, const Options& options, std::ostream& out);

// Full command line (without the program name). Returns the exit code:
// 0 success, 1 runtime or numerical failure, 2 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsmc::app
