#include "lsmc/app.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "lsmc/bermudan.hpp"
#include "lsmc/io.hpp"
#include "lsmc/rng.hpp"

namespace lsmc::app {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown field '" + key + "' in " + where);
        }
    }
}

template <class T>
void read_field(const json& obj, const char* key, T& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
void read_count(const json& obj, const char* key, T& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ConfigError(where + "." + key + " must be a positive integer");
    }
    dst = v.get<T>();
}

void check_positive(double value, const std::string& name) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(name + " must be positive");
}

void validate(const RunConfig& c) {
    if (c.model.name != "bermudan_put") {
        throw ConfigError("unknown model '" + c.model.name + "' (available: bermudan_put)");
    }
    check_positive(c.model.start, "model.start");
    check_positive(c.model.step, "model.step");
    if (!std::isfinite(c.model.strike)) throw ConfigError("model.strike must be finite");
    if (!std::isfinite(c.model.rate)) throw ConfigError("model.rate must be finite");
    if (!(c.model.vol >= 0.0) || !std::isfinite(c.model.vol)) throw ConfigError("model.vol must be nonnegative");
    if (c.model.n_dec < 2) throw ConfigError("model.n_dec must be at least 2");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (c.basis.btype != "power" && c.basis.btype != "laguerre") {
        throw ConfigError("basis.btype must be \"power\" or \"laguerre\"");
    }
    for (const auto& name : c.basis.custom) {
        if (name != "reciprocal") throw ConfigError("unknown custom feature '" + name + "' (available: reciprocal)");
    }
    if (c.regression.backend != "svd" && c.regression.backend != "qr") {
        throw ConfigError("regression.backend must be \"svd\" or \"qr\"");
    }
    if (c.regression.rcond && !(*c.regression.rcond >= 0.0)) throw ConfigError("regression.rcond must be nonnegative");
    if (!(c.regression.qr_tol >= 0.0)) throw ConfigError("regression.qr_tol must be nonnegative");
    if (c.simulation.antithetic && c.simulation.n_path % 2 != 0) {
        throw ConfigError("simulation.n_path must be even with antithetic sampling");
    }
    if (c.simulation.antithetic && c.simulation.n_path_eval % 2 != 0) {
        throw ConfigError("simulation.n_path_eval must be even with antithetic sampling");
    }
    if (c.simulation.antithetic && c.simulation.n_subsim % 2 != 0) {
        throw ConfigError("simulation.n_subsim must be even with antithetic sampling");
    }
    if (c.simulation.n_path_eval < 2) throw ConfigError("simulation.n_path_eval must be at least 2");
    if (c.position && (*c.position < 0 || *c.position > 1)) throw ConfigError("position must be 0 or 1");
}

std::filesystem::path resolve(const Options& options, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() ? p : options.out_dir / p;
}

std::string fixed6(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

RunConfig with_seed(RunConfig config, const Options& options) {
    if (options.seed) config.simulation.seed = *options.seed;
    return config;
}

PathPanel training_panel(const RunConfig& config, const Pipeline& pipeline, const Options& options) {
    if (!config.input.panel.empty()) {
        PathPanel panel = load_panel(resolve(options, config.input.panel));
        if (panel.n_dec() != static_cast<std::size_t>(pipeline.model.n_dec) || panel.dim() != 1) {
            throw std::runtime_error("cached panel does not match the model (n_dec/dim)");
        }
        return panel;
    }
    return gbm_paths(pipeline.gbm, static_cast<std::size_t>(config.model.n_dec), config.simulation.n_path,
                     training_seed(config.simulation.seed), options.threads);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, {"model", "simulation", "basis", "regression", "output", "input", "alpha", "position"},
                   "config");

    RunConfig c;
    if (root.contains("model")) {
        const json& m = root["model"];
        reject_unknown(m, {"name", "strike", "start", "rate", "vol", "step", "n_dec"}, "model");
        read_field(m, "name", c.model.name, "model");
        read_field(m, "strike", c.model.strike, "model");
        read_field(m, "start", c.model.start, "model");
        read_field(m, "rate", c.model.rate, "model");
        read_field(m, "vol", c.model.vol, "model");
        read_field(m, "step", c.model.step, "model");
        read_count(m, "n_dec", c.model.n_dec, "model");
    }
    if (root.contains("simulation")) {
        const json& s = root["simulation"];
        reject_unknown(s, {"n_path", "n_path_eval", "n_subsim", "seed", "antithetic"}, "simulation");
        read_count(s, "n_path", c.simulation.n_path, "simulation");
        read_count(s, "n_path_eval", c.simulation.n_path_eval, "simulation");
        read_count(s, "n_subsim", c.simulation.n_subsim, "simulation");
        if (s.contains("seed") && !s["seed"].is_number_unsigned()) {
            throw ConfigError("simulation.seed must be a nonnegative integer");
        }
        read_field(s, "seed", c.simulation.seed, "simulation");
        read_field(s, "antithetic", c.simulation.antithetic, "simulation");
    }
    if (root.contains("basis")) {
        const json& b = root["basis"];
        reject_unknown(b, {"btype", "flags", "intercept", "knots", "custom"}, "basis");
        // A basis block replaces the default basis entirely.
        c.basis = BasisConfig{"power", {}, false, {}, {}};
        read_field(b, "btype", c.basis.btype, "basis");
        read_field(b, "flags", c.basis.flags, "basis");
        read_field(b, "intercept", c.basis.intercept, "basis");
        read_field(b, "knots", c.basis.knots, "basis");
        read_field(b, "custom", c.basis.custom, "basis");
    }
    if (root.contains("regression")) {
        const json& r = root["regression"];
        reject_unknown(r, {"backend", "rcond", "qr_tol"}, "regression");
        read_field(r, "backend", c.regression.backend, "regression");
        if (r.contains("rcond") && !r["rcond"].is_null()) {
            double rcond = 0.0;
            read_field(r, "rcond", rcond, "regression");
            c.regression.rcond = rcond;
        }
        read_field(r, "qr_tol", c.regression.qr_tol, "regression");
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, {"panel", "fit", "bounds_csv"}, "output");
        read_field(o, "panel", c.output.panel, "output");
        read_field(o, "fit", c.output.fit, "output");
        read_field(o, "bounds_csv", c.output.bounds_csv, "output");
    }
    if (root.contains("input")) {
        const json& in = root["input"];
        reject_unknown(in, {"panel", "fit"}, "input");
        read_field(in, "panel", c.input.panel, "input");
        read_field(in, "fit", c.input.fit, "input");
    }
    read_field(root, "alpha", c.alpha, "config");
    if (root.contains("position")) {
        int position = 0;
        read_field(root, "position", position, "config");
        c.position = position;
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot read config file " + file.string());
    std::ostringstream text;
    text << is.rdbuf();
    return parse_config(text.str());
}

std::uint64_t training_seed(std::uint64_t seed) { return derive_seed(seed, 0); }
std::uint64_t evaluation_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
std::uint64_t nested_seed(std::uint64_t seed) { return derive_seed(seed, 2); }

Pipeline build_pipeline(const RunConfig& config) {
    validate(config);
    Pipeline p;
    const double kappa = config.model.rate * config.model.step;
    p.model = bermudan::put_model({config.model.strike, kappa, config.model.n_dec});
    p.gbm = {config.model.start, kappa, config.model.vol * std::sqrt(config.model.step),
             config.simulation.antithetic};
    p.report_position = config.position.value_or(bermudan::kUnexercised);
    p.position_names = {"exercised", "unexercised"};

    p.basis.flags = config.basis.flags;
    p.basis.btype = config.basis.btype == "laguerre" ? BasisType::Laguerre : BasisType::Power;
    p.basis.intercept = config.basis.intercept;
    p.basis.knots = config.basis.knots;
    if (!config.basis.custom.empty()) {
        // Only "reciprocal" is registered; validate() rejects anything else.
        const auto n = static_cast<Eigen::Index>(config.basis.custom.size());
        p.basis.n_custom = static_cast<int>(n);
        p.basis.custom = [n](const Eigen::MatrixXd& states) -> Eigen::MatrixXd {
            Eigen::MatrixXd out(states.rows(), n);
            for (Eigen::Index c = 0; c < n; ++c) out.col(c) = states.col(0).cwiseInverse();
            return out;
        };
        for (Eigen::Index c = 0; c < n; ++c) p.basis.custom_labels.emplace_back("1/z0");
    }
    try {
        validate_basis(p.basis, 1);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("basis: ") + e.what());
    }
    p.regressor = config.regression.backend == "qr" ? Regressor::qr(config.regression.qr_tol)
                                                    : Regressor::svd(config.regression.rcond);
    return p;
}

BoundsRun run_bounds(const Pipeline& pipeline, const ContinuationFit& fit, const SimulationConfig& sim,
                     double alpha, int threads) {
    const PathPanel eval = gbm_paths(pipeline.gbm, static_cast<std::size_t>(pipeline.model.n_dec),
                                     sim.n_path_eval, evaluation_seed(sim.seed), threads);
    const SubsimPanel nested = nested_gbm(eval, pipeline.gbm, sim.n_subsim, nested_seed(sim.seed), threads);
    BoundsRun run;
    run.policy = path_policy(eval, fit, pipeline.model, pipeline.basis, threads);
    run.mart = additive_duals(eval, nested, fit, pipeline.model, pipeline.basis, threads);
    run.result = bounds(eval, pipeline.model, run.mart, run.policy, threads);
    run.interval = confidence_interval(run.result, alpha, pipeline.report_position);
    return run;
}

int cmd_value(const RunConfig& base, const Options& options, std::ostream& out) {
    const RunConfig config = with_seed(base, options);
    const Pipeline pipeline = build_pipeline(config);
    const PathPanel panel = training_panel(config, pipeline, options);
    const LsmResult lsm = run_lsm(panel, pipeline.model, pipeline.basis, pipeline.regressor, options.threads);

    out << "model " << config.model.name << ", " << panel.n_path() << " paths, " << config.model.n_dec
        << " epochs, " << basis_dimension(pipeline.basis) << " basis columns, " << config.regression.backend
        << " regression\n";
    for (int p = 0; p < pipeline.model.n_pos; ++p) {
        out << "value[" << p << "] " << pipeline.position_names[static_cast<std::size_t>(p)] << ' '
            << fixed6(lsm.value_estimate(p)) << " se " << fixed6(lsm.std_error(p)) << '\n';
    }
    if (!config.output.fit.empty()) {
        const auto file = resolve(options, config.output.fit);
        save_fit(lsm.fit, file);
        out << "fit written to " << file.string() << '\n';
    }
    return 0;
}

int cmd_bounds(const RunConfig& base, const Options& options, std::ostream& out) {
    const RunConfig config = with_seed(base, options);
    const Pipeline pipeline = build_pipeline(config);

    ContinuationFit fit;
    if (!config.input.fit.empty()) {
        const auto file = resolve(options, config.input.fit);
        if (!std::filesystem::exists(file)) throw std::runtime_error("fit artifact not found: " + file.string());
        fit = load_fit(file);
        check_fit(fit, pipeline.model, pipeline.basis);
    } else {
        const PathPanel panel = training_panel(config, pipeline, options);
        fit = run_lsm(panel, pipeline.model, pipeline.basis, pipeline.regressor, options.threads).fit;
    }

    const BoundsRun run = run_bounds(pipeline, fit, config.simulation, config.alpha, options.threads);
    const int p = pipeline.report_position;
    out << "bounds for position " << p << " (" << pipeline.position_names[static_cast<std::size_t>(p)] << "), "
        << config.simulation.n_path_eval << " paths, " << config.simulation.n_subsim << " nested\n";
    out << "lower " << fixed6(run.result.mean_lower(p)) << " se " << fixed6(run.result.se_lower(p)) << '\n';
    out << "upper " << fixed6(run.result.mean_upper(p)) << " se " << fixed6(run.result.se_upper(p)) << '\n';
    out << "ci alpha=" << config.alpha << '\n';
    out << fixed6(run.interval.lower) << ' ' << fixed6(run.interval.upper) << '\n';

    if (!config.output.bounds_csv.empty()) {
        const auto file = resolve(options, config.output.bounds_csv);
        std::ofstream os(file);
        if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
        write_bounds_csv(run.result, os);
    }
    return 0;
}

int cmd_simulate(const RunConfig& base, const Options& options, std::ostream& out) {
    const RunConfig config = with_seed(base, options);
    const Pipeline pipeline = build_pipeline(config);
    const PathPanel panel = gbm_paths(pipeline.gbm, static_cast<std::size_t>(config.model.n_dec),
                                      config.simulation.n_path, training_seed(config.simulation.seed),
                                      options.threads);
    const auto file = resolve(options, config.output.panel.empty() ? "panel.bin" : config.output.panel);
    save_panel(panel, file);
    out << "panel " << panel.n_path() << " x " << panel.dim() << " x " << panel.n_dec() << " written to "
        << file.string() << '\n';
    return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Least squares Monte Carlo valuation with duality bounds"};
    cli.require_subcommand(1);

    std::string config_file;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out_dir = ".";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_file, "JSON run configuration")->required();
        sub->add_option("--seed", seed, "Override simulation.seed");
        sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", out_dir, "Directory for artifacts and relative paths");
    };
    CLI::App* value = cli.add_subcommand("value", "Run LSM and print the time-0 value estimate");
    CLI::App* bound = cli.add_subcommand("bounds", "Estimate duality bounds and a confidence interval");
    CLI::App* simulate = cli.add_subcommand("simulate", "Simulate and save the training panel");
    add_common(value);
    add_common(bound);
    add_common(simulate);

    std::vector<std::string> argv_storage{"lsmc"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        cli.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        const RunConfig config = load_config(config_file);
        Options options{seed, threads, out_dir};
        std::filesystem::create_directories(options.out_dir);
        if (value->parsed()) return cmd_value(config, options, out);
        if (bound->parsed()) return cmd_bounds(config, options, out);
        return cmd_simulate(config, options, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace lsmc::app
