#include "idseries/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "idseries/error.hpp"
#include "idseries/io.hpp"
#include "idseries/monte_carlo.hpp"
#include "idseries/optimization.hpp"
#include "idseries/scalar_bounds.hpp"
#include "idseries/tail_bounds.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

const std::vector<std::string> kSubcommands = {"curves",     "bounds", "simulate", "expectation",
                                               "nemirovski", "chance", "qopt"};

// Every settable key; flags use `--key`, config files `key = value` with
// '-' or '_' as separator.
const std::vector<std::string> kKeys = {"subcommand", "model", "series",  "problem", "t-min",
                                        "t-max",      "t-steps", "trials", "seed",   "c",
                                        "delta",      "epsilon", "alpha",  "output", "threads"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::missing_input, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::parse, path + ":" + std::to_string(n) + ": expected `key = value`");
        const std::string raw = trim(line.substr(0, eq));
        std::string key = raw;
        std::replace(key.begin(), key.end(), '_', '-');
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            fail(ErrorCode::parse, path + ":" + std::to_string(n) + ": unknown key '" + raw + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

double to_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        fail(ErrorCode::parse, "malformed value for " + key + ": '" + text + "'");
    return v;
}

std::uint64_t to_count(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!text.empty() && text[0] != '-') v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) fail(ErrorCode::parse, "malformed value for " + key + ": '" + text + "'");
    return v;
}

void require(bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::invalid_argument, msg);
}

class Csv {
public:
    explicit Csv(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<const char*> cols) {
        bool first = true;
        for (const char* c : cols) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_real(v);
            first = false;
        }
        out_ << '\n';
    }

    void kv(const std::string& key, double value) { out_ << key << ',' << format_real(value) << '\n'; }
    void kv(const std::string& key, std::size_t value) { out_ << key << ',' << value << '\n'; }
    void flag(const std::string& key, bool value) { out_ << key << ',' << (value ? 1 : 0) << '\n'; }

private:
    std::ostream& out_;
};

double clip(double x) { return std::min(x, 1.0); }
double nan() { return std::numeric_limits<double>::quiet_NaN(); }

MatrixSeries load_series(const RunConfig& cfg) { return MatrixSeries(read_symmetric_series(*cfg.series_path)); }

void run_curves(const RunConfig& cfg, std::ostream& out) {
    const PartitionBound h = PartitionBound::two_piece(cfg.c);
    std::vector<double> grid = config_grid(cfg);
    for (const Crossing& x : bh_crossings(cfg.c))
        if (x.s_star >= cfg.t_min && x.s_star <= cfg.t_max) grid.push_back(x.s_star);
    std::sort(grid.begin(), grid.end());
    Csv csv(out);
    csv.header({"s", "Q", "B", "T", "H"});
    for (double s : grid) csv.row({s, curve_q(s), curve_b(s), curve_t(s), s <= cfg.c ? h(s) : nan()});
}

void run_bounds(const RunConfig& cfg, std::ostream& out) {
    const IdModel model = read_model(*cfg.model_path);
    const MatrixSeries series = load_series(cfg);
    Csv csv(out);
    csv.header({"t", "exact", "bennett", "bernstein_smooth", "bernstein_piecewise", "hc", "beta0"});
    for (double t : config_grid(cfg)) {
        const BoundReport r = bound_report(model, series, t, cfg.c);
        csv.row({t, clip(r.exact), clip(r.bennett), clip(r.bernstein_smooth), clip(r.bernstein_piecewise),
                 r.hc ? clip(*r.hc) : nan(), clip(r.beta0)});
    }
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const IdModel model = read_model(*cfg.model_path);
    const MatrixSeries series = load_series(cfg);
    const std::vector<double> grid = config_grid(cfg);
    const CompareReport report = compare_report(model, series, grid, cfg.trials, cfg.seed, cfg.c, cfg.threads);
    Csv csv(out);
    csv.header({"t", "p_hat", "ci_low", "ci_high", "exact", "bennett", "bernstein_smooth", "bernstein_piecewise",
                "hc", "beta0"});
    for (const CompareRow& row : report.rows) {
        const BoundReport& b = row.bounds;
        csv.row({b.t, row.empirical.p_hat, row.empirical.ci_low, row.empirical.ci_high, clip(b.exact),
                 clip(b.bennett), clip(b.bernstein_smooth), clip(b.bernstein_piecewise), b.hc ? clip(*b.hc) : nan(),
                 clip(b.beta0)});
    }
    if (report.violation_count() > 0) {
        try {
            require_no_violations(report);
        } catch (const Error& e) {
            err << "ERROR:" << e.module() << ':' << to_string(e.code()) << ' ' << e.what() << '\n';
        }
        return kExitViolation;
    }
    return kExitOk;
}

void run_expectation(const RunConfig& cfg, std::ostream& out) {
    const IdModel model = read_model(*cfg.model_path);
    const MatrixSeries series = load_series(cfg);
    const ExpectationEstimate est = empirical_expectation(model, series, cfg.trials, cfg.seed, cfg.threads);
    const bool jumps = model.support_radius() > 0.0;
    Csv csv(out);
    csv.header({"mean", "std_err", "bound_statement", "bound_proof", "delta", "quantile_bernstein", "quantile_hc"});
    csv.row({est.mean, est.std_err, expectation_bound(model, series, ExpectationVariant::statement),
             expectation_bound(model, series, ExpectationVariant::proof), cfg.delta,
             jumps ? lambda_max_quantile(model, series, cfg.delta, QuantileForm::bernstein, cfg.c) : nan(),
             jumps ? lambda_max_quantile(model, series, cfg.delta, QuantileForm::hc, cfg.c) : nan()});
}

void run_nemirovski(const RunConfig& cfg, std::ostream& out) {
    const IdModel model = read_model(*cfg.model_path).normalized();
    const std::vector<Matrix> terms = read_matrices(*cfg.series_path);
    const std::size_t M = terms.front().rows();
    const std::size_t N = terms.front().cols();
    for (const Matrix& a : terms)
        if (a.rows() != M || a.cols() != N) fail(ErrorCode::parse, "all series terms must share one shape");
    const double rho1 = rect_series_rho1(terms);
    const NemirovskiParams p = nemirovski_params(cfg.alpha, M, N, rho1, model);

    std::vector<SymMatrix> dil;
    dil.reserve(terms.size());
    for (const Matrix& a : terms) dil.push_back(dilation(a));
    const MatrixSeries series(std::move(dil));
    const double grid[] = {p.t_star};
    const TailEstimate est = empirical_tail(model, series, grid, cfg.trials, cfg.seed, cfg.threads).front();

    Csv csv(out);
    csv.header({"key", "value"});
    csv.kv("alpha", cfg.alpha);
    csv.kv("M", M);
    csv.kv("N", N);
    csv.kv("K", terms.size());
    csv.kv("rho1", rho1);
    csv.kv("c_alpha", p.c_alpha);
    csv.kv("tau_alpha", p.tau_alpha);
    csv.kv("t_star", p.t_star);
    csv.flag("condition_ok", p.condition_ok);
    csv.kv("scaled_t_star", p.scaled_t_star);
    csv.kv("tail_at_t_star", p.tail_at_t_star);
    csv.kv("target", std::pow(static_cast<double>(M + N), -cfg.alpha));
    csv.kv("trials", est.trials);
    csv.kv("p_hat", est.p_hat);
    csv.kv("ci_low", est.ci_low);
    csv.kv("ci_high", est.ci_high);
}

void run_chance(const RunConfig& cfg, std::ostream& out) {
    const IdModel model = read_model(*cfg.model_path);
    const ChanceProblem problem = read_chance_problem(*cfg.problem_path);
    const ChanceGamma g = chance_gamma(cfg.epsilon, problem.dim(), problem.rho2(), model, cfg.c);
    const SymMatrix lmi = assemble_lmi(std::sqrt(g.gamma2), problem);
    const double scale = std::max(1.0, lmi.matrix().max_abs());
    const bool lmi_psd = lambda_min(lmi) >= -1e-10 * scale;
    const TailEstimate est = empirical_chance(problem, model, cfg.trials, cfg.seed, cfg.threads);

    Csv csv(out);
    csv.header({"key", "value"});
    csv.kv("epsilon", cfg.epsilon);
    csv.kv("c", cfg.c);
    csv.kv("M", problem.dim());
    csv.kv("K", problem.size());
    csv.kv("rho2", problem.rho2());
    csv.kv("tau_c", g.tau_c);
    csv.kv("gamma2", g.gamma2);
    csv.kv("precondition_lhs", g.precondition_lhs);
    csv.flag("precondition_ok", g.precondition_ok);
    csv.flag("lmi_psd", lmi_psd);
    csv.kv("trials", est.trials);
    csv.kv("p_hat", est.p_hat);
    csv.kv("ci_low", est.ci_low);
    csv.kv("ci_high", est.ci_high);
}

int run_qopt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const IdModel model = read_model(*cfg.model_path).normalized();
    const QuadProblem problem = read_quad_problem(*cfg.problem_path);
    if (cfg.trials < 1000) fail(ErrorCode::invalid_argument, "qopt needs at least 1000 trials");
    const SdpResult sdp = solve_sdp(problem);
    const RoundingPlan plan = build_rounding(sdp.y_hat, problem.objective(), problem.rows(), problem.cols(),
                                             problem.inequality_terms());
    const FeasibilityBounds fb = feasibility_bounds(plan, model);
    const std::size_t ineq = problem.inequality_terms().size();

    struct Draw {
        double objective = 0.0;
        bool norm_ok = false;
        bool joint_ok = false;
        bool scaled_ok = false;
    };
    std::vector<Draw> draws(cfg.trials);
    for_each_trial(cfg.trials, cfg.threads, [&](std::size_t i) {
        const Matrix x = sample_rounding(plan, model, mix_seed(cfg.seed, i));
        const double norm = spectral_norm(x);
        Draw d;
        d.objective = quadratic_value(x, problem.objective());
        d.norm_ok = norm <= fb.norm_bound;
        d.joint_ok = d.norm_ok;
        d.scaled_ok = fb.scale > 0.0 ? norm / fb.scale <= 1.0 : norm == 0.0;
        for (std::size_t k = 0; k < ineq; ++k) {
            const double q = quadratic_value(x, problem.inequality_terms()[k]);
            d.joint_ok = d.joint_ok && q <= fb.quad_bounds[k];
            d.scaled_ok = d.scaled_ok && (fb.scale > 0.0 ? q / (fb.scale * fb.scale) <= 1.0 : q <= 1.0);
        }
        draws[i] = d;
    });
    double sum = 0.0, sum_sq = 0.0;
    std::size_t norm_ok = 0, joint_ok = 0, scaled_ok = 0;
    for (const Draw& d : draws) {
        sum += d.objective;
        sum_sq += d.objective * d.objective;
        norm_ok += d.norm_ok;
        joint_ok += d.joint_ok;
        scaled_ok += d.scaled_ok;
    }
    const double n = static_cast<double>(cfg.trials);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    const Interval joint_ci = clopper_pearson(joint_ok, cfg.trials);

    Csv csv(out);
    csv.header({"key", "value"});
    csv.kv("M", problem.rows());
    csv.kv("N", problem.cols());
    csv.kv("iterations", sdp.iterations);
    csv.flag("converged", sdp.converged);
    csv.kv("max_residual", sdp.residuals.max_primal());
    csv.kv("theta_hat", sdp.theta_hat);
    csv.kv("rho3", plan.rho3);
    for (std::size_t k = 0; k < ineq; ++k) csv.kv("rho4_" + std::to_string(k + 1), plan.rho4[k]);
    csv.kv("c2", fb.c2);
    csv.kv("tau2", fb.tau2);
    csv.kv("norm_bound", fb.norm_bound);
    for (std::size_t k = 0; k < ineq; ++k) csv.kv("quad_bound_" + std::to_string(k + 1), fb.quad_bounds[k]);
    csv.kv("scale", fb.scale);
    csv.kv("trials", cfg.trials);
    csv.kv("mean_objective", mean);
    csv.kv("objective_std_err", std::sqrt(var / n));
    csv.kv("frac_norm_ok", static_cast<double>(norm_ok) / n);
    csv.kv("frac_joint_ok", static_cast<double>(joint_ok) / n);
    csv.kv("joint_ci_low", joint_ci.low);
    csv.kv("joint_ci_high", joint_ci.high);
    csv.kv("frac_scaled_feasible", static_cast<double>(scaled_ok) / n);
    if (!sdp.converged) {
        err << "ERROR:opt_apps:not_converged SDP stopped after " << sdp.iterations
            << " iterations with residual " << format_real(sdp.residuals.max_primal()) << '\n';
        return kExitComputation;
    }
    return kExitOk;
}

int exit_code_for(const Error& e) {
    if (e.code() == ErrorCode::bound_violation) return kExitViolation;
    if (e.module() == kModule) return kExitUsage;
    return kExitComputation;
}

void report(const Error& e, std::ostream& err) {
    err << "ERROR:" << e.module() << ':' << to_string(e.code()) << ' ' << e.what() << '\n';
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args, const std::optional<std::string>& file) {
    CLI::App app{"Tail bounds, simulation and optimization for matrix infinitely divisible series", "idseries"};
    app.allow_extras(false);
    std::map<std::string, std::string> flags;
    std::string config_path;
    app.add_option("subcommand", flags["subcommand"], "one of curves, bounds, simulate, expectation, nemirovski, "
                                                      "chance, qopt");
    for (std::size_t i = 1; i < kKeys.size(); ++i) app.add_option("--" + kKeys[i], flags[kKeys[i]]);
    app.add_option("--config", config_path, "flat `key = value` file; flags take precedence");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        fail(ErrorCode::parse, e.what());
    }

    std::map<std::string, std::string> values;
    const std::optional<std::string> path = file ? file : (config_path.empty() ? std::nullopt : std::optional(config_path));
    if (path) values = read_config_file(*path);
    for (const std::string& key : kKeys) {
        const bool given = key == "subcommand" ? app.get_option("subcommand")->count() > 0
                                               : app.get_option("--" + key)->count() > 0;
        if (given) values[key] = flags[key];
    }

    RunConfig cfg;
    if (!values.count("subcommand")) fail(ErrorCode::missing_input, "no subcommand given");
    cfg.subcommand = values["subcommand"];
    if (std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand) == kSubcommands.end())
        fail(ErrorCode::parse, "unknown subcommand '" + cfg.subcommand + "'");

    if (cfg.subcommand == "curves") {
        cfg.t_min = 0.01;
        cfg.t_steps = 500;
    }
    if (cfg.subcommand == "chance") cfg.c = 3.0;
    const auto get = [&](const char* key) -> const std::string* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };
    if (auto v = get("model")) cfg.model_path = *v;
    if (auto v = get("series")) cfg.series_path = *v;
    if (auto v = get("problem")) cfg.problem_path = *v;
    if (auto v = get("output")) cfg.output_path = *v;
    if (auto v = get("c")) cfg.c = to_real("--c", *v);
    if (auto v = get("t-min")) cfg.t_min = to_real("--t-min", *v);
    if (auto v = get("t-max")) cfg.t_max = to_real("--t-max", *v);
    else if (cfg.subcommand == "curves") cfg.t_max = cfg.c;
    if (auto v = get("t-steps")) cfg.t_steps = to_count("--t-steps", *v);
    if (auto v = get("trials")) cfg.trials = to_count("--trials", *v);
    if (auto v = get("seed")) cfg.seed = to_count("--seed", *v);
    if (auto v = get("delta")) cfg.delta = to_real("--delta", *v);
    if (auto v = get("epsilon")) cfg.epsilon = to_real("--epsilon", *v);
    if (auto v = get("alpha")) cfg.alpha = to_real("--alpha", *v);
    if (auto v = get("threads")) cfg.threads = static_cast<unsigned>(to_count("--threads", *v));

    require(cfg.t_min < cfg.t_max, "t_min must be below t_max");
    require(cfg.t_steps >= 2, "t_steps must be at least 2");
    require(cfg.trials >= 1, "trials must be at least 1");
    require(cfg.threads >= 1 && cfg.threads <= 256, "threads must lie in [1, 256]");
    require(cfg.c > 1.0, "c must exceed 1");
    require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta must lie in (0, 1)");
    require(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5, "epsilon must lie in (0, 0.5]");
    require(cfg.alpha > 0.0, "alpha must be positive");
    if (cfg.subcommand == "curves") require(cfg.t_min > 0.0, "curves needs t_min > 0");

    const bool needs_model = cfg.subcommand != "curves";
    const bool needs_series = cfg.subcommand == "bounds" || cfg.subcommand == "simulate" ||
                              cfg.subcommand == "expectation" || cfg.subcommand == "nemirovski";
    const bool needs_problem = cfg.subcommand == "chance" || cfg.subcommand == "qopt";
    if (needs_model && !cfg.model_path) fail(ErrorCode::missing_input, cfg.subcommand + " needs --model");
    if (needs_series && !cfg.series_path) fail(ErrorCode::missing_input, cfg.subcommand + " needs --series");
    if (needs_problem && !cfg.problem_path) fail(ErrorCode::missing_input, cfg.subcommand + " needs --problem");
    return cfg;
}

std::vector<double> config_grid(const RunConfig& config) {
    std::vector<double> grid(config.t_steps);
    const double step = (config.t_max - config.t_min) / static_cast<double>(config.t_steps - 1);
    for (std::size_t i = 0; i < config.t_steps; ++i) grid[i] = config.t_min + step * static_cast<double>(i);
    grid.back() = config.t_max;
    return grid;
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const std::string& sub = config.subcommand;
        if (sub == "curves") run_curves(config, out);
        else if (sub == "bounds") run_bounds(config, out);
        else if (sub == "simulate") return run_simulate(config, out, err);
        else if (sub == "expectation") run_expectation(config, out);
        else if (sub == "nemirovski") run_nemirovski(config, out);
        else if (sub == "chance") run_chance(config, out);
        else if (sub == "qopt") return run_qopt(config, out, err);
        else fail(ErrorCode::parse, "unknown subcommand '" + sub + "'");
        return kExitOk;
    } catch (const Error& e) {
        report(e, err);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "ERROR:" << kModule << ":internal " << e.what() << '\n';
        return kExitComputation;
    }
}

int dispatch(const RunConfig& config, std::ostream& err) {
    std::ostringstream buf;
    const int code = dispatch(config, buf, err);
    if (config.output_path == "-") {
        std::cout << buf.str() << std::flush;
    } else {
        std::ofstream out(config.output_path, std::ios::binary);
        if (!out) {
            err << "ERROR:cli:missing_input cannot write '" << config.output_path << "'\n";
            return kExitUsage;
        }
        out << buf.str();
    }
    return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const CLI::CallForHelp&) {
        out << "usage: idseries <curves|bounds|simulate|expectation|nemirovski|chance|qopt> [options]\n"
               "  --model PATH --series PATH --problem PATH --config PATH --output PATH\n"
               "  --t-min X --t-max X --t-steps N --trials N --seed N --threads N\n"
               "  --c X --delta X --epsilon X --alpha X\n";
        return kExitOk;
    } catch (const Error& e) {
        report(e, err);
        return kExitUsage;
    }
    if (cfg.output_path == "-") {
        std::ostringstream buf;
        const int code = dispatch(cfg, buf, err);
        out << buf.str() << std::flush;
        return code;
    }
    return dispatch(cfg, err);
}

}  // namespace idseries
