#include "idseries/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "idseries/error.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "monte_carlo";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

void require_trials(std::size_t trials) {
    if (trials < 1000) fail(ErrorCode::invalid_argument, "Monte Carlo estimates need at least 1000 trials");
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

XiSampler model_sampler(const IdModel& model) {
    return [model](std::uint64_t trial_seed, std::span<double> xi) {
        Engine engine(trial_seed);
        for (double& x : xi) x = model.draw(engine);
    };
}

XiSampler zero_sampler() {
    return [](std::uint64_t, std::span<double> xi) { std::fill(xi.begin(), xi.end(), 0.0); };
}

SeriesStat series_stat(const MatrixSeries& series, std::span<const double> xi) {
    const std::vector<double> vals = sym_eigenvalues(series.combine(xi));
    return {vals.front(), std::max(std::abs(vals.front()), std::abs(vals.back()))};
}

SeriesStat sample_series_stat(const IdModel& model, const MatrixSeries& series, std::uint64_t seed) {
    std::vector<double> xi(series.size());
    model_sampler(model)(seed, xi);
    return series_stat(series, xi);
}

std::vector<double> simulate_norms(const XiSampler& sampler, const MatrixSeries& series, std::size_t trials,
                                   std::uint64_t seed, unsigned threads) {
    std::vector<double> norms(trials);
    const std::size_t k = series.size();
    for_each_trial(trials, threads, [&](std::size_t i) {
        std::vector<double> xi(k);
        sampler(mix_seed(seed, i), xi);
        norms[i] = series_stat(series, xi).norm;
    });
    return norms;
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0 || successes > trials) fail(ErrorCode::invalid_argument, "clopper_pearson: need 0 <= k <= n, n > 0");
    if (!(confidence > 0.0 && confidence < 1.0)) fail(ErrorCode::invalid_argument, "confidence must lie in (0, 1)");
    const double a = 1.0 - confidence;
    const double k = static_cast<double>(successes);
    const double n = static_cast<double>(trials);
    Interval ci;
    ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, a / 2.0);
    ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - a / 2.0);
    return ci;
}

std::vector<TailEstimate> empirical_tail(const IdModel& model, const MatrixSeries& series,
                                         std::span<const double> t_grid, std::size_t trials, std::uint64_t seed,
                                         unsigned threads) {
    return empirical_tail(model_sampler(model), series, t_grid, trials, seed, threads);
}

std::vector<TailEstimate> empirical_tail(const XiSampler& sampler, const MatrixSeries& series,
                                         std::span<const double> t_grid, std::size_t trials, std::uint64_t seed,
                                         unsigned threads) {
    require_trials(trials);
    std::vector<double> norms = simulate_norms(sampler, series, trials, seed, threads);
    std::sort(norms.begin(), norms.end());
    std::vector<TailEstimate> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        TailEstimate e;
        e.t = t;
        e.trials = trials;
        e.exceed_count = static_cast<std::size_t>(norms.end() - std::upper_bound(norms.begin(), norms.end(), t));
        e.p_hat = static_cast<double>(e.exceed_count) / static_cast<double>(trials);
        const Interval ci = clopper_pearson(e.exceed_count, trials);
        e.ci_low = ci.low;
        e.ci_high = ci.high;
        out.push_back(e);
    }
    return out;
}

ExpectationEstimate empirical_expectation(const IdModel& model, const MatrixSeries& series, std::size_t trials,
                                          std::uint64_t seed, unsigned threads) {
    return empirical_expectation(model_sampler(model), series, trials, seed, threads);
}

ExpectationEstimate empirical_expectation(const XiSampler& sampler, const MatrixSeries& series, std::size_t trials,
                                          std::uint64_t seed, unsigned threads) {
    require_trials(trials);
    const std::vector<double> norms = simulate_norms(sampler, series, trials, seed, threads);
    double mean = 0.0;
    for (double x : norms) mean += x;
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (double x : norms) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(trials - 1);
    return {mean, std::sqrt(var / static_cast<double>(trials))};
}

std::size_t CompareReport::violation_count() const noexcept {
    std::size_t n = 0;
    for (const CompareRow& r : rows) n += r.violations.size();
    return n;
}

CompareReport compare_report(const IdModel& model, const MatrixSeries& series, std::span<const double> t_grid,
                             std::size_t trials, std::uint64_t seed, double c, unsigned threads) {
    const std::vector<TailEstimate> tails = empirical_tail(model, series, t_grid, trials, seed, threads);
    CompareReport report;
    report.rows.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        CompareRow row{bound_report(model, series, t_grid[i], c), tails[i], {}};
        const double low = row.empirical.ci_low;
        auto check = [&](const char* name, double bound) {
            if (bound < low) row.violations.emplace_back(name);
        };
        check("exact", row.bounds.exact);
        check("bennett", row.bounds.bennett);
        check("bernstein_smooth", row.bounds.bernstein_smooth);
        check("bernstein_piecewise", row.bounds.bernstein_piecewise);
        if (row.bounds.hc) check("hc", *row.bounds.hc);
        check("beta0", row.bounds.beta0);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void require_no_violations(const CompareReport& report) {
    for (const CompareRow& r : report.rows) {
        if (!r.violations.empty()) {
            std::ostringstream os;
            os.precision(17);
            os << "bound '" << r.violations.front() << "' below the empirical 99% lower limit " << r.empirical.ci_low
               << " at t=" << r.bounds.t;
            fail(ErrorCode::bound_violation, os.str());
        }
    }
}

}  // namespace idseries
