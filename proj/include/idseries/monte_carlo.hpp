#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "idseries/levy.hpp"
#include "idseries/matrix.hpp"
#include "idseries/tail_bounds.hpp"

namespace idseries {

/// Per-trial seed: splitmix64 finalizer applied to seed + 0x9E3779B97F4A7C15 * (index + 1).
/// Trial i always sees the same stream no matter which thread runs it.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Fills one coefficient per series term for a single trial.
using XiSampler = std::function<void(std::uint64_t trial_seed, std::span<double> xi)>;

/// i.i.d. draws from `model` using an engine seeded with the trial seed.
XiSampler model_sampler(const IdModel& model);
/// Every coefficient zero. Test hook for the degenerate series.
XiSampler zero_sampler();

/// Runs f(i) for i in [0, trials), split into contiguous blocks over
/// `threads` workers. f must only write state owned by trial i.
template <class F>
void for_each_trial(std::size_t trials, unsigned threads, F&& f) {
    if (threads <= 1 || trials < 2) {
        for (std::size_t i = 0; i < trials; ++i) f(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, trials);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = trials * w / workers;
            const std::size_t end = trials * (w + 1) / workers;
            try {
                for (std::size_t i = begin; i < end; ++i) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

struct SeriesStat {
    double lmax = 0.0;
    double norm = 0.0;
};

/// lambda_max and spectral norm of sum xi_k A_k for given coefficients.
SeriesStat series_stat(const MatrixSeries& series, std::span<const double> xi);
/// One random draw of the series, deterministic per seed.
SeriesStat sample_series_stat(const IdModel& model, const MatrixSeries& series, std::uint64_t seed);

/// Spectral norms of `trials` independent series draws, in trial order.
std::vector<double> simulate_norms(const XiSampler& sampler, const MatrixSeries& series, std::size_t trials,
                                   std::uint64_t seed, unsigned threads = 1);

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Exact two-sided binomial interval for `successes` out of `trials`.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.99);

struct TailEstimate {
    double t = 0.0;
    std::size_t trials = 0;
    std::size_t exceed_count = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

/// Empirical P{||S|| > t} over one shared set of draws for the whole grid.
std::vector<TailEstimate> empirical_tail(const IdModel& model, const MatrixSeries& series,
                                         std::span<const double> t_grid, std::size_t trials, std::uint64_t seed,
                                         unsigned threads = 1);
std::vector<TailEstimate> empirical_tail(const XiSampler& sampler, const MatrixSeries& series,
                                         std::span<const double> t_grid, std::size_t trials, std::uint64_t seed,
                                         unsigned threads = 1);

struct ExpectationEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

ExpectationEstimate empirical_expectation(const IdModel& model, const MatrixSeries& series, std::size_t trials,
                                          std::uint64_t seed, unsigned threads = 1);
ExpectationEstimate empirical_expectation(const XiSampler& sampler, const MatrixSeries& series, std::size_t trials,
                                          std::uint64_t seed, unsigned threads = 1);

struct CompareRow {
    BoundReport bounds;
    TailEstimate empirical;
    /// Names of bound columns that fall below the empirical lower limit.
    std::vector<std::string> violations;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::size_t violation_count() const noexcept;
};

/// Joins every analytic bound with the empirical tail at each grid point.
CompareReport compare_report(const IdModel& model, const MatrixSeries& series, std::span<const double> t_grid,
                             std::size_t trials, std::uint64_t seed, double c, unsigned threads = 1);

/// Throws Error(monte_carlo, bound_violation) naming the first violation.
void require_no_violations(const CompareReport& report);

}  // namespace idseries
