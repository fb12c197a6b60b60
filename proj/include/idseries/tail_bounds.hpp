#pragma once

#include <cstddef>
#include <optional>

#include "idseries/levy.hpp"
#include "idseries/matrix.hpp"

namespace idseries {

/// The two numbers every bound needs from a series: the dimension d and
/// rho = lambda_max(sum A_k^2).
struct SeriesShape {
    std::size_t dim = 0;
    double rho = 0.0;

    SeriesShape(std::size_t d, double r) : dim(d), rho(r) {}
    SeriesShape(const MatrixSeries& s) : dim(s.dim()), rho(s.rho()) {}  // NOLINT: implicit by intent
};

// All tail bounds below bound P{||sum xi_k A_k|| > t}. Values are unclipped
// and can exceed one.

/// 2d exp(-rho * int_0^{t/rho} alpha^{-1}(s) ds), quadrature to 1e-10 relative.
double tail_exact(const IdModel& model, const SeriesShape& shape, double t);
/// Half of tail_exact: the bound on P{lambda_max(sum xi_k A_k) > t}.
double lambda_max_tail_exact(const IdModel& model, const SeriesShape& shape, double t);

/// 2d exp(-rho v / R^2 * Q(R t / (rho v))) with v = sigma2 + V.
/// With no atoms (R = 0) this is the limit 2d exp(-t^2 / (2 rho sigma2)).
double tail_bennett(const IdModel& model, const SeriesShape& shape, double t);

struct BernsteinBounds {
    double smooth = 0.0;
    double piecewise = 0.0;
};
BernsteinBounds tail_bernstein(const IdModel& model, const SeriesShape& shape, double t);

/// Bound from the two-piece lower function H_c. Requires R t / (rho v) <= c.
double tail_hc(const IdModel& model, const SeriesShape& shape, double t, double c);
/// Bound from H_{{1, inf}}: linear exponent beyond t = rho v / R.
double tail_beta0(const IdModel& model, const SeriesShape& shape, double t);

enum class ExpectationVariant { statement, proof };

/// Bound on E||sum xi_k A_k||. The stated constant and the one carried
/// through the derivation differ; both are exposed. R = 0 yields +inf.
double expectation_bound(const IdModel& model, const SeriesShape& shape, ExpectationVariant variant);

enum class QuantileForm { bernstein, hc };

/// lambda_max(sum xi_k A_k) is below the returned value with probability
/// at least 1 - delta. `c` is only used by the H_c form.
double lambda_max_quantile(const IdModel& model, const SeriesShape& shape, double delta, QuantileForm form,
                           double c = 1000.0);

struct BoundReport {
    double t = 0.0;
    double exact = 0.0;
    double bennett = 0.0;
    double bernstein_smooth = 0.0;
    double bernstein_piecewise = 0.0;
    std::optional<double> hc;  // empty when R t / (rho v) > c
    double c = 0.0;
    double beta0 = 0.0;
};

BoundReport bound_report(const IdModel& model, const SeriesShape& shape, double t, double c);

/// R t / (rho (sigma2 + V)): the argument fed to Q, B and H.
double scaled_deviation(const IdModel& model, const SeriesShape& shape, double t);

}  // namespace idseries
