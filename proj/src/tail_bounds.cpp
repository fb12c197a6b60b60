#include "idseries/tail_bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "idseries/error.hpp"
#include "idseries/quadrature.hpp"
#include "idseries/scalar_bounds.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "tail_bounds";
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

void check_inputs(const SeriesShape& shape, double t) {
    if (shape.dim < 1) fail(ErrorCode::invalid_argument, "series dimension must be positive");
    if (!(shape.rho >= 0.0) || !std::isfinite(shape.rho)) fail(ErrorCode::invalid_argument, "rho must be finite and >= 0");
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "t must be finite and >= 0");
}

double two_d(const SeriesShape& shape) { return 2.0 * static_cast<double>(shape.dim); }

}  // namespace

double scaled_deviation(const IdModel& model, const SeriesShape& shape, double t) {
    const double R = model.support_radius();
    if (R == 0.0) return 0.0;
    if (shape.rho == 0.0) return kInf;
    return R * t / (shape.rho * model.variance());
}

double tail_exact(const IdModel& model, const SeriesShape& shape, double t) {
    check_inputs(shape, t);
    if (t == 0.0) return two_d(shape);
    if (shape.rho == 0.0) return 0.0;
    const double upper = t / shape.rho;
    const QuadratureResult q = simpson_doubling([&](double s) { return alpha_inv(model, s); }, 0.0, upper, 1e-10,
                                                std::size_t{1} << 20);
    return two_d(shape) * std::exp(-shape.rho * q.value);
}

double lambda_max_tail_exact(const IdModel& model, const SeriesShape& shape, double t) {
    return 0.5 * tail_exact(model, shape, t);
}

double tail_bennett(const IdModel& model, const SeriesShape& shape, double t) {
    check_inputs(shape, t);
    if (t == 0.0) return two_d(shape);
    if (shape.rho == 0.0) return 0.0;
    const double R = model.support_radius();
    const double rv = shape.rho * model.variance();
    if (R == 0.0) return two_d(shape) * std::exp(-t * t / (2.0 * shape.rho * model.sigma2()));
    return two_d(shape) * std::exp(-rv / (R * R) * curve_q(R * t / rv));
}

BernsteinBounds tail_bernstein(const IdModel& model, const SeriesShape& shape, double t) {
    check_inputs(shape, t);
    if (t == 0.0) return {two_d(shape), two_d(shape)};
    if (shape.rho == 0.0) return {0.0, 0.0};
    const double R = model.support_radius();
    const double rv = shape.rho * model.variance();
    BernsteinBounds b;
    b.smooth = two_d(shape) * std::exp(-1.5 * t * t / (3.0 * rv + R * t));
    if (R * t > 3.0 * rv)
        b.piecewise = two_d(shape) * std::exp(-0.75 * t / R);
    else
        b.piecewise = two_d(shape) * std::exp(-t * t / (4.0 * rv));
    return b;
}

double tail_hc(const IdModel& model, const SeriesShape& shape, double t, double c) {
    check_inputs(shape, t);
    if (!(c > 1.0)) fail(ErrorCode::invalid_argument, "tail_hc requires c > 1");
    if (t == 0.0) return two_d(shape);
    if (shape.rho == 0.0) return 0.0;
    const double R = model.support_radius();
    const double rv = shape.rho * model.variance();
    const double s = scaled_deviation(model, shape, t);
    if (s <= 1.0) return two_d(shape) * std::exp(-kBeta0 * t * t / rv);
    if (s > c) {
        std::ostringstream os;
        os.precision(17);
        os << "tail_hc: R t / (rho v) = " << s << " exceeds c = " << c;
        fail(ErrorCode::range, os.str());
    }
    const double tc = tau(kBeta0, c);
    return two_d(shape) * std::exp(-kBeta0 * std::pow(R, tc - 2.0) * std::pow(t, tc) / std::pow(rv, tc - 1.0));
}

double tail_beta0(const IdModel& model, const SeriesShape& shape, double t) {
    check_inputs(shape, t);
    if (t == 0.0) return two_d(shape);
    if (shape.rho == 0.0) return 0.0;
    const double R = model.support_radius();
    const double rv = shape.rho * model.variance();
    if (R > 0.0 && t > rv / R) return two_d(shape) * std::exp(-kBeta0 * t / R);
    return two_d(shape) * std::exp(-kBeta0 * t * t / rv);
}

double expectation_bound(const IdModel& model, const SeriesShape& shape, ExpectationVariant variant) {
    check_inputs(shape, 0.0);
    const double R = model.support_radius();
    if (R == 0.0) return kInf;
    const double rv = shape.rho * model.variance();
    const double log2d = std::log(two_d(shape));
    switch (variant) {
        case ExpectationVariant::statement: return 0.75 * R * (log2d + 1.0 + 9.0 * rv * rv / (2.0 * R * R));
        case ExpectationVariant::proof: return (log2d + 1.0 + rv * rv / (2.0 * R * R)) / kBeta0;
    }
    fail(ErrorCode::invalid_argument, "unknown expectation variant");
}

double lambda_max_quantile(const IdModel& model, const SeriesShape& shape, double delta, QuantileForm form, double c) {
    check_inputs(shape, 0.0);
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
    const double R = model.support_radius();
    if (R == 0.0) fail(ErrorCode::invalid_argument, "quantile forms require R > 0");
    const double level = std::log(two_d(shape)) - std::log(delta);
    switch (form) {
        case QuantileForm::bernstein: return 4.0 * R * level / 3.0;
        case QuantileForm::hc: {
            const double tc = tau(kBeta0, c);
            const double rv = shape.rho * model.variance();
            return std::pow(level * std::pow(rv, tc - 1.0) / (kBeta0 * std::pow(R, tc - 2.0)), 1.0 / tc);
        }
    }
    fail(ErrorCode::invalid_argument, "unknown quantile form");
}

BoundReport bound_report(const IdModel& model, const SeriesShape& shape, double t, double c) {
    BoundReport r;
    r.t = t;
    r.c = c;
    r.exact = tail_exact(model, shape, t);
    r.bennett = tail_bennett(model, shape, t);
    const BernsteinBounds b = tail_bernstein(model, shape, t);
    r.bernstein_smooth = b.smooth;
    r.bernstein_piecewise = b.piecewise;
    if (scaled_deviation(model, shape, t) <= c) r.hc = tail_hc(model, shape, t, c);
    r.beta0 = tail_beta0(model, shape, t);
    return r;
}

}  // namespace idseries
