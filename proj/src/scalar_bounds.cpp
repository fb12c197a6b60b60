#include "idseries/scalar_bounds.hpp"

#include <cmath>
#include <sstream>

#include "idseries/error.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "scalar_bounds";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double curve_q(double s) {
    if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "Q requires s >= 0");
    if (s < 0.05) {
        // Q(s) = sum_{k>=2} (-1)^k s^k / (k (k-1))
        double term = s * s;
        double sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double add = term / (k * (k - 1.0));
            sum += (k % 2 == 0) ? add : -add;
            term *= s;
            if (add < 1e-18 * sum) break;
        }
        return sum;
    }
    return (1.0 + s) * std::log1p(s) - s;
}

double curve_b(double s) {
    if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "B requires s >= 0");
    return s * s / (2.0 * (1.0 + s / 3.0));
}

double curve_t(double s) {
    if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "T requires s >= 0");
    return s < 3.0 ? s * s / 4.0 : 0.75 * s;
}

double eval_curve(Curve kind, double s) {
    switch (kind) {
        case Curve::Q: return curve_q(s);
        case Curve::B: return curve_b(s);
        case Curve::T: return curve_t(s);
    }
    fail(ErrorCode::invalid_argument, "unknown curve");
}

double tau(double beta, double s) {
    if (!(beta > 0.0)) fail(ErrorCode::invalid_argument, "tau requires beta > 0");
    if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::invalid_argument, "tau requires finite s > 0");
    const bool is_beta0 = std::abs(beta - kBeta0) <= 1e-15;
    if (is_beta0 && std::abs(s - 1.0) < 1e-4) return kTauAtOne;
    if (s == 1.0) fail(ErrorCode::invalid_argument, "tau(beta, 1) is singular unless beta = 2 ln 2 - 1");
    const double q = curve_q(s);
    if (!(q > 0.0)) fail(ErrorCode::range, "tau: Q(s) underflows to zero");
    return (std::log(q) - std::log(beta)) / std::log(s);
}

PartitionBound::PartitionBound(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) fail(ErrorCode::invalid_argument, "partition needs at least the points 1 and c");
    if (points_.front() != 1.0) fail(ErrorCode::invalid_argument, "partition must start at 1");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || !(points_[i] > points_[i - 1]))
            fail(ErrorCode::invalid_argument, "partition points must be finite and strictly increasing");
    }
    exponents_.reserve(points_.size() - 1);
    for (std::size_t n = 1; n < points_.size(); ++n) exponents_.push_back(tau(kBeta0, points_[n]));
}

double PartitionBound::operator()(double s) const {
    if (!(s > 0.0) || s > c()) {
        std::ostringstream os;
        os.precision(17);
        os << "H_P evaluated at s=" << s << " outside (0, " << c() << "]";
        fail(ErrorCode::range, os.str());
    }
    if (s <= 1.0) return kBeta0 * s * s;
    // first n with s <= p_n
    std::size_t n = 1;
    while (s > points_[n]) ++n;
    return kBeta0 * std::pow(s, exponents_[n - 1]);
}

double eval_hp(const PartitionBound& pb, double s) { return pb(s); }

Crossing bh_crossing(double c) {
    if (!(c > 1.0)) fail(ErrorCode::invalid_argument, "bh_crossing requires c > 1");
    const PartitionBound hc = PartitionBound::two_piece(c);
    auto diff = [&](double s) { return hc(s) - curve_b(s); };
    const double lo = 0.5;
    const double hi = 1.0;
    if (!(diff(lo) < 0.0 && diff(hi) > 0.0)) fail(ErrorCode::not_converged, "bh_crossing: no sign change on (0.5, 1]");
    const double s = bisect(diff, lo, hi, 1e-12);
    return {s, hc(s)};
}

std::vector<Crossing> bh_crossings(double c) {
    std::vector<Crossing> out{bh_crossing(c)};
    const PartitionBound hc = PartitionBound::two_piece(c);
    auto diff = [&](double s) { return hc(s) - curve_b(s); };
    // after the first crossing H_c > B at s = 1; scan (1, c] for further sign changes
    const int steps = 20000;
    const double log_span = std::log(c);
    double prev_s = 1.0;
    double prev_f = diff(prev_s);
    for (int i = 1; i <= steps; ++i) {
        const double s = i == steps ? c : std::exp(log_span * i / steps);
        const double f = diff(s);
        if ((f > 0.0) != (prev_f > 0.0)) {
            const double root = bisect(diff, prev_s, s, 1e-12 * s);
            out.push_back({root, hc(root)});
        }
        prev_s = s;
        prev_f = f;
    }
    return out;
}

}  // namespace idseries
