#include "idseries/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "idseries/error.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "levy";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

double checked(double value, const char* what, double arg) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os.precision(17);
        os << what << " overflows at s=" << arg;
        fail(ErrorCode::range, os.str());
    }
    return value;
}

}  // namespace

LevyMeasure::LevyMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
        if (!std::isfinite(a.location) || a.location == 0.0)
            fail(ErrorCode::invalid_argument, "atom location must be finite and nonzero");
        if (!std::isfinite(a.weight) || !(a.weight > 0.0))
            fail(ErrorCode::invalid_argument, "atom weight must be finite and positive");
    }
    std::vector<double> locs;
    locs.reserve(atoms_.size());
    for (const Atom& a : atoms_) locs.push_back(a.location);
    std::sort(locs.begin(), locs.end());
    if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
        fail(ErrorCode::invalid_argument, "atom locations must be distinct");
}

double LevyMeasure::mass() const noexcept {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.weight;
    return m;
}

IdModel::IdModel(double sigma2, LevyMeasure measure) : sigma2_(sigma2), measure_(std::move(measure)) {
    if (!std::isfinite(sigma2_) || sigma2_ < 0.0)
        fail(ErrorCode::invalid_argument, "sigma2 must be finite and nonnegative");
    for (const Atom& a : measure_.atoms()) {
        support_radius_ = std::max(support_radius_, std::abs(a.location));
        second_moment_ += a.weight * a.location * a.location;
        jump_mean_ += a.weight * a.location;
    }
    if (!(variance() > 0.0)) fail(ErrorCode::invalid_argument, "degenerate model: sigma2 + V must be positive");
}

double IdModel::mgf_domain() const noexcept { return std::numeric_limits<double>::infinity(); }

IdModel IdModel::scaled(double factor) const {
    if (!std::isfinite(factor) || factor == 0.0) fail(ErrorCode::invalid_argument, "scale factor must be finite and nonzero");
    std::vector<Atom> atoms(measure_.atoms().begin(), measure_.atoms().end());
    for (Atom& a : atoms) a.location *= factor;
    return IdModel(sigma2_ * factor * factor, LevyMeasure(std::move(atoms)));
}

IdModel IdModel::normalized() const { return scaled(1.0 / std::sqrt(variance())); }

bool IdModel::has_unit_variance(double tol) const noexcept { return std::abs(variance() - 1.0) <= tol; }

double IdModel::draw(Engine& engine) const {
    double x = 0.0;
    if (sigma2_ > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        x += std::sqrt(sigma2_) * normal(engine);
    }
    for (const Atom& a : measure_.atoms()) {
        std::poisson_distribution<long long> counts(a.weight);
        x += a.location * static_cast<double>(counts(engine));
    }
    return x - jump_mean_;
}

double levy_moment(const IdModel& model, int k) {
    if (k < 1) fail(ErrorCode::invalid_argument, "moment order must be >= 1");
    double m = 0.0;
    for (const Atom& a : model.measure().atoms()) m += a.weight * std::pow(std::abs(a.location), k);
    return m;
}

double alpha(const IdModel& model, double s) {
    if (!(s >= 0.0)) fail(ErrorCode::invalid_argument, "alpha requires s >= 0");
    double v = model.sigma2() * s;
    for (const Atom& a : model.measure().atoms()) {
        const double u = std::abs(a.location);
        v += a.weight * u * std::expm1(s * u);
    }
    return checked(v, "alpha", s);
}

double alpha_derivative(const IdModel& model, double s) {
    double v = model.sigma2();
    for (const Atom& a : model.measure().atoms()) {
        const double u = std::abs(a.location);
        v += a.weight * u * u * std::exp(s * u);
    }
    return checked(v, "alpha'", s);
}

double alpha_inv(const IdModel& model, double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) fail(ErrorCode::invalid_argument, "alpha_inv requires finite y >= 0");
    if (y == 0.0) return 0.0;

    double lo = 0.0;
    double hi = 1.0;
    int grow = 0;
    while (alpha(model, hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 2000) fail(ErrorCode::internal, "alpha_inv: bracket growth did not terminate");
    }

    for (int it = 0; hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // ulp resolution reached
        if (alpha(model, mid) < y)
            lo = mid;
        else
            hi = mid;
        if (it > 4000) fail(ErrorCode::internal, "alpha_inv: bisection iteration cap reached");
    }

    double s = 0.5 * (lo + hi);
    const double step = (alpha(model, s) - y) / alpha_derivative(model, s);
    const double polished = s - step;
    if (polished >= lo && polished <= hi) s = polished;
    return s;
}

double phi(const IdModel& model, double theta) {
    if (!(theta >= 0.0)) fail(ErrorCode::invalid_argument, "phi requires theta >= 0");
    if (!(theta < model.mgf_domain())) fail(ErrorCode::range, "phi: theta outside the mgf domain");
    double v = 0.5 * model.sigma2() * theta * theta;
    for (const Atom& a : model.measure().atoms()) {
        const double x = theta * std::abs(a.location);
        // exp(x) - x - 1 without cancellation for small x
        const double tail = x < 1e-3 ? x * x * (0.5 + x * (1.0 / 6.0 + x / 24.0)) : std::expm1(x) - x;
        v += a.weight * tail;
    }
    return checked(v, "phi", theta);
}

std::vector<double> sample(const IdModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 1) fail(ErrorCode::invalid_argument, "sample requires n >= 1");
    Engine engine(seed);
    std::vector<double> out(n);
    for (double& x : out) x = model.draw(engine);
    return out;
}

}  // namespace idseries
