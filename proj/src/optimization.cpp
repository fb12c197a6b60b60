#include "idseries/optimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "idseries/error.hpp"
#include "idseries/scalar_bounds.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "opt_apps";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

void require_unit_variance(const IdModel& model) {
    if (!model.has_unit_variance()) {
        std::ostringstream os;
        os << "model must have unit variance (sigma2 + V = " << model.variance() << ")";
        fail(ErrorCode::invalid_argument, os.str());
    }
}

void require_jumps(const IdModel& model) {
    if (model.support_radius() <= 0.0) fail(ErrorCode::invalid_argument, "threshold formulas need R > 0");
}

SymMatrix sum_of_products(std::span<const Matrix> qs, bool left) {
    const std::size_t d = left ? qs.front().rows() : qs.front().cols();
    Matrix acc(d, d);
    for (const Matrix& q : qs) acc += left ? q * q.transpose() : q.transpose() * q;
    return SymMatrix(std::move(acc));
}

// Columns of `factor` reshaped to M x N.
std::vector<Matrix> column_matrices(const Matrix& factor, std::size_t M, std::size_t N) {
    const std::size_t n = factor.rows();
    std::vector<Matrix> out;
    out.reserve(factor.cols());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < factor.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = factor(i, j);
        out.push_back(unvec(col, M, N));
    }
    return out;
}

double cap_rho(std::span<const Matrix> qs) {
    if (qs.empty()) return 0.0;
    return std::max(lambda_max(sum_of_products(qs, true)), lambda_max(sum_of_products(qs, false)));
}

// [k (rho v)^{tau-1} ln(M+N) / (beta0 R^{tau-2})]^{power/tau}
double threshold(double k, double rho, double v, double R, double tau, double log_dim, double power) {
    if (rho <= 0.0) return 0.0;
    const double base = k * std::pow(rho * v, tau - 1.0) * log_dim / (kBeta0 * std::pow(R, tau - 2.0));
    return std::pow(base, power / tau);
}

}  // namespace

NemirovskiParams nemirovski_params(double alpha, std::size_t M, std::size_t N, double rho1, const IdModel& model) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::invalid_argument, "alpha must be positive");
    if (M == 0 || N == 0) fail(ErrorCode::invalid_argument, "matrix dimensions must be positive");
    if (!(rho1 > 0.0) || !std::isfinite(rho1)) fail(ErrorCode::invalid_argument, "rho1 must be positive");
    require_jumps(model);
    require_unit_variance(model);
    const double R = model.support_radius();
    const double v = model.variance();
    const double log_dim = std::log(static_cast<double>(M + N));

    NemirovskiParams p;
    p.c_alpha = (1.0 + alpha) * log_dim / std::sqrt(kBeta0) * std::max(1.0, std::sqrt(R)) *
                std::max(1.0, std::sqrt(rho1 * v / R));
    p.tau_alpha = tau(kBeta0, p.c_alpha);
    p.t_star = threshold(1.0 + alpha, rho1, v, R, p.tau_alpha, log_dim, 1.0);
    p.condition_ok = p.t_star > v / R;
    p.scaled_t_star = R * p.t_star / (rho1 * v);
    p.tail_at_t_star = static_cast<double>(M + N) *
                       std::exp(-kBeta0 * std::pow(R, p.tau_alpha - 2.0) * std::pow(p.t_star, p.tau_alpha) /
                                std::pow(rho1 * v, p.tau_alpha - 1.0));
    return p;
}

ChanceProblem::ChanceProblem(SymMatrix base, std::vector<SymMatrix> terms)
    : base_(std::move(base)), terms_(std::move(terms)) {
    if (base_.dim() == 0) fail(ErrorCode::invalid_argument, "chance constraint needs a nonempty base matrix");
    for (const SymMatrix& a : terms_)
        if (a.dim() != base_.dim()) fail(ErrorCode::dimension_mismatch, "chance terms must match the base dimension");
    if (lambda_min(base_) <= 1e-10) fail(ErrorCode::invalid_argument, "base matrix must be positive definite");
    const Matrix w = inv_sqrt(base_).matrix();
    const std::size_t d = base_.dim();
    Matrix sq(d, d);
    normalized_.reserve(terms_.size());
    for (const SymMatrix& a : terms_) {
        Matrix n = w * a.matrix() * w;
        sq += n * n;
        normalized_.emplace_back(std::move(n));
    }
    rho2_ = lambda_max(SymMatrix(std::move(sq)));
}

ChanceGamma chance_gamma(double epsilon, std::size_t M, double rho2, const IdModel& model, double c) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) fail(ErrorCode::invalid_argument, "epsilon must lie in (0, 0.5]");
    if (M == 0) fail(ErrorCode::invalid_argument, "dimension must be positive");
    if (!(rho2 > 0.0) || !std::isfinite(rho2)) fail(ErrorCode::invalid_argument, "rho2 must be positive");
    if (!(c > 1.0) || !std::isfinite(c)) fail(ErrorCode::invalid_argument, "c must be finite and > 1");
    require_jumps(model);
    const double R = model.support_radius();
    const double v = model.variance();
    const double log_term = std::log(2.0 * static_cast<double>(M) / epsilon);

    ChanceGamma g;
    g.tau_c = tau(kBeta0, c);
    g.gamma2 = std::pow(kBeta0 * std::pow(R, g.tau_c - 2.0) / (std::pow(rho2 * v, g.tau_c - 1.0) * log_term),
                        1.0 / g.tau_c);
    g.precondition_lhs = 2.0 * static_cast<double>(M) * std::exp(-c * c * kBeta0 * rho2 * v / (R * R));
    g.precondition_ok = g.precondition_lhs <= epsilon;
    return g;
}

SymMatrix assemble_lmi(double gamma, const ChanceProblem& problem) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorCode::invalid_argument, "gamma must be positive");
    const std::size_t m = problem.dim();
    const std::size_t blocks = problem.size() + 1;
    Matrix out(blocks * m, blocks * m);
    const SymMatrix& a0 = problem.base();
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) out(b * m + i, b * m + j) = gamma * a0(i, j);
    for (std::size_t k = 0; k < problem.size(); ++k) {
        const SymMatrix& a = problem.terms()[k];
        const std::size_t off = (k + 1) * m;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                out(i, off + j) = a(i, j);
                out(off + j, i) = a(i, j);
            }
    }
    return SymMatrix(std::move(out));
}

TailEstimate empirical_chance(const ChanceProblem& problem, const IdModel& model, std::size_t trials,
                              std::uint64_t seed, unsigned threads) {
    if (trials < 1000) fail(ErrorCode::invalid_argument, "Monte Carlo estimates need at least 1000 trials");
    const XiSampler sampler = model_sampler(model);
    const std::vector<SymMatrix>& terms = problem.normalized_terms();
    const std::size_t d = problem.dim();
    std::vector<unsigned char> ok(trials, 0);
    for_each_trial(trials, threads, [&](std::size_t i) {
        std::vector<double> xi(terms.size());
        sampler(mix_seed(seed, i), xi);
        Matrix s(d, d);
        for (std::size_t k = 0; k < terms.size(); ++k) s.add_scaled(terms[k].matrix(), xi[k]);
        ok[i] = lambda_max(SymMatrix(std::move(s))) <= 1.0 ? 1 : 0;
    });
    TailEstimate est;
    est.t = 1.0;
    est.trials = trials;
    est.exceed_count = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    est.p_hat = static_cast<double>(est.exceed_count) / static_cast<double>(trials);
    const Interval ci = clopper_pearson(est.exceed_count, trials);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    return est;
}

SymMatrix s_map(const SymMatrix& y, std::size_t M, std::size_t N) {
    if (y.dim() != M * N) fail(ErrorCode::dimension_mismatch, "S map expects an MN x MN matrix");
    Matrix out(M, M);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t mp = 0; mp < M; ++mp) out(m, mp) += y(n * M + m, n * M + mp);
    return SymMatrix(std::move(out));
}

SymMatrix t_map(const SymMatrix& y, std::size_t M, std::size_t N) {
    if (y.dim() != M * N) fail(ErrorCode::dimension_mismatch, "T map expects an MN x MN matrix");
    Matrix out(N, N);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t np = 0; np < N; ++np)
            for (std::size_t m = 0; m < M; ++m) out(n, np) += y(n * M + m, np * M + m);
    return SymMatrix(std::move(out));
}

QuadProblem::QuadProblem(std::size_t M, std::size_t N, SymMatrix objective, std::vector<SymMatrix> inequality_terms,
                         Matrix equality_map)
    : M_(M), N_(N), objective_(std::move(objective)), inequality_(std::move(inequality_terms)),
      equality_(std::move(equality_map)) {
    if (M_ == 0 || N_ == 0) fail(ErrorCode::invalid_argument, "matrix dimensions must be positive");
    if (objective_.dim() != M_ * N_) fail(ErrorCode::dimension_mismatch, "objective must be MN x MN");
    for (const SymMatrix& b : inequality_) {
        if (b.dim() != M_ * N_) fail(ErrorCode::dimension_mismatch, "constraint matrices must be MN x MN");
        if (lambda_min(b) < -1e-10 * std::max(1.0, lambda_max(b)))
            fail(ErrorCode::invalid_argument, "constraint matrices must be positive semidefinite");
    }
    if (equality_.rows() > 0 && equality_.cols() != M_ * N_)
        fail(ErrorCode::dimension_mismatch, "equality map must have MN columns");
}

double SdpResiduals::max_primal() const noexcept {
    return std::max({inequality, equality, s_cap, t_cap, psd, 0.0});
}

SdpResiduals constraint_residuals(const QuadProblem& problem, const SymMatrix& y) {
    if (y.dim() != problem.dim()) fail(ErrorCode::dimension_mismatch, "Y must be MN x MN");
    const std::size_t M = problem.rows();
    const std::size_t N = problem.cols();
    SdpResiduals r;
    r.inequality = -std::numeric_limits<double>::infinity();
    for (const SymMatrix& b : problem.inequality_terms())
        r.inequality = std::max(r.inequality, inner(b.matrix(), y.matrix()) - 1.0);
    if (problem.inequality_terms().empty()) r.inequality = 0.0;
    if (problem.has_equality()) {
        const Matrix& c = problem.equality_map();
        r.equality = std::abs(inner(c.transpose() * c, y.matrix()));
    }
    r.s_cap = lambda_max(s_map(y, M, N)) - 1.0;
    r.t_cap = lambda_max(t_map(y, M, N)) - 1.0;
    r.psd = -lambda_min(y);
    return r;
}

double quadratic_value(const Matrix& x, const SymMatrix& b) {
    const std::vector<double> v = vec(x);
    if (v.size() != b.dim()) fail(ErrorCode::dimension_mismatch, "quadratic form dimension mismatch");
    const std::vector<double> bv = b.matrix() * std::span<const double>(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * bv[i];
    return s;
}

RoundingPlan build_rounding(const SymMatrix& y_hat, const SymMatrix& objective, std::size_t M, std::size_t N,
                            std::span<const SymMatrix> inequality_terms) {
    const std::size_t n = M * N;
    if (n == 0) fail(ErrorCode::invalid_argument, "matrix dimensions must be positive");
    if (y_hat.dim() != n || objective.dim() != n) fail(ErrorCode::dimension_mismatch, "Y and A must be MN x MN");
    for (const SymMatrix& b : inequality_terms)
        if (b.dim() != n) fail(ErrorCode::dimension_mismatch, "constraint matrices must be MN x MN");

    RoundingPlan plan;
    plan.M = M;
    plan.N = N;
    plan.y_hat = y_hat;
    plan.theta_hat = inner(objective.matrix(), y_hat.matrix());
    plan.y_sqrt = psd_sqrt(y_hat, 1e-10);
    const Matrix& ys = plan.y_sqrt.matrix();
    const EigenDecomposition ed = sym_eig(SymMatrix(ys * objective.matrix() * ys));
    plan.u = ed.vectors.transpose();
    const Matrix factor = ys * ed.vectors;  // y_sqrt U^T
    plan.q_list = column_matrices(factor, M, N);
    plan.rho3 = cap_rho(plan.q_list);

    plan.rho4.reserve(inequality_terms.size());
    for (const SymMatrix& b : inequality_terms) {
        const SymMatrix bp(plan.u * ys * b.matrix() * ys * ed.vectors);
        const SymMatrix root = psd_sqrt(bp, 1e-8);
        plan.rho4.push_back(cap_rho(column_matrices(root.matrix(), M, N)));
    }
    return plan;
}

Matrix round_with(const RoundingPlan& plan, std::span<const double> xi) {
    if (xi.size() != plan.q_list.size()) fail(ErrorCode::dimension_mismatch, "one coefficient per Q_i is required");
    Matrix x(plan.M, plan.N);
    for (std::size_t i = 0; i < xi.size(); ++i) x.add_scaled(plan.q_list[i], xi[i]);
    return x;
}

Matrix sample_rounding(const RoundingPlan& plan, const IdModel& model, std::uint64_t seed) {
    require_unit_variance(model);
    std::vector<double> xi(plan.q_list.size());
    model_sampler(model)(seed, xi);
    return round_with(plan, xi);
}

FeasibilityBounds feasibility_bounds(const RoundingPlan& plan, const IdModel& model) {
    if (plan.q_list.empty()) fail(ErrorCode::invalid_argument, "rounding plan is empty");
    require_jumps(model);
    require_unit_variance(model);
    const double R = model.support_radius();
    const double v = model.variance();
    const double log_dim = std::log(static_cast<double>(plan.M + plan.N));
    double rho_star = plan.rho3;
    for (double r4 : plan.rho4) rho_star = std::max(rho_star, r4);

    FeasibilityBounds fb;
    const double rho_for_c = plan.rho3 > 0.0 ? plan.rho3 : 1.0;
    fb.c2 = nemirovski_params(2.0, plan.M, plan.N, rho_for_c, model).c_alpha;
    fb.tau2 = tau(kBeta0, fb.c2);
    fb.norm_bound = threshold(3.0, plan.rho3, v, R, fb.tau2, log_dim, 1.0);
    fb.quad_bounds.reserve(plan.rho4.size());
    for (double r4 : plan.rho4) fb.quad_bounds.push_back(threshold(3.0, r4, v, R, fb.tau2, log_dim, 2.0));
    fb.scale = threshold(3.0, rho_star, v, R, fb.tau2, log_dim, 1.0);
    return fb;
}

}  // namespace idseries
