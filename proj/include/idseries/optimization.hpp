#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "idseries/levy.hpp"
#include "idseries/matrix.hpp"
#include "idseries/monte_carlo.hpp"

namespace idseries {

// ---------------------------------------------------------------------------
// Rectangular series threshold (extension of Nemirovski's conjecture)
// ---------------------------------------------------------------------------

struct NemirovskiParams {
    double c_alpha = 0.0;
    double tau_alpha = 0.0;
    /// Threshold with P{||sum xi_k A_k|| > t_star} <= (M+N)^-alpha.
    double t_star = 0.0;
    /// t_star > (sigma2 + V) / R, the regime the threshold formula assumes.
    bool condition_ok = false;
    /// R t_star / (rho1 v), must not exceed c_alpha for the H_c bound to apply.
    double scaled_t_star = 0.0;
    /// (M+N) exp(-beta0 R^{tau-2} t^tau / (rho1 v)^{tau-1}) at t_star.
    double tail_at_t_star = 0.0;
};

/// Requires a unit-variance model with R > 0 and rho1 from rect_series_rho1.
NemirovskiParams nemirovski_params(double alpha, std::size_t M, std::size_t N, double rho1, const IdModel& model);

// ---------------------------------------------------------------------------
// Chance-constrained LMI
// ---------------------------------------------------------------------------

/// Affine maps of the chance constraint evaluated at a fixed point x:
/// P{A0 - sum xi_k A_k >= 0} >= 1 - epsilon.
class ChanceProblem {
public:
    ChanceProblem(SymMatrix base, std::vector<SymMatrix> terms);

    std::size_t dim() const noexcept { return base_.dim(); }
    std::size_t size() const noexcept { return terms_.size(); }
    const SymMatrix& base() const noexcept { return base_; }
    const std::vector<SymMatrix>& terms() const noexcept { return terms_; }

    /// A'_k = A0^{-1/2} A_k A0^{-1/2}.
    const std::vector<SymMatrix>& normalized_terms() const noexcept { return normalized_; }
    /// lambda_max(sum A'_k^2).
    double rho2() const noexcept { return rho2_; }

private:
    SymMatrix base_;
    std::vector<SymMatrix> terms_;
    std::vector<SymMatrix> normalized_;
    double rho2_ = 0.0;
};

struct ChanceGamma {
    double gamma2 = 0.0;
    double tau_c = 0.0;
    /// 2M exp(-c^2 beta0 rho2 v / R^2) <= epsilon.
    bool precondition_ok = false;
    double precondition_lhs = 0.0;
};

ChanceGamma chance_gamma(double epsilon, std::size_t M, double rho2, const IdModel& model, double c);

/// Block-arrow matrix with gamma A0 on the diagonal and A_k in the first
/// block row and column. It is PSD iff sum A'_k^2 <= gamma^2 I.
SymMatrix assemble_lmi(double gamma, const ChanceProblem& problem);

/// Empirical P{sum xi_k A'_k <= I} with a Clopper-Pearson interval.
TailEstimate empirical_chance(const ChanceProblem& problem, const IdModel& model, std::size_t trials,
                              std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Quadratic optimization with orthogonality constraints
// ---------------------------------------------------------------------------

/// Partial trace over the column index: S(Y)_{m,m'} = sum_n Y_{nM+m, nM+m'}.
/// S((vec X)(vec X)^T) = X X^T.
SymMatrix s_map(const SymMatrix& y, std::size_t M, std::size_t N);
/// Partial trace over the row index: T(Y)_{n,n'} = sum_m Y_{nM+m, n'M+m}.
/// T((vec X)(vec X)^T) = X^T X.
SymMatrix t_map(const SymMatrix& y, std::size_t M, std::size_t N);

/// min X . A X  s.t.  X . B_i X <= 1,  C vec X = 0,  ||X|| <= 1  over M x N matrices.
class QuadProblem {
public:
    QuadProblem(std::size_t M, std::size_t N, SymMatrix objective, std::vector<SymMatrix> inequality_terms = {},
                Matrix equality_map = {});

    std::size_t rows() const noexcept { return M_; }
    std::size_t cols() const noexcept { return N_; }
    std::size_t dim() const noexcept { return M_ * N_; }
    const SymMatrix& objective() const noexcept { return objective_; }
    const std::vector<SymMatrix>& inequality_terms() const noexcept { return inequality_; }
    /// L x MN; zero rows when the problem has no equality constraint.
    const Matrix& equality_map() const noexcept { return equality_; }
    bool has_equality() const noexcept { return equality_.rows() > 0; }

private:
    std::size_t M_;
    std::size_t N_;
    SymMatrix objective_;
    std::vector<SymMatrix> inequality_;
    Matrix equality_;
};

struct SdpOptions {
    double tol = 1e-6;
    std::size_t max_iter = 50000;
    double relaxation = 1.5;
};

/// Constraint residuals of the relaxation at Y. Each is <= 0 when satisfied
/// (equality reports |C^T C . Y|).
struct SdpResiduals {
    double inequality = 0.0;  // max_i B_i . Y - 1
    double equality = 0.0;    // |C^T C . Y|
    double s_cap = 0.0;       // lambda_max(S(Y) - I_M)
    double t_cap = 0.0;       // lambda_max(T(Y) - I_N)
    double psd = 0.0;         // -lambda_min(Y)
    double dual = 0.0;        // relative dual infeasibility of the splitting
    double gap = 0.0;         // relative duality gap

    /// Largest primal constraint violation.
    double max_primal() const noexcept;
};

struct SdpResult {
    SymMatrix y_hat;
    double theta_hat = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    SdpResiduals residuals;
    /// max_primal after every residual check, in iteration order.
    std::vector<double> residual_history;
};

SdpResiduals constraint_residuals(const QuadProblem& problem, const SymMatrix& y);

/// Relaxation: min D . Y s.t. B_i . Y <= 1, C^T C . Y = 0, S(Y) <= I_M,
/// T(Y) <= I_N, Y >= 0. Dual ADMM with over-relaxation. Exhausting
/// max_iter returns converged = false with the final residuals.
SdpResult solve_sdp(const QuadProblem& problem, const SdpOptions& options = {});

struct RoundingPlan {
    std::size_t M = 0;
    std::size_t N = 0;
    SymMatrix y_hat;
    double theta_hat = 0.0;
    SymMatrix y_sqrt;
    /// Orthogonal; y_sqrt * A * y_sqrt = U^T diag(lambda) U.
    Matrix u;
    /// Q_i = unvec(column i of y_sqrt * U^T), i = 0..MN-1.
    std::vector<Matrix> q_list;
    double rho3 = 0.0;
    std::vector<double> rho4;
};

/// `inequality_terms` are the B_i of the problem; rho4 has one entry per term.
RoundingPlan build_rounding(const SymMatrix& y_hat, const SymMatrix& objective, std::size_t M, std::size_t N,
                            std::span<const SymMatrix> inequality_terms = {});

/// X = sum_i xi_i Q_i for given coefficients.
Matrix round_with(const RoundingPlan& plan, std::span<const double> xi);
/// X with fresh i.i.d. draws from a unit-variance model.
Matrix sample_rounding(const RoundingPlan& plan, const IdModel& model, std::uint64_t seed);

struct FeasibilityBounds {
    double c2 = 0.0;
    double tau2 = 0.0;
    /// ||X|| <= norm_bound with probability >= 1/2.
    double norm_bound = 0.0;
    /// X . B_i X <= quad_bounds[i] with probability >= 1/2.
    std::vector<double> quad_bounds;
    /// Divisor that turns X into the feasible X-bar (uses rho* = max(rho3, rho4)).
    double scale = 0.0;
};

FeasibilityBounds feasibility_bounds(const RoundingPlan& plan, const IdModel& model);

/// vec(X)^T B vec(X).
double quadratic_value(const Matrix& x, const SymMatrix& b);

}  // namespace idseries
