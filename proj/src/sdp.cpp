#include <algorithm>
#include <cmath>
#include <vector>

#include "idseries/error.hpp"
#include "idseries/optimization.hpp"

namespace idseries {

namespace {

// Block-diagonal variable: Y (MN x MN), S-slack (M x M), T-slack (N x N),
// and one nonnegative slack per inequality.
struct Block {
    Matrix y;
    Matrix zs;
    Matrix zt;
    std::vector<double> s;
};

Block zero_block(std::size_t n, std::size_t M, std::size_t N, std::size_t ineq) {
    return {Matrix(n, n), Matrix(M, M), Matrix(N, N), std::vector<double>(ineq, 0.0)};
}

double dot(const Block& a, const Block& b) {
    double r = inner(a.y, b.y) + inner(a.zs, b.zs) + inner(a.zt, b.zt);
    for (std::size_t i = 0; i < a.s.size(); ++i) r += a.s[i] * b.s[i];
    return r;
}

void axpy(Block& a, const Block& b, double c) {
    a.y.add_scaled(b.y, c);
    a.zs.add_scaled(b.zs, c);
    a.zt.add_scaled(b.zt, c);
    for (std::size_t i = 0; i < a.s.size(); ++i) a.s[i] += c * b.s[i];
}

void scale(Block& a, double c) {
    a.y *= c;
    a.zs *= c;
    a.zt *= c;
    for (double& x : a.s) x *= c;
}

double norm(const Block& a) { return std::sqrt(dot(a, a)); }

// Splits v into its positive part and its negative part divided by mu.
void split(const Matrix& v, double mu, Matrix& pos, Matrix& neg) {
    const std::size_t d = v.rows();
    const EigenDecomposition ed = sym_eig(SymMatrix(v));
    pos = Matrix(d, d);
    neg = Matrix(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lam = ed.values[k];
        Matrix& target = lam > 0.0 ? pos : neg;
        const double w = lam > 0.0 ? lam : -lam / mu;
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < d; ++i) {
            const double vi = w * ed.vectors(i, k);
            for (std::size_t j = 0; j < d; ++j) target(i, j) += vi * ed.vectors(j, k);
        }
    }
}

class Cholesky {
public:
    explicit Cholesky(const Matrix& a) : l_(a.rows(), a.rows()) {
        const std::size_t n = a.rows();
        for (std::size_t j = 0; j < n; ++j) {
            double d = a(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (!(d > 0.0)) throw Error("opt_apps", ErrorCode::internal, "constraint Gram matrix is singular");
            l_(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < n; ++i) {
                double s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        const std::size_t n = b.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) b[i] -= l_(i, k) * b[k];
            b[i] /= l_(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) b[i] -= l_(k, i) * b[k];
            b[i] /= l_(i, i);
        }
        return b;
    }

private:
    Matrix l_;
};

}  // namespace

SdpResult solve_sdp(const QuadProblem& problem, const SdpOptions& options) {
    if (!(options.tol > 0.0)) throw Error("opt_apps", ErrorCode::invalid_argument, "tolerance must be positive");
    if (!(options.relaxation > 0.0 && options.relaxation < 1.618))
        throw Error("opt_apps", ErrorCode::invalid_argument, "relaxation must lie in (0, 1.618)");

    const std::size_t M = problem.rows();
    const std::size_t N = problem.cols();
    const std::size_t ineq = problem.inequality_terms().size();

    // C vec X = 0 is eliminated by writing Y = W Z W^T with W an orthonormal
    // basis of null(C); Z then has a strictly feasible point.
    Matrix w = Matrix::identity(problem.dim());
    if (problem.has_equality()) {
        const Matrix& cm = problem.equality_map();
        const EigenDecomposition ed = sym_eig(SymMatrix(cm.transpose() * cm));
        const double cut = 1e-10 * std::max(1.0, ed.values.front());
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < ed.values.size(); ++k)
            if (ed.values[k] <= cut) keep.push_back(k);
        if (keep.empty()) {
            SdpResult trivial;
            trivial.y_hat = SymMatrix::zero(problem.dim());
            trivial.converged = true;
            trivial.residuals = constraint_residuals(problem, trivial.y_hat);
            trivial.residual_history.push_back(trivial.residuals.max_primal());
            return trivial;
        }
        w = Matrix(problem.dim(), keep.size());
        for (std::size_t i = 0; i < problem.dim(); ++i)
            for (std::size_t k = 0; k < keep.size(); ++k) w(i, k) = ed.vectors(i, keep[k]);
    }
    const Matrix wt = w.transpose();
    const std::size_t n = w.cols();
    const auto reduce = [&](const Matrix& a) { return wt * a * w; };
    const auto lift = [&](const Matrix& z) { return SymMatrix(w * z * wt); };

    std::vector<Block> rows;
    std::vector<double> rhs;
    const std::size_t full = problem.dim();
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t mp = m; mp < M; ++mp) {
            Block a = zero_block(n, M, N, ineq);
            const double h = m == mp ? 1.0 : 0.5;
            Matrix pattern(full, full);
            for (std::size_t c = 0; c < N; ++c) {
                pattern(c * M + m, c * M + mp) += h;
                if (m != mp) pattern(c * M + mp, c * M + m) += h;
            }
            a.y = reduce(pattern);
            a.zs(m, mp) += h;
            if (m != mp) a.zs(mp, m) += h;
            rows.push_back(std::move(a));
            rhs.push_back(m == mp ? 1.0 : 0.0);
        }
    for (std::size_t c = 0; c < N; ++c)
        for (std::size_t cp = c; cp < N; ++cp) {
            Block a = zero_block(n, M, N, ineq);
            const double h = c == cp ? 1.0 : 0.5;
            Matrix pattern(full, full);
            for (std::size_t m = 0; m < M; ++m) {
                pattern(c * M + m, cp * M + m) += h;
                if (c != cp) pattern(cp * M + m, c * M + m) += h;
            }
            a.y = reduce(pattern);
            a.zt(c, cp) += h;
            if (c != cp) a.zt(cp, c) += h;
            rows.push_back(std::move(a));
            rhs.push_back(c == cp ? 1.0 : 0.0);
        }
    for (std::size_t i = 0; i < ineq; ++i) {
        Block a = zero_block(n, M, N, ineq);
        a.y = reduce(problem.inequality_terms()[i].matrix());
        a.s[i] = 1.0;
        rows.push_back(std::move(a));
        rhs.push_back(1.0);
    }
    const std::size_t m_rows = rows.size();

    Matrix gram(m_rows, m_rows);
    for (std::size_t i = 0; i < m_rows; ++i)
        for (std::size_t j = i; j < m_rows; ++j) gram(i, j) = gram(j, i) = dot(rows[i], rows[j]);
    const Cholesky chol(gram);

    const auto apply = [&](const Block& x) {
        std::vector<double> out(m_rows);
        for (std::size_t j = 0; j < m_rows; ++j) out[j] = dot(rows[j], x);
        return out;
    };
    const auto adjoint = [&](const std::vector<double>& y) {
        Block out = zero_block(n, M, N, ineq);
        for (std::size_t j = 0; j < m_rows; ++j)
            if (y[j] != 0.0) axpy(out, rows[j], y[j]);
        return out;
    };

    const double c_scale = std::max(1.0, problem.objective().matrix().frobenius());
    Block cobj = zero_block(n, M, N, ineq);
    cobj.y = reduce(problem.objective().matrix());
    scale(cobj, 1.0 / c_scale);
    double b_norm = 0.0;
    for (double v : rhs) b_norm += v * v;
    b_norm = std::sqrt(b_norm);
    const double c_norm = norm(cobj);

    Block x = zero_block(n, M, N, ineq);
    Block s = zero_block(n, M, N, ineq);
    Block x_hat = zero_block(n, M, N, ineq);
    std::vector<double> y(m_rows, 0.0);
    double mu = 1.0;
    const double rho = options.relaxation;
    double pinf_acc = 0.0;
    double dinf_acc = 0.0;

    SdpResult result;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        Block s_minus_c = s;
        axpy(s_minus_c, cobj, -1.0);
        const std::vector<double> ax = apply(x);
        const std::vector<double> asc = apply(s_minus_c);
        std::vector<double> r(m_rows);
        for (std::size_t j = 0; j < m_rows; ++j) r[j] = -(mu * (ax[j] - rhs[j]) + asc[j]);
        y = chol.solve(std::move(r));

        Block v = cobj;
        axpy(v, adjoint(y), -1.0);
        axpy(v, x, -mu);

        split(v.y, mu, s.y, x_hat.y);
        split(v.zs, mu, s.zs, x_hat.zs);
        split(v.zt, mu, s.zt, x_hat.zt);
        for (std::size_t i = 0; i < ineq; ++i) {
            s.s[i] = std::max(v.s[i], 0.0);
            x_hat.s[i] = std::max(-v.s[i], 0.0) / mu;
        }

        // Dual residual C - A*y - S = mu (X - X_hat), with the previous X.
        Block dres = x;
        axpy(dres, x_hat, -1.0);
        const double dinf = mu * norm(dres) / (1.0 + c_norm);

        scale(x, 1.0 - rho);
        axpy(x, x_hat, rho);

        const std::vector<double> axh = apply(x_hat);
        double pinf = 0.0;
        for (std::size_t j = 0; j < m_rows; ++j) pinf += (axh[j] - rhs[j]) * (axh[j] - rhs[j]);
        pinf = std::sqrt(pinf) / (1.0 + b_norm);
        const double pobj = dot(cobj, x_hat);
        double dobj = 0.0;
        for (std::size_t j = 0; j < m_rows; ++j) dobj += rhs[j] * y[j];
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        pinf_acc += pinf;
        dinf_acc += dinf;
        if (it % 20 == 0) {
            const double ratio = pinf_acc / std::max(dinf_acc, 1e-300);
            if (ratio < 0.2) mu = std::max(mu * 0.7, 1e-4);
            else if (ratio > 5.0) mu = std::min(mu / 0.7, 1e4);
            pinf_acc = dinf_acc = 0.0;
        }

        const bool last = it == options.max_iter;
        if ((pinf <= options.tol && dinf <= options.tol && gap <= options.tol && it % 10 == 0) || last) {
            const SymMatrix yh = lift(x_hat.y);
            SdpResiduals res = constraint_residuals(problem, yh);
            res.dual = dinf;
            res.gap = gap;
            result.residual_history.push_back(res.max_primal());
            result.iterations = it;
            result.residuals = res;
            result.y_hat = yh;
            if (res.max_primal() <= options.tol && dinf <= options.tol && gap <= options.tol) {
                result.converged = true;
                break;
            }
        }
    }
    result.theta_hat = inner(problem.objective().matrix(), result.y_hat.matrix());
    return result;
}

}  // namespace idseries
