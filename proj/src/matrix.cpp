#include "idseries/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "idseries/error.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "matrix";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(kModule, code, msg); }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorCode::dimension_mismatch, std::string(what) + ": shape mismatch");
}

// In-place cyclic Jacobi on a symmetric n x n buffer. Rotations are
// accumulated into `v` when it is non-null.
void jacobi(Matrix& a, Matrix* v) {
    const std::size_t n = a.rows();
    const double norm = a.frobenius();
    if (n < 2 || norm == 0.0) return;
    const double stop = 1e-14 * norm;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        off = std::sqrt(off);
        if (off <= stop) return;
        // early sweeps only rotate the larger entries
        const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= thresh || apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double g = a(k, p);
                    const double h = a(k, q);
                    a(k, p) = c * g - s * h;
                    a(k, q) = s * g + c * h;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double g = a(p, k);
                    const double h = a(q, k);
                    a(p, k) = c * g - s * h;
                    a(q, k) = s * g + c * h;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (v != nullptr) {
                    Matrix& vv = *v;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double g = vv(k, p);
                        const double h = vv(k, q);
                        vv(k, p) = c * g - s * h;
                        vv(k, q) = s * g + c * h;
                    }
                }
            }
        }
    }
    fail(ErrorCode::not_converged, "Jacobi eigensolver exceeded 100 sweeps");
}

SymMatrix spectral_map(const SymMatrix& a, double (*f)(double)) {
    const EigenDecomposition e = sym_eig(a);
    const std::size_t n = a.dim();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        if (fk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = fk * e.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * e.vectors(j, k);
        }
    }
    return SymMatrix(std::move(out));
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) fail(ErrorCode::dimension_mismatch, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::frobenius() const noexcept {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::trace() const {
    if (!square()) fail(ErrorCode::dimension_mismatch, "trace of a non-square matrix");
    double t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double c) noexcept {
    for (double& x : data_) x *= c;
    return *this;
}

Matrix& Matrix::add_scaled(const Matrix& other, double c) {
    require_same_shape(*this, other, "add_scaled");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += c * other.data_[i];
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double c, Matrix a) { return a *= c; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(ErrorCode::dimension_mismatch, "matrix product: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) fail(ErrorCode::dimension_mismatch, "matrix-vector product: size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

double inner(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "inner");
    return std::inner_product(a.data().begin(), a.data().end(), b.data().begin(), 0.0);
}

std::vector<double> vec(const Matrix& x) {
    std::vector<double> v(x.rows() * x.cols());
    for (std::size_t n = 0; n < x.cols(); ++n)
        for (std::size_t m = 0; m < x.rows(); ++m) v[n * x.rows() + m] = x(m, n);
    return v;
}

Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) fail(ErrorCode::dimension_mismatch, "unvec: length is not rows*cols");
    Matrix x(rows, cols);
    for (std::size_t n = 0; n < cols; ++n)
        for (std::size_t m = 0; m < rows; ++m) x(m, n) = v[n * rows + m];
    return x;
}

Matrix outer(std::span<const double> a, std::span<const double> b) {
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

SymMatrix::SymMatrix(Matrix a) : a_(std::move(a)) {
    if (!a_.square()) fail(ErrorCode::dimension_mismatch, "symmetric matrix must be square");
    const double tol = 1e-12 * std::max(1.0, a_.max_abs());
    const std::size_t n = a_.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(std::abs(a_(i, j) - a_(j, i)) <= tol)) {
                std::ostringstream os;
                os << "matrix is not symmetric at (" << i << "," << j << ")";
                fail(ErrorCode::invalid_argument, os.str());
            }
            const double mean = 0.5 * (a_(i, j) + a_(j, i));
            a_(i, j) = mean;
            a_(j, i) = mean;
        }
}

EigenDecomposition sym_eig(const SymMatrix& a) {
    const std::size_t n = a.dim();
    Matrix work = a.matrix();
    Matrix v = Matrix::identity(n);
    jacobi(work, &v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return work(i, i) > work(j, j); });

    EigenDecomposition e{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        e.values[k] = work(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) e.vectors(i, k) = v(i, order[k]);
    }
    return e;
}

std::vector<double> sym_eigenvalues(const SymMatrix& a) {
    Matrix work = a.matrix();
    jacobi(work, nullptr);
    std::vector<double> vals(a.dim());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = work(i, i);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

double lambda_max(const SymMatrix& a) {
    if (a.dim() == 0) fail(ErrorCode::dimension_mismatch, "lambda_max of an empty matrix");
    return sym_eigenvalues(a).front();
}

double lambda_min(const SymMatrix& a) {
    if (a.dim() == 0) fail(ErrorCode::dimension_mismatch, "lambda_min of an empty matrix");
    return sym_eigenvalues(a).back();
}

SymMatrix psd_sqrt(const SymMatrix& a, double clamp_tol) {
    const std::vector<double> vals = sym_eigenvalues(a);
    if (!vals.empty() && vals.back() < -clamp_tol * std::max(1.0, std::abs(vals.front()))) {
        std::ostringstream os;
        os.precision(17);
        os << "psd_sqrt: eigenvalue " << vals.back() << " is below the clamping tolerance";
        fail(ErrorCode::range, os.str());
    }
    return spectral_map(a, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

SymMatrix inv_sqrt(const SymMatrix& a) {
    if (!(lambda_min(a) > 1e-10)) fail(ErrorCode::invalid_argument, "inv_sqrt requires a positive definite matrix");
    return spectral_map(a, [](double x) { return 1.0 / std::sqrt(x); });
}

SymMatrix dilation(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix d(m + n, m + n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            d(i, m + j) = a(i, j);
            d(m + j, i) = a(i, j);
        }
    return SymMatrix(std::move(d));
}

double spectral_norm(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return std::max(0.0, lambda_max(dilation(a)));
}

MatrixSeries::MatrixSeries(std::vector<SymMatrix> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) fail(ErrorCode::invalid_argument, "matrix series needs at least one term");
    dim_ = terms_.front().dim();
    Matrix squares(dim_, dim_);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const SymMatrix& a = terms_[k];
        if (a.dim() != dim_) fail(ErrorCode::dimension_mismatch, "series terms have different dimensions");
        const double top = lambda_max(a);
        if (top > 1.0 + 1e-10) {
            std::ostringstream os;
            os.precision(17);
            os << "series term " << k << " has lambda_max " << top << " > 1";
            fail(ErrorCode::invalid_argument, os.str());
        }
        squares += a.matrix() * a.matrix();
    }
    rho_ = std::max(0.0, lambda_max(SymMatrix(std::move(squares))));
}

SymMatrix MatrixSeries::combine(std::span<const double> xi) const {
    if (xi.size() != terms_.size()) fail(ErrorCode::dimension_mismatch, "combine: one coefficient per term required");
    Matrix s(dim_, dim_);
    for (std::size_t k = 0; k < terms_.size(); ++k)
        if (xi[k] != 0.0) s.add_scaled(terms_[k].matrix(), xi[k]);
    return SymMatrix(std::move(s));
}

RescaledSeries auto_rescale(const std::vector<SymMatrix>& terms) {
    double scale = 0.0;
    for (const SymMatrix& a : terms) scale = std::max(scale, spectral_norm(a.matrix()));
    if (!(scale > 0.0)) fail(ErrorCode::invalid_argument, "auto_rescale: all terms are zero");
    std::vector<SymMatrix> out;
    out.reserve(terms.size());
    for (const SymMatrix& a : terms) out.emplace_back((1.0 / scale) * a.matrix());
    return {MatrixSeries(std::move(out)), scale};
}

double series_rho(const MatrixSeries& series) { return series.rho(); }

double rect_series_rho1(std::span<const Matrix> terms) {
    if (terms.empty()) fail(ErrorCode::invalid_argument, "rect_series_rho1 needs at least one term");
    const std::size_t m = terms.front().rows();
    const std::size_t n = terms.front().cols();
    Matrix sum(m + n, m + n);
    for (const Matrix& a : terms) {
        if (a.rows() != m || a.cols() != n) fail(ErrorCode::dimension_mismatch, "rectangular terms differ in shape");
        const SymMatrix d = dilation(a);
        if (lambda_max(d) > 1.0 + 1e-10) fail(ErrorCode::invalid_argument, "rect_series_rho1 requires ||A_k|| <= 1");
        sum += d.matrix() * d.matrix();
    }
    return std::max(0.0, lambda_max(SymMatrix(std::move(sum))));
}

}  // namespace idseries
