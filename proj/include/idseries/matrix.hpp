#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace idseries {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    double max_abs() const noexcept;
    double frobenius() const noexcept;
    double trace() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double c) noexcept;
    /// this += c * other
    Matrix& add_scaled(const Matrix& other, double c);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double c, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Trace inner product tr(A^T B).
double inner(const Matrix& a, const Matrix& b);

/// Column-major vec: entry (m, n) of an M x N matrix lands at index n*M + m.
std::vector<double> vec(const Matrix& x);
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);
Matrix outer(std::span<const double> a, std::span<const double> b);

/// Square matrix that is symmetric to within 1e-12 * max(1, max|A_ij|).
/// Construction stores the exact symmetric part (A + A^T)/2.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix a);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

    static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
    static SymMatrix zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }

    std::size_t dim() const noexcept { return a_.rows(); }
    const Matrix& matrix() const noexcept { return a_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_(i, j); }

private:
    Matrix a_;
};

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i pairs with values[i]
};

/// Cyclic Jacobi with a threshold sweep; stops when the off-diagonal
/// Frobenius mass drops below 1e-14 * ||A||_F.
EigenDecomposition sym_eig(const SymMatrix& a);
std::vector<double> sym_eigenvalues(const SymMatrix& a);
double lambda_max(const SymMatrix& a);
double lambda_min(const SymMatrix& a);

/// V f(diag) V^T for a spectral function applied to eigenvalues.
SymMatrix psd_sqrt(const SymMatrix& a, double clamp_tol = 1e-10);
SymMatrix inv_sqrt(const SymMatrix& a);

/// [[0, A], [A^T, 0]].
SymMatrix dilation(const Matrix& a);
/// Largest singular value, computed as lambda_max of the dilation.
double spectral_norm(const Matrix& a);

/// Fixed self-adjoint coefficients A_1..A_K with lambda_max(A_k) <= 1.
class MatrixSeries {
public:
    explicit MatrixSeries(std::vector<SymMatrix> terms);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<SymMatrix>& terms() const noexcept { return terms_; }
    /// lambda_max(sum A_k^2), computed once at construction.
    double rho() const noexcept { return rho_; }

    /// sum_k xi_k A_k.
    SymMatrix combine(std::span<const double> xi) const;

private:
    std::vector<SymMatrix> terms_;
    std::size_t dim_ = 0;
    double rho_ = 0.0;
};

struct RescaledSeries {
    MatrixSeries series;
    double scale;  // every input term was divided by this
};

/// Divides all terms by max_k lambda_max(D(A_k)) = max_k ||A_k||, so the
/// spectrum of every term lies in [-1, 1].
RescaledSeries auto_rescale(const std::vector<SymMatrix>& terms);

double series_rho(const MatrixSeries& series);

/// lambda_max(sum D(A_k)^2) for rectangular M x N terms with ||A_k|| <= 1.
double rect_series_rho1(std::span<const Matrix> terms);

}  // namespace idseries
