#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gplab {

/// Dense row-major matrix. Desk-scale sizes only (a few hundred rows), so
/// everything is stored densely and copies are cheap enough to keep value
/// semantics throughout.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;
    bool is_symmetric(double tol) const;

    Matrix transpose() const;
    double frobenius_norm() const;
    double trace() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
    friend Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }
    friend Matrix operator*(Matrix a, double s) { a *= s; return a; }
    friend Matrix operator*(double s, Matrix a) { a *= s; return a; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A * B, serial reference kernel.
Matrix matmul_serial(const Matrix& a, const Matrix& b);

/// C = A * B, rows dispatched across OpenMP threads. Per-row arithmetic is
/// identical to the serial kernel, so results are bitwise equal for any
/// thread count.
Matrix matmul(const Matrix& a, const Matrix& b);

/// y = A * x.
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

struct EigenDecomposition {
    std::vector<double> eigenvalues; // sorted descending
    Matrix eigenvectors;             // columns aligned with eigenvalues
};

/// Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.
/// Rejects non-square or asymmetric (beyond 1e-10) input.
EigenDecomposition sym_eig(const Matrix& v);

struct SvdResult {
    Matrix u;                           // m x r, orthonormal columns
    std::vector<double> singular_values; // descending, length min(m, n)
    Matrix vt;                          // r x n, orthonormal rows
};

/// Thin SVD via one-sided Jacobi orthogonalization.
SvdResult svd_decompose(const Matrix& m);

/// Frobenius-nearest matrix of rank exactly target_rank (trailing singular
/// values zeroed).
Matrix rank_project(const Matrix& m, std::size_t target_rank);

/// Count of singular values above tol (default matches the rank bookkeeping
/// used throughout).
std::size_t numerical_rank(const Matrix& m, double tol = 1e-8);

/// Least-squares solve x^T A = b^T via SVD pseudo-inverse (row-vector form).
std::vector<double> solve_row_system(const Matrix& a, const std::vector<double>& b,
                                     double rcond = 1e-10);

} // namespace gplab
