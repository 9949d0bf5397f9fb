#include "gplab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gplab {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool Matrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix shape mismatch in +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix shape mismatch in -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

namespace {

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    const std::size_t n = b.cols();
    const std::size_t k = a.cols();
    double* ci = c.row_ptr(i);
    const double* ai = a.row_ptr(i);
    for (std::size_t p = 0; p < k; ++p) {
        const double aip = ai[p];
        if (aip == 0.0) continue;
        const double* bp = b.row_ptr(p);
        for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
}

} // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    const long long m = static_cast<long long>(a.rows());
#pragma omp parallel for schedule(static) if (m * (long long)b.cols() * (long long)a.cols() > 32768)
    for (long long i = 0; i < m; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
    return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

EigenDecomposition sym_eig(const Matrix& v) {
    if (v.rows() != v.cols())
        throw std::invalid_argument("sym_eig: matrix is not square (" +
                                    std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + ")");
    if (!v.is_symmetric(1e-10))
        throw std::invalid_argument("sym_eig: matrix is not symmetric within 1e-10");

    const std::size_t n = v.rows();
    Matrix a = v;
    Matrix q = Matrix::identity(n);

    // cyclic Jacobi sweeps
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
        if (std::sqrt(2.0 * off) <= 1e-14 * (1.0 + a.frobenius_norm())) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                double apq = a(p, r);
                if (apq == 0.0) continue;
                double app = a(p, p), aqq = a(r, r);
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                        : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, r);
                    a(i, p) = c * aip - s * aiq;
                    a(i, r) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    double apj = a(p, j), aqj = a(r, j);
                    a(p, j) = c * apj - s * aqj;
                    a(r, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double qip = q(i, p), qiq = q(i, r);
                    q(i, p) = c * qip - s * qiq;
                    q(i, r) = s * qip + c * qiq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = q(i, order[k]);
    }
    return out;
}

SvdResult svd_decompose(const Matrix& m) {
    if (!m.all_finite()) throw std::invalid_argument("svd_decompose: non-finite input");

    const bool transposed = m.rows() < m.cols();
    Matrix a = transposed ? m.transpose() : m;
    const std::size_t rows = a.rows();
    const std::size_t n = a.cols();

    Matrix v = Matrix::identity(n);

    // one-sided Jacobi: orthogonalize the columns of a
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    double ap = a(i, p), aq = a(i, q);
                    alpha += ap * ap;
                    beta += aq * aq;
                    gamma += ap * aq;
                }
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                rotated = true;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = ((zeta >= 0.0) ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    double ap = a(i, p), aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += a(i, j) * a(i, j);
        sigma[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&sigma](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    Matrix u(rows, n);
    Matrix vt(n, n);
    std::vector<double> sv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t j = order[k];
        sv[k] = sigma[j];
        if (sigma[j] > 0.0) {
            for (std::size_t i = 0; i < rows; ++i) u(i, k) = a(i, j) / sigma[j];
        } else {
            // column of the null space; leave the u column zero
        }
        for (std::size_t i = 0; i < n; ++i) vt(k, i) = v(i, j);
    }

    SvdResult out;
    if (transposed) {
        out.u = vt.transpose();
        out.vt = u.transpose();
    } else {
        out.u = std::move(u);
        out.vt = std::move(vt);
    }
    out.singular_values = std::move(sv);
    return out;
}

Matrix rank_project(const Matrix& m, std::size_t target_rank) {
    const std::size_t rmax = std::min(m.rows(), m.cols());
    if (target_rank > rmax)
        throw std::invalid_argument("rank_project: target_rank " + std::to_string(target_rank) +
                                    " exceeds min(rows, cols) = " + std::to_string(rmax));
    SvdResult svd = svd_decompose(m);
    Matrix out(m.rows(), m.cols());
    for (std::size_t k = 0; k < target_rank; ++k) {
        double s = svd.singular_values[k];
        if (s == 0.0) continue;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double us = svd.u(i, k) * s;
            if (us == 0.0) continue;
            for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += us * svd.vt(k, j);
        }
    }
    return out;
}

std::size_t numerical_rank(const Matrix& m, double tol) {
    SvdResult svd = svd_decompose(m);
    std::size_t r = 0;
    for (double s : svd.singular_values)
        if (s > tol) ++r;
    return r;
}

std::vector<double> solve_row_system(const Matrix& a, const std::vector<double>& b, double rcond) {
    // x^T a = b^T  <=>  a^T x = b
    if (a.cols() != b.size()) throw std::invalid_argument("solve_row_system: dimension mismatch");
    SvdResult svd = svd_decompose(a);
    const std::size_t r = svd.singular_values.size();
    double smax = r ? svd.singular_values[0] : 0.0;
    // a = U S Vt, a^T = V S U^T, pinv(a^T) = U S^+ V^T
    std::vector<double> tmp(r, 0.0);
    for (std::size_t k = 0; k < r; ++k) {
        if (svd.singular_values[k] <= rcond * smax) continue;
        double dot = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) dot += svd.vt(k, j) * b[j];
        tmp[k] = dot / svd.singular_values[k];
    }
    std::vector<double> x(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < r; ++k) s += svd.u(i, k) * tmp[k];
        x[i] = s;
    }
    return x;
}

} // namespace gplab
