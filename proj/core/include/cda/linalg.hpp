#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cda/errors.hpp"

namespace cda {

/// Dense row-major matrix of doubles. Row count may be large (samples),
/// column count is the feature dimension.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::int64_t rows, std::int64_t cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0.0) {
        if (rows < 0 || cols < 0) throw InvalidArgument("Matrix: negative dimension");
    }

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }

    double* row(std::int64_t i) { return data_.data() + i * cols_; }
    const double* row(std::int64_t i) const { return data_.data() + i * cols_; }

    std::span<double> row_span(std::int64_t i) {
        return {row(i), static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row_span(std::int64_t i) const {
        return {row(i), static_cast<std::size_t>(cols_)};
    }

    double& operator()(std::int64_t i, std::int64_t j) { return data_[i * cols_ + j]; }
    double operator()(std::int64_t i, std::int64_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric p x p matrix, full dense storage. All mutators keep
/// entries(i,j) == entries(j,i).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
        if (dim < 1) throw InvalidArgument("SymMatrix: dim must be >= 1");
    }

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * dim_ + j] = v;
        a_[static_cast<std::size_t>(j) * dim_ + i] = v;
    }

    void add(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * dim_ + j] += v;
        if (i != j) a_[static_cast<std::size_t>(j) * dim_ + i] += v;
    }

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    static SymMatrix identity(int dim) {
        SymMatrix s(dim);
        for (int i = 0; i < dim; ++i) s.set(i, i, 1.0);
        return s;
    }

    /// S += w * A^T A, accumulating over the rows of A. Blocked over
    /// sample rows; only the upper triangle is built, mirrored on exit.
    void rank_update(const Matrix& a, double w);

    /// S += w * v v^T (w may be negative, used for the centering identity).
    void rank1_update(std::span<const double> v, double w);

    /// y = S x.
    void multiply(std::span<const double> x, std::span<double> y) const;

private:
    int dim_ = 0;
    std::vector<double> a_;
};

/// Lower-triangular Cholesky factor of S + gamma*I. One factorization
/// serves both solves and the log-determinant.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    /// Throws NotPositiveDefinite if a pivot is <= 0.
    CholeskyFactor(const SymMatrix& s, double gamma);

    int dim() const { return dim_; }

    /// Solves (S + gamma*I) x = b.
    std::vector<double> solve(std::span<const double> b) const;

    /// Forward substitution only: y = L^{-1} b, so that |y|^2 is the
    /// quadratic form b^T (S + gamma*I)^{-1} b.
    void forward_solve(std::span<const double> b, std::span<double> y) const;

    /// log|S + gamma*I| = sum_i 2*log(L_ii).
    double logdet() const;

private:
    int dim_ = 0;
    std::vector<double> l_; // row-major lower triangle, full square storage
};

/// Solves (S + gamma*I) x = b by Cholesky factorization.
/// Throws NotPositiveDefinite when the factorization hits a pivot <= 0,
/// which signals gamma too small for a rank-deficient S.
std::vector<double> ridge_solve(const SymMatrix& s, double gamma, std::span<const double> b);

/// log|S + gamma*I| from the Cholesky factor.
double logdet_pd(const SymMatrix& s, double gamma);

/// Projects the rows of X onto the two leading eigenvectors of the
/// column-centered sample covariance of X. Eigenvalues are taken in
/// descending order and each eigenvector is sign-fixed so its first
/// nonzero loading is positive. An identically-zero covariance (all
/// rows equal) yields all-zero projections. Throws DegenerateSpectrum
/// when the covariance has non-finite entries.
Matrix pca_top2(const Matrix& x);

double dot(std::span<const double> a, std::span<const double> b);

/// Quadratic form v^T S v.
double quad_form(const SymMatrix& s, std::span<const double> v);

} // namespace cda
