#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cusp {

// Row-major dense matrix of doubles. Rows are contiguous so they can feed the
// kernels directly.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    double* row(std::size_t i) { return d_.data() + i * cols_; }
    const double* row(std::size_t i) const { return d_.data() + i * cols_; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    void col_copy(std::size_t j, std::vector<double>& out) const {
        out.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = d_[i * cols_ + j];
    }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
//
// On a non-positive pivot the factorization retries with diagonal jitter
// 1e-10 * max(diag), escalating tenfold up to 1e-6 * max(diag), then throws
// NumericalError with a report of the matrix diagonal range.
class Cholesky {
public:
    static Cholesky factor(const Matrix& a);

    // Solve A x = b through the factor (forward then backward substitution).
    void solve_in_place(std::vector<double>& b) const;
    // Solve L^T x = b (used to sample from a precision factorization).
    void solve_transposed_in_place(std::vector<double>& b) const;
    // Multiply y = L x (used to sample from a covariance factorization).
    void multiply(std::span<const double> x, std::vector<double>& y) const;

    const Matrix& lower() const { return l_; }
    double jitter() const { return jitter_; }
    std::size_t dim() const { return l_.rows(); }

private:
    Matrix l_;
    double jitter_ = 0.0;
};

}  // namespace cusp
