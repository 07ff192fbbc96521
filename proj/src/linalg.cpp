#include "cusp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/kernels.hpp"

namespace cusp {
namespace {

// One factorization attempt; returns false on a non-positive or non-finite pivot.
bool try_factor(const Matrix& a, double jitter, Matrix& l) {
    const std::size_t n = a.rows();
    l = Matrix(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) + jitter - kernels::sumsq(l.row(j), j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double s = a(i, j) - kernels::dot(l.row(i), l.row(j), j);
            l(i, j) = s / ljj;
        }
    }
    return true;
}

}  // namespace

Cholesky Cholesky::factor(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix must be square");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    double min_diag = n ? a(0, 0) : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        max_diag = std::max(max_diag, a(j, j));
        min_diag = std::min(min_diag, a(j, j));
    }

    Cholesky out;
    if (try_factor(a, 0.0, out.l_)) return out;
    const double base = (max_diag > 0.0) ? max_diag : 1.0;
    for (double scale = 1e-10; scale <= 1e-6 * 1.0000001; scale *= 10.0) {
        const double jitter = scale * base;
        if (try_factor(a, jitter, out.l_)) {
            out.jitter_ = jitter;
            return out;
        }
    }
    std::ostringstream msg;
    msg << "cholesky: factorization failed for " << n << "x" << n
        << " matrix after jitter up to " << 1e-6 * base << " (diagonal range ["
        << min_diag << ", " << max_diag << "])";
    throw NumericalError(msg.str());
}

void Cholesky::solve_in_place(std::vector<double>& b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw ShapeError("cholesky solve: size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        b[i] = (b[i] - kernels::dot(l_.row(i), b.data(), i)) / l_(i, i);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * b[k];
        b[i] = s / l_(i, i);
    }
}

void Cholesky::solve_transposed_in_place(std::vector<double>& b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw ShapeError("cholesky solve: size mismatch");
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * b[k];
        b[i] = s / l_(i, i);
    }
}

void Cholesky::multiply(std::span<const double> x, std::vector<double>& y) const {
    const std::size_t n = l_.rows();
    if (x.size() != n) throw ShapeError("cholesky multiply: size mismatch");
    y.resize(n);
    for (std::size_t i = n; i-- > 0;)
        y[i] = kernels::dot(l_.row(i), x.data(), i + 1);
}

}  // namespace cusp
