#include "cusp/distributions.hpp"

#include <cmath>
#include <limits>

#include "cusp/errors.hpp"
#include "cusp/kernels.hpp"

namespace cusp::prob {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double sample_std_normal(RngStream& rng) {
    // Marsaglia polar method; the spare value is discarded so the stream
    // consumption per call depends only on the rejection path.
    for (;;) {
        const double u = 2.0 * rng.next_double() - 1.0;
        const double v = 2.0 * rng.next_double() - 1.0;
        const double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) continue;
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double sample_normal(RngStream& rng, double mean, double sd) {
    if (!(sd >= 0.0)) throw DomainError("sample_normal: sd must be non-negative");
    return mean + sd * sample_std_normal(rng);
}

double sample_gamma(RngStream& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw DomainError("sample_gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // Boost through shape+1 and scale by U^{1/shape}.
        const double g = sample_gamma(rng, shape + 1.0, 1.0);
        const double u = rng.next_open();
        return g * std::pow(u, 1.0 / shape) / rate;
    }
    // Marsaglia-Tsang squeeze method.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_std_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_inv_gamma(RngStream& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw DomainError("sample_inv_gamma: shape and rate must be positive");
    return 1.0 / sample_gamma(rng, shape, rate);
}

double sample_beta(RngStream& rng, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("sample_beta: both shapes must be positive");
    if (a == 1.0) return -std::expm1(std::log1p(-rng.next_open()) / b);
    if (b == 1.0) return std::pow(rng.next_open(), 1.0 / a);
    const double x = sample_gamma(rng, a, 1.0);
    const double y = sample_gamma(rng, b, 1.0);
    return x / (x + y);
}

double log_density_iso_gaussian(std::span<const double> x, const IsoGaussianSpec& spec) {
    if (x.size() != spec.dim) throw ShapeError("iso gaussian density: dimension mismatch");
    if (!(spec.theta > 0.0)) throw DomainError("iso gaussian density: theta must be positive");
    const double ss = kernels::sumsq(x.data(), x.size());
    const double p = static_cast<double>(spec.dim);
    return -0.5 * p * (kLog2Pi + std::log(spec.theta)) - 0.5 * ss / spec.theta;
}

double log_density_iso_student(std::span<const double> x, const IsoStudentSpec& spec) {
    if (x.size() != spec.dim) throw ShapeError("iso student density: dimension mismatch");
    if (!(spec.shape > 0.0) || !(spec.rate > 0.0))
        throw DomainError("iso student density: shape and rate must be positive");
    const double ss = kernels::sumsq(x.data(), x.size());
    const double p = static_cast<double>(spec.dim);
    const double a = spec.shape;
    const double b = spec.rate;
    return -0.5 * p * kLog2Pi + a * std::log(b) + std::lgamma(a + 0.5 * p) -
           std::lgamma(a) - (a + 0.5 * p) * std::log(b + 0.5 * ss);
}

double log_sum_exp(std::span<const double> x) {
    double m = -kInf;
    for (double v : x)
        if (v > m) m = v;
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

std::size_t sample_categorical_log(std::span<const double> logw, RngStream& rng) {
    if (logw.empty()) throw DomainError("sample_categorical_log: empty weight vector");
    double m = -kInf;
    for (double v : logw)
        if (v > m) m = v;
    if (m == -kInf)
        throw DegenerateDistributionError(
            "sample_categorical_log: all log-weights are -inf");
    double total = 0.0;
    for (double v : logw) total += std::exp(v - m);
    const double u = rng.next_double() * total;
    double cum = 0.0;
    for (std::size_t l = 0; l < logw.size(); ++l) {
        cum += std::exp(logw[l] - m);
        if (u < cum) return l;
    }
    // Round-off can leave u marginally above the accumulated total; return the
    // last index with positive weight.
    for (std::size_t l = logw.size(); l-- > 0;)
        if (logw[l] > -kInf) return l;
    return logw.size() - 1;
}

std::vector<double> sample_mvn(std::span<const double> mean, const Matrix& cov,
                               RngStream& rng) {
    if (cov.rows() != cov.cols() || cov.rows() != mean.size())
        throw ShapeError("sample_mvn: dimension mismatch");
    const Cholesky chol = Cholesky::factor(cov);
    std::vector<double> z(mean.size());
    for (auto& v : z) v = sample_std_normal(rng);
    std::vector<double> y;
    chol.multiply(z, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += mean[i];
    return y;
}

std::vector<double> sample_mvn_from_precision_chol(std::span<const double> mean,
                                                   const Cholesky& prec_chol,
                                                   RngStream& rng) {
    if (prec_chol.dim() != mean.size())
        throw ShapeError("sample_mvn_from_precision_chol: dimension mismatch");
    std::vector<double> z(mean.size());
    for (auto& v : z) v = sample_std_normal(rng);
    prec_chol.solve_transposed_in_place(z);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += mean[i];
    return z;
}

namespace {

// Lower regularized incomplete gamma by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_gamma_lower(double a, double x) {
    if (!(a > 0.0)) throw DomainError("reg_gamma_lower: a must be positive");
    if (x < 0.0) throw DomainError("reg_gamma_lower: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double reg_gamma_upper(double a, double x) {
    if (!(a > 0.0)) throw DomainError("reg_gamma_upper: a must be positive");
    if (x < 0.0) throw DomainError("reg_gamma_upper: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double inv_gamma_cdf(double shape, double rate, double x) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw DomainError("inv_gamma_cdf: shape and rate must be positive");
    if (x <= 0.0) return 0.0;
    return reg_gamma_upper(shape, rate / x);
}

}  // namespace cusp::prob
