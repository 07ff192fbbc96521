#pragma once

// Monte Carlo helpers shared by the statistical tests.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace testsupport {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Sample mean with its iid standard error.
inline MeanSe mean_se(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double var = 0.0;
    for (double v : x) var += (v - m) * (v - m);
    var /= (n - 1.0);
    return {m, std::sqrt(var / n)};
}

inline double binomial_se(double phat, std::size_t n) {
    return std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
}

// Upper 0.001 chi-square critical values for df = 1..9.
inline double chi_square_crit_999(std::size_t df) {
    static const double crit[] = {10.828, 13.816, 16.266, 18.467, 20.515,
                                  22.458, 24.322, 26.124, 27.877};
    return crit[df - 1];
}

}  // namespace testsupport
