#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

// One-sample Kolmogorov-Smirnov helpers shared by tests.

namespace testsupport {

inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Kolmogorov survival function K(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double total = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        total += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, total));
}

// Asymptotic p-value with the Stephens small-sample adjustment.
inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf(d * (sn + 0.12 + 0.11 / sn));
}

}  // namespace testsupport
