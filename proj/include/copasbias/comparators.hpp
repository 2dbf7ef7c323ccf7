#pragma once

#include <map>
#include <string>

#include "copasbias/data.hpp"

namespace copasbias::comparators {

enum class Method { egger, trim_fill, copas_naive };

std::string method_name(Method m);

struct ComparatorResult {
    Method method = Method::egger;
    double statistic = 0.0;
    double p_value = 1.0;
    std::map<std::string, double> extras;
};

// Egger's regression test: OLS of y/s on 1/s with intercept; the statistic
// is the intercept's t value, p from t with n-2 df, two-sided.
ComparatorResult egger_test(const Dataset& data);

enum class TrimFillEstimator { L0, R0 };
enum class TrimFillSide { left, right, auto_side };

// Duval-Tweedie trim-and-fill with fixed-effect centering. Estimates the
// number k0 of suppressed studies on the chosen side (auto picks the side
// with the larger estimate, ties to the left), fills mirrored studies, and
// reports a two-sided rank-based asymmetry p-value. extras carries k0 and
// the pooled estimate after filling.
ComparatorResult trim_and_fill(const Dataset& data,
                               TrimFillEstimator estimator = TrimFillEstimator::L0,
                               TrimFillSide side = TrimFillSide::auto_side);

// Regression of effect on standard error with random-effects weights
// 1/(tau2_hat + s^2); the statistic is the slope's t value, p from t with
// n-2 df, two-sided.
ComparatorResult copas_naive_test(const Dataset& data);

}  // namespace copasbias::comparators
