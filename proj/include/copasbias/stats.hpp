#pragma once

namespace copasbias {

// Regularized incomplete beta function I_x(a, b).
double betainc(double a, double b, double x);

// Two-sided p-value for a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);

}  // namespace copasbias
