#pragma once

namespace copasbias {

// Standard normal density phi(x).
double norm_pdf(double x);

// log phi(x), exact for all finite x.
double norm_log_pdf(double x);

// Standard normal CDF Phi(x) via erfc.
double norm_cdf(double x);

// log Phi(x). Uses erfc up to x = -20 and the Abramowitz & Stegun 26.2.12
// asymptotic expansion below that, so it stays finite and accurate far into
// the left tail.
double norm_log_cdf(double x);

// Inverse Mills ratio lambda(u) = phi(u)/Phi(u), computed through the log
// route for u << 0 where Phi underflows.
double inv_mills(double u);

// Inverse standard normal CDF (Wichura's AS241 rational approximations,
// ~1 ulp over (0,1)).
double norm_ppf(double p);

}  // namespace copasbias
