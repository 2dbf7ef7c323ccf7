#pragma once

#include <array>

#include "copasbias/data.hpp"

namespace copasbias::estimation {

// Constrained ML fit of the random-effects model (rho = 0).
struct NullFit {
    double mu_hat = 0.0;
    double tau2_hat = 0.0;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Full selection-model ML fit at fixed (gamma0, gamma1).
struct SensitivityFit {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double mu_adj = 0.0;
    double tau2_adj = 0.0;
    double rho_hat = 0.0;
    double loglik = 0.0;
    double mu_se = 0.0;
    std::array<double, 2> mu_ci{0.0, 0.0};
    bool converged = false;
    bool rho_at_boundary = false;
};

// Maximizes the random-effects log-likelihood over (mu, tau2 >= 0).
// Profiles mu out (weighted mean at fixed tau2) and solves the remaining
// 1-D problem by Brent plus a root polish on the profile derivative.
NullFit fit_null(const Dataset& data);

// Maximizes the selection-model log-likelihood over (mu, tau2 >= 0,
// rho in (-0.9999, 0.9999)) at fixed (gamma0, gamma1); Nelder-Mead in an
// unconstrained reparameterization with multiple rho starts. mu_ci is the
// Wald interval from the observed information at the optimum.
SensitivityFit fit_sensitivity(const Dataset& data, double gamma0, double gamma1);

}  // namespace copasbias::estimation
