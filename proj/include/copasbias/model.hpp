#pragma once

#include <array>
#include <vector>

#include "copasbias/data.hpp"

namespace copasbias::model {

// Parameters of the selection model. (mu, tau2) describe the random-effects
// outcome, rho ties the outcome error to the latent publication propensity
// Z = gamma0 + gamma1/s + delta.
struct CopasParams {
    double mu = 0.0;
    double tau2 = 0.0;
    double rho = 0.0;
    double gamma0 = 0.0;
    double gamma1 = 0.0;

    void validate() const;  // tau2 >= 0, |rho| < 1, all finite
};

// Per-study scores in rho at the null plus the efficient information that
// standardizes their sum.
struct EfficientScoreParts {
    double score_total = 0.0;
    double info_efficient = 0.0;
    std::vector<double> per_study_scores;
};

// Pr(Z > 0 | s) = Phi(gamma0 + gamma1/s), the marginal publication
// probability of a study with standard error s.
double selection_prob(double gamma0, double gamma1, double s);

// Random-effects log-likelihood sum_i [-1/2 log(tau2+s_i^2)
// - (y_i-mu)^2/(2(tau2+s_i^2))], additive constant dropped.
double random_effects_loglik(const Dataset& data, double mu, double tau2);

// Gradient of random_effects_loglik in (mu, tau2).
std::array<double, 2> random_effects_grad(const Dataset& data, double mu, double tau2);

// Observed-data log-likelihood of the selection model:
// sum_i [-1/2 log w_i - (y_i-mu)^2/(2 w_i) - log Phi(u_i) + log Phi(v_i)]
// with w_i = tau2 + s_i^2, u_i = gamma0 + gamma1/s_i and
// v_i = (u_i + rho s_i (y_i-mu)/w_i) / sqrt(1 - rho^2 s_i^2/w_i).
// At rho = 0 the selection terms cancel exactly and the value equals
// random_effects_loglik.
double copas_loglik(const CopasParams& params, const Dataset& data);

// Analytic gradient of copas_loglik in (mu, tau2, rho).
std::array<double, 3> copas_loglik_grad(const CopasParams& params, const Dataset& data);

// Per-study score in rho at rho = 0:
// S_i = lambda(u_i) s_i (y_i - mu) / (tau2 + s_i^2), lambda = inverse Mills.
std::vector<double> score_rho_at_null(double gamma0, double gamma1, double mu, double tau2,
                                      const Dataset& data);

// Efficient information for rho at rho = 0 with (mu, tau2) treated as
// nuisance: the Schur complement, in the information estimated from
// per-study score outer products at rho = 0, of its (mu, tau2) block. The
// outer-product estimate is positive semidefinite by construction, so a
// negative complement can only be rounding noise: values in [-1e-8, 0]
// clamp to 0, anything below that raises numeric_error. A singular
// (mu, tau2) block (degenerate data, n too small) raises
// degenerate_information_error.
double efficient_information(double gamma0, double gamma1, double mu, double tau2,
                             const Dataset& data);

// Scores and efficient information in one call.
EfficientScoreParts efficient_score_parts(double gamma0, double gamma1, double mu, double tau2,
                                          const Dataset& data);

namespace detail {

// Score-outer-product information restricted to (mu, tau2) at rho = 0:
// sums of squares and cross products of the per-study likelihood scores in
// mu and tau2. Independent of (gamma0, gamma1), so callers evaluating many
// selection-parameter values at one (mu, tau2) compute it once and reuse it.
struct InfoBlock {
    double i_mm = 0.0;
    double i_mt = 0.0;
    double i_tt = 0.0;
};

// The rho row of the same outer-product information at rho = 0: cross
// products of the per-study rho scores with the nuisance scores, plus the
// sum of squared rho scores.
struct RhoRow {
    double i_rm = 0.0;
    double i_rt = 0.0;
    double i_rr = 0.0;
};

InfoBlock nuisance_info_block(const Dataset& data, double mu, double tau2);
RhoRow rho_info_row(double gamma0, double gamma1, double mu, double tau2, const Dataset& data);
double schur_complement(const InfoBlock& block, const RhoRow& row);

}  // namespace detail

}  // namespace copasbias::model
