#include "copasbias/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "copasbias/model.hpp"
#include "copasbias/optim.hpp"

namespace copasbias::estimation {
namespace {

double profile_mu(const Dataset& data, double tau2) {
    double sw = 0.0, swy = 0.0;
    for (const auto& st : data.studies()) {
        const double w = 1.0 / (tau2 + st.s * st.s);
        sw += w;
        swy += w * st.y;
    }
    return swy / sw;
}

double profile_loglik(const Dataset& data, double tau2) {
    return model::random_effects_loglik(data, profile_mu(data, tau2), tau2);
}

// d/d tau2 of the profile log-likelihood. The inner mu maximization makes
// the mu-derivative vanish, leaving the partial in tau2 at mu_hat(tau2).
double profile_dloglik(const Dataset& data, double tau2) {
    const double mu = profile_mu(data, tau2);
    double g = 0.0;
    for (const auto& st : data.studies()) {
        const double w = tau2 + st.s * st.s;
        const double r = st.y - mu;
        g += -0.5 / w + r * r / (2.0 * w * w);
    }
    return g;
}

// DerSimonian-Laird moment estimate of tau2.
double dersimonian_laird(const Dataset& data) {
    double sw = 0.0, swy = 0.0, sw2 = 0.0;
    for (const auto& st : data.studies()) {
        const double w = 1.0 / (st.s * st.s);
        sw += w;
        sw2 += w * w;
        swy += w * st.y;
    }
    const double mu_fe = swy / sw;
    double q = 0.0;
    for (const auto& st : data.studies())
        q += (st.y - mu_fe) * (st.y - mu_fe) / (st.s * st.s);
    const double denom = sw - sw2 / sw;
    if (!(denom > 0.0)) return 0.0;
    return std::max(0.0, (q - (static_cast<double>(data.n()) - 1.0)) / denom);
}

}  // namespace

NullFit fit_null(const Dataset& data) {
    const std::size_t n = data.n();
    double mean_y = 0.0;
    for (const auto& st : data.studies()) mean_y += st.y;
    mean_y /= static_cast<double>(n);
    double var_y = 0.0;
    for (const auto& st : data.studies()) var_y += (st.y - mean_y) * (st.y - mean_y);
    var_y /= static_cast<double>(n);

    const double tau2_dl = dersimonian_laird(data);
    const double tau2_max = std::max({10.0 * var_y, 1.0, 2.0 * tau2_dl});

    const auto neg = [&](double t) { return -profile_loglik(data, t); };
    const BrentResult br = brent_minimize(neg, 0.0, tau2_max, 1e-10, 400);
    int iterations = br.iterations;

    // Polish the interior solution to root-finder accuracy: Brent compares
    // function values and stalls near sqrt(eps), while the sign of the
    // profile derivative stays informative all the way down.
    double polished = br.x;
    {
        double lo = std::max(0.0, br.x - std::max(1e-6, 1e-3 * br.x));
        double hi = std::min(tau2_max, br.x + std::max(1e-6, 1e-3 * br.x));
        double glo = profile_dloglik(data, lo);
        double ghi = profile_dloglik(data, hi);
        int expand = 0;
        while (glo * ghi > 0.0 && expand < 30 && (lo > 0.0 || hi < tau2_max)) {
            const double width = hi - lo;
            lo = std::max(0.0, lo - width);
            hi = std::min(tau2_max, hi + width);
            glo = profile_dloglik(data, lo);
            ghi = profile_dloglik(data, hi);
            ++expand;
        }
        if (glo > 0.0 && ghi < 0.0) {
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = profile_dloglik(data, mid);
                if (gm > 0.0) lo = mid; else hi = mid;
                ++iterations;
            }
            polished = 0.5 * (lo + hi);
        }
    }

    // The boundary and the moment start compete with the interior solution.
    // The raw Brent point is not a candidate: when the polish bracket fails,
    // polished equals it, and when bisection runs, polished locates the same
    // maximum more precisely than plateau-level log-likelihood comparisons
    // can distinguish.
    const double candidates[] = {polished, 0.0, std::min(tau2_dl, tau2_max)};
    double best_t = candidates[0];
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double t : candidates) {
        const double ll = profile_loglik(data, t);
        if (ll > best_ll) {
            best_ll = ll;
            best_t = t;
        }
    }

    if (!br.converged)
        throw fit_error("null fit did not converge; best point mu=" +
                        std::to_string(profile_mu(data, best_t)) +
                        " tau2=" + std::to_string(best_t));

    NullFit fit;
    fit.tau2_hat = best_t;
    fit.mu_hat = profile_mu(data, best_t);
    fit.loglik = best_ll;
    fit.converged = true;
    fit.iterations = iterations;
    return fit;
}

namespace {

constexpr double kRhoCap = 0.9999;

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inv(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

struct TransformedPoint {
    double mu, t_raw, z_rho;
};

model::CopasParams to_params(const std::vector<double>& x, double gamma0, double gamma1) {
    model::CopasParams p;
    p.mu = x[0];
    p.tau2 = softplus(x[1]);
    p.rho = kRhoCap * std::tanh(x[2]);
    p.gamma0 = gamma0;
    p.gamma1 = gamma1;
    return p;
}

// Observed-information standard error for mu at the optimum; falls back to
// the marginal curvature when the full 3x3 matrix is not invertible.
double wald_mu_se(const Dataset& data, const model::CopasParams& opt) {
    const double steps[3] = {
        std::max(1e-5, 1e-5 * std::abs(opt.mu)),
        std::min(std::max(1e-5, 1e-5 * opt.tau2),
                 0.5 * (opt.tau2 + data.min_s() * data.min_s())),
        std::min(std::max(1e-5, 1e-5 * std::abs(opt.rho)), 0.5 * (1.0 - std::abs(opt.rho)))};

    double info[3][3];
    bool ok = true;
    try {
        for (int j = 0; j < 3; ++j) {
            model::CopasParams lo = opt, hi = opt;
            (j == 0 ? hi.mu : j == 1 ? hi.tau2 : hi.rho) += steps[j];
            (j == 0 ? lo.mu : j == 1 ? lo.tau2 : lo.rho) -= steps[j];
            const auto gp = model::copas_loglik_grad(hi, data);
            const auto gm = model::copas_loglik_grad(lo, data);
            for (int k = 0; k < 3; ++k) info[k][j] = -(gp[k] - gm[k]) / (2.0 * steps[j]);
        }
    } catch (const error&) {
        ok = false;
    }

    if (ok) {
        for (int j = 0; j < 3; ++j)
            for (int k = j + 1; k < 3; ++k) {
                const double sym = 0.5 * (info[j][k] + info[k][j]);
                info[j][k] = info[k][j] = sym;
            }
        const double det = info[0][0] * (info[1][1] * info[2][2] - info[1][2] * info[1][2]) -
                           info[0][1] * (info[0][1] * info[2][2] - info[1][2] * info[0][2]) +
                           info[0][2] * (info[0][1] * info[1][2] - info[1][1] * info[0][2]);
        if (std::isfinite(det) && det > 0.0) {
            const double cof00 = info[1][1] * info[2][2] - info[1][2] * info[1][2];
            const double var_mu = cof00 / det;
            if (std::isfinite(var_mu) && var_mu > 0.0) return std::sqrt(var_mu);
        }
        if (std::isfinite(info[0][0]) && info[0][0] > 0.0) return 1.0 / std::sqrt(info[0][0]);
    }

    // Random-effects curvature in mu always exists.
    double i_mm = 0.0;
    for (const auto& st : data.studies()) i_mm += 1.0 / (opt.tau2 + st.s * st.s);
    return 1.0 / std::sqrt(i_mm);
}

}  // namespace

SensitivityFit fit_sensitivity(const Dataset& data, double gamma0, double gamma1) {
    if (!std::isfinite(gamma0) || !std::isfinite(gamma1))
        throw data_error("gamma0 and gamma1 must be finite");
    const NullFit null_fit = fit_null(data);

    const auto objective = [&](const std::vector<double>& x) {
        try {
            return -model::copas_loglik(to_params(x, gamma0, gamma1), data);
        } catch (const error&) {
            return 1e300;
        }
    };

    const double t_start = softplus_inv(std::max(null_fit.tau2_hat, 1e-4));
    const double rho_starts[] = {-0.5, 0.0, 0.5};

    bool any_ok = false;
    NelderMeadResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (double r0 : rho_starts) {
        std::vector<double> start = {null_fit.mu_hat, t_start, std::atanh(r0 / kRhoCap)};
        NelderMeadResult res = nelder_mead(objective, start, {0.3, 1.0, 0.6}, 1e-13, 6000);
        if (res.fx < 1e299 && res.fx < best.fx) {
            best = res;
            any_ok = true;
        }
    }
    if (!any_ok) throw fit_error("sensitivity fit failed from every start");

    SensitivityFit fit;
    fit.gamma0 = gamma0;
    fit.gamma1 = gamma1;
    fit.converged = best.converged;

    model::CopasParams opt = to_params(best.x, gamma0, gamma1);
    double ll = -best.fx;

    // The null point is always admissible (rho = 0 makes the selection terms
    // vanish), so the fit can never fall below the nested null maximum.
    if (ll < null_fit.loglik) {
        opt.mu = null_fit.mu_hat;
        opt.tau2 = null_fit.tau2_hat;
        opt.rho = 0.0;
        ll = null_fit.loglik;
    }

    fit.mu_adj = opt.mu;
    fit.tau2_adj = opt.tau2;
    fit.rho_hat = opt.rho;
    fit.loglik = ll;
    fit.rho_at_boundary = std::abs(opt.rho) >= 0.98 * kRhoCap;
    fit.mu_se = wald_mu_se(data, opt);
    fit.mu_ci = {fit.mu_adj - 1.96 * fit.mu_se, fit.mu_adj + 1.96 * fit.mu_se};
    return fit;
}

}  // namespace copasbias::estimation
