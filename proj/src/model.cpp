#include "copasbias/model.hpp"

#include <cmath>
#include <string>

#include "copasbias/normal.hpp"

namespace copasbias::model {

void CopasParams::validate() const {
    if (!std::isfinite(mu)) throw data_error("mu must be finite");
    if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw data_error("tau2 must be >= 0 and finite");
    if (!(std::abs(rho) < 1.0)) throw data_error("rho must lie in (-1, 1)");
    if (!std::isfinite(gamma0) || !std::isfinite(gamma1))
        throw data_error("gamma0 and gamma1 must be finite");
}

double selection_prob(double gamma0, double gamma1, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw data_error("s must be positive and finite");
    return norm_cdf(gamma0 + gamma1 / s);
}

double random_effects_loglik(const Dataset& data, double mu, double tau2) {
    if (!(tau2 >= 0.0)) throw data_error("tau2 must be >= 0");
    double ll = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double w = tau2 + data[i].s * data[i].s;
        const double r = data[i].y - mu;
        const double term = -0.5 * std::log(w) - r * r / (2.0 * w);
        if (!std::isfinite(term))
            throw numeric_error("non-finite likelihood term", static_cast<int>(i));
        ll += term;
    }
    return ll;
}

std::array<double, 2> random_effects_grad(const Dataset& data, double mu, double tau2) {
    double g_mu = 0.0, g_tau2 = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double w = tau2 + data[i].s * data[i].s;
        const double r = data[i].y - mu;
        g_mu += r / w;
        g_tau2 += -0.5 / w + r * r / (2.0 * w * w);
    }
    return {g_mu, g_tau2};
}

double copas_loglik(const CopasParams& p, const Dataset& data) {
    p.validate();
    // At rho = 0 the two selection terms cancel study by study, so the
    // random-effects value is returned directly; this keeps the reduction
    // exact in floating point, not just up to rounding.
    if (p.rho == 0.0) return random_effects_loglik(data, p.mu, p.tau2);

    double ll = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double s = data[i].s;
        const double w = p.tau2 + s * s;
        const double r = data[i].y - p.mu;
        const double u = p.gamma0 + p.gamma1 / s;
        const double d2 = 1.0 - p.rho * p.rho * (s * s / w);
        if (!(d2 > 0.0))
            throw data_error("rho^2 s^2/(tau2+s^2) must stay below 1 (study " +
                             std::to_string(i) + ")");
        const double v = (u + p.rho * s * r / w) / std::sqrt(d2);
        const double term =
            -0.5 * std::log(w) - r * r / (2.0 * w) - norm_log_cdf(u) + norm_log_cdf(v);
        if (!std::isfinite(term))
            throw numeric_error("non-finite likelihood term", static_cast<int>(i));
        ll += term;
    }
    return ll;
}

std::array<double, 3> copas_loglik_grad(const CopasParams& p, const Dataset& data) {
    p.validate();
    double g_mu = 0.0, g_tau2 = 0.0, g_rho = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double s = data[i].s;
        const double w = p.tau2 + s * s;
        const double r = data[i].y - p.mu;
        const double u = p.gamma0 + p.gamma1 / s;
        const double b = s * r / w;

        g_mu += r / w;
        g_tau2 += -0.5 / w + r * r / (2.0 * w * w);

        if (p.rho == 0.0) {
            // v = u and only the rho-derivative keeps a selection term.
            g_rho += inv_mills(u) * b;
            continue;
        }

        const double c = s * s / w;
        const double d2 = 1.0 - p.rho * p.rho * c;
        if (!(d2 > 0.0))
            throw data_error("rho^2 s^2/(tau2+s^2) must stay below 1 (study " +
                             std::to_string(i) + ")");
        const double dd = std::sqrt(d2);
        const double v = (u + p.rho * b) / dd;
        const double lam = inv_mills(v);

        const double dv_dmu = -p.rho * s / (w * dd);
        const double dv_dtau2 = -p.rho * s * r / (w * w * dd) - v * p.rho * p.rho * c / (2.0 * d2 * w);
        const double dv_drho = b / dd + v * p.rho * c / d2;

        g_mu += lam * dv_dmu;
        g_tau2 += lam * dv_dtau2;
        g_rho += lam * dv_drho;

        if (!std::isfinite(g_mu) || !std::isfinite(g_tau2) || !std::isfinite(g_rho))
            throw numeric_error("non-finite gradient term", static_cast<int>(i));
    }
    return {g_mu, g_tau2, g_rho};
}

std::vector<double> score_rho_at_null(double gamma0, double gamma1, double mu, double tau2,
                                      const Dataset& data) {
    if (!(tau2 >= 0.0)) throw data_error("tau2 must be >= 0");
    std::vector<double> scores(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double s = data[i].s;
        const double w = tau2 + s * s;
        const double u = gamma0 + gamma1 / s;
        scores[i] = inv_mills(u) * s * (data[i].y - mu) / w;
        if (!std::isfinite(scores[i]))
            throw numeric_error("non-finite score term", static_cast<int>(i));
    }
    return scores;
}

namespace detail {

// Per-study likelihood scores at rho = 0: mu score m_i = r_i/w_i and tau2
// score t_i = r_i^2/(2 w_i^2) - 1/(2 w_i), the summands of
// random_effects_grad.

InfoBlock nuisance_info_block(const Dataset& data, double mu, double tau2) {
    InfoBlock blk;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double w = tau2 + data[i].s * data[i].s;
        const double r = data[i].y - mu;
        const double m = r / w;
        const double t = r * r / (2.0 * w * w) - 0.5 / w;
        blk.i_mm += m * m;
        blk.i_mt += m * t;
        blk.i_tt += t * t;
    }
    if (!std::isfinite(blk.i_mm) || !std::isfinite(blk.i_mt) || !std::isfinite(blk.i_tt))
        throw numeric_error("non-finite (mu, tau2) information block");
    return blk;
}

RhoRow rho_info_row(double gamma0, double gamma1, double mu, double tau2, const Dataset& data) {
    RhoRow row;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double s = data[i].s;
        const double w = tau2 + s * s;
        const double r = data[i].y - mu;
        const double m = r / w;
        const double t = r * r / (2.0 * w * w) - 0.5 / w;
        const double sc = inv_mills(gamma0 + gamma1 / s) * s * r / w;
        row.i_rm += sc * m;
        row.i_rt += sc * t;
        row.i_rr += sc * sc;
    }
    if (!std::isfinite(row.i_rm) || !std::isfinite(row.i_rt) || !std::isfinite(row.i_rr))
        throw numeric_error("non-finite rho information row");
    return row;
}

double schur_complement(const InfoBlock& blk, const RhoRow& row) {
    // All rho scores zero (e.g. every y_i equal to mu) means no information
    // in the rho direction at all, regardless of the block.
    if (row.i_rr == 0.0) return 0.0;
    const double det = blk.i_mm * blk.i_tt - blk.i_mt * blk.i_mt;
    const double det_scale = std::abs(blk.i_mm * blk.i_tt) + blk.i_mt * blk.i_mt;
    if (!(blk.i_mm > 0.0) || !(det > 1e-12 * det_scale))
        throw degenerate_information_error("(mu, tau2) information block is singular");
    const double x_m = (blk.i_tt * row.i_rm - blk.i_mt * row.i_rt) / det;
    const double x_t = (blk.i_mm * row.i_rt - blk.i_mt * row.i_rm) / det;
    double eff = row.i_rr - (row.i_rm * x_m + row.i_rt * x_t);
    if (!std::isfinite(eff)) throw numeric_error("non-finite efficient information");
    // The full outer-product matrix is positive semidefinite, so anything
    // below rounding scale signals a real computation problem.
    if (eff < -1e-8)
        throw numeric_error("efficient information is negative beyond tolerance: " +
                            std::to_string(eff));
    return eff < 0.0 ? 0.0 : eff;
}

}  // namespace detail

double efficient_information(double gamma0, double gamma1, double mu, double tau2,
                             const Dataset& data) {
    if (!(tau2 >= 0.0)) throw data_error("tau2 must be >= 0");
    const auto blk = detail::nuisance_info_block(data, mu, tau2);
    const auto row = detail::rho_info_row(gamma0, gamma1, mu, tau2, data);
    return detail::schur_complement(blk, row);
}

EfficientScoreParts efficient_score_parts(double gamma0, double gamma1, double mu, double tau2,
                                          const Dataset& data) {
    EfficientScoreParts parts;
    parts.per_study_scores = score_rho_at_null(gamma0, gamma1, mu, tau2, data);
    for (double s : parts.per_study_scores) parts.score_total += s;
    parts.info_efficient = efficient_information(gamma0, gamma1, mu, tau2, data);
    return parts;
}

}  // namespace copasbias::model
