#include "copasbias/scoretest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "copasbias/model.hpp"
#include "copasbias/normal.hpp"
#include "copasbias/parallel.hpp"
#include "copasbias/rng.hpp"

namespace copasbias::scoretest {

void GridSpec::validate() const {
    if (!std::isfinite(gamma0_lo) || !std::isfinite(gamma0_hi) || !std::isfinite(gamma1_lo) ||
        !std::isfinite(gamma1_hi))
        throw data_error("grid ranges must be finite");
    if (gamma0_lo > gamma0_hi || gamma1_lo > gamma1_hi)
        throw data_error("grid ranges must be ordered");
    if (n_gamma0 < 1 || n_gamma1 < 1) throw data_error("grid needs at least one point per axis");
    if (n_points_used < 1) throw data_error("n_points_used must be >= 1");
}

GridSpec default_grid(const Dataset& data, double p_min, double p_max) {
    if (!(p_min > 0.0 && p_min < 1.0 && p_max > 0.0 && p_max < 1.0))
        throw data_error("p_min and p_max must lie in (0,1)");
    GridSpec grid;
    double lo = (norm_ppf(p_min) - 2.0) * data.min_s();
    double hi = (norm_ppf(p_max) + 2.0) * data.max_s();
    lo = std::clamp(lo, 0.0, 2.0);
    hi = std::clamp(hi, 0.0, 2.0);
    if (!(hi > lo)) {
        lo = 0.0;
        hi = 2.0;
        grid.gamma1_fallback = true;
    }
    grid.gamma1_lo = lo;
    grid.gamma1_hi = hi;
    return grid;
}

std::vector<GridPoint> lattice(const GridSpec& grid) {
    grid.validate();
    const double step0 = (grid.gamma0_hi - grid.gamma0_lo) / grid.n_gamma0;
    const double step1 = (grid.gamma1_hi - grid.gamma1_lo) / grid.n_gamma1;
    std::vector<GridPoint> pts;
    pts.reserve(static_cast<std::size_t>(grid.n_gamma0) * grid.n_gamma1);
    for (int i = 0; i < grid.n_gamma0; ++i)
        for (int j = 0; j < grid.n_gamma1; ++j)
            pts.push_back({grid.gamma0_lo + i * step0, grid.gamma1_lo + j * step1});
    return pts;
}

std::vector<GridPoint> subsample(const GridSpec& grid) {
    std::vector<GridPoint> pts = lattice(grid);
    const std::size_t total = pts.size();
    const std::size_t p = std::min<std::size_t>(grid.n_points_used, total);
    if (p >= total) return pts;

    // Partial Fisher-Yates: the first p swaps are the same no matter how
    // many points are eventually requested, giving the prefix property.
    std::vector<std::uint32_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(grid.seed);
    std::vector<GridPoint> out;
    out.reserve(p);
    for (std::size_t k = 0; k < p; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.below(total - k));
        std::swap(idx[k], idx[j]);
        out.push_back(pts[idx[k]]);
    }
    return out;
}

double z_at(const Dataset& data, double gamma0, double gamma1,
            const estimation::NullFit& null_fit) {
    const auto parts =
        model::efficient_score_parts(gamma0, gamma1, null_fit.mu_hat, null_fit.tau2_hat, data);
    if (parts.info_efficient == 0.0) return 0.0;
    return parts.score_total / std::sqrt(parts.info_efficient);
}

TStatResult t_statistic(const Dataset& data, const GridSpec& grid) {
    return t_statistic(data, grid, estimation::fit_null(data));
}

TStatResult t_statistic(const Dataset& data, const GridSpec& grid,
                        const estimation::NullFit& null_fit) {
    TStatResult res;
    res.null_fit = null_fit;
    res.points = subsample(grid);
    res.z_values.assign(res.points.size(), std::numeric_limits<double>::quiet_NaN());

    // The nuisance information block does not depend on (gamma0, gamma1), so
    // it is computed once and shared by every grid point.
    model::detail::InfoBlock block;
    try {
        block = model::detail::nuisance_info_block(data, null_fit.mu_hat, null_fit.tau2_hat);
    } catch (const error& e) {
        throw test_error(std::string("every grid point failed: ") + e.what());
    }

    double best = -1.0;
    for (std::size_t k = 0; k < res.points.size(); ++k) {
        const auto& pt = res.points[k];
        double z;
        try {
            const auto scores = model::score_rho_at_null(pt.gamma0, pt.gamma1, null_fit.mu_hat,
                                                         null_fit.tau2_hat, data);
            const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
            const auto row = model::detail::rho_info_row(pt.gamma0, pt.gamma1, null_fit.mu_hat,
                                                         null_fit.tau2_hat, data);
            const double info = model::detail::schur_complement(block, row);
            z = info == 0.0 ? 0.0 : total / std::sqrt(info);
        } catch (const error& e) {
            ++res.n_failed;
            res.warnings.push_back("grid point (" + std::to_string(pt.gamma0) + ", " +
                                   std::to_string(pt.gamma1) + ") skipped: " + e.what());
            continue;
        }
        res.z_values[k] = z;
        if (z * z > best) {
            best = z * z;
            res.argmax_point = pt;
        }
    }
    if (res.n_failed == static_cast<int>(res.points.size()))
        throw test_error("every grid point failed");
    res.t_stat = best;
    return res;
}

ScoreTestResult bootstrap_pvalue(const Dataset& data, const GridSpec& grid, int b_boot,
                                 std::uint64_t seed, unsigned threads) {
    if (b_boot < 1) throw data_error("b_boot must be >= 1");

    const TStatResult observed = t_statistic(data, grid);
    const double mu0 = observed.null_fit.mu_hat;
    const double tau0 = std::sqrt(observed.null_fit.tau2_hat);
    const std::vector<double> s_pool = data.s_values();
    const std::size_t n = data.n();

    std::vector<double> boot(b_boot, std::numeric_limits<double>::quiet_NaN());
    parallel_for(static_cast<std::size_t>(b_boot), threads, [&](std::size_t b) {
        Rng rng = substream(seed, b);
        std::vector<Study> studies(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s_star = s_pool[rng.below(n)];
            const double eps = rng.normal();
            const double mu_i = mu0 + tau0 * rng.normal();
            studies[i] = {mu_i + s_star * eps, s_star};
        }
        try {
            const Dataset replicate(std::move(studies));
            boot[b] = t_statistic(replicate, grid).t_stat;
        } catch (const error&) {
            // dropped replicate, slot stays NaN
        }
    });

    ScoreTestResult res;
    res.t_stat = observed.t_stat;
    res.z_values = observed.z_values;
    res.argmax_point = observed.argmax_point;
    res.null_fit = observed.null_fit;
    res.points = observed.points;
    res.n_grid_failed = observed.n_failed;
    res.warnings = observed.warnings;

    int exceed = 0;
    for (double t : boot) {
        if (std::isnan(t)) {
            ++res.n_dropped;
            continue;
        }
        res.boot_t.push_back(t);
        if (t > observed.t_stat) ++exceed;
    }
    if (res.n_dropped * 10 > b_boot)
        throw test_error("more than 10% of bootstrap replicates failed (" +
                         std::to_string(res.n_dropped) + "/" + std::to_string(b_boot) + ")");
    res.b_boot = static_cast<int>(res.boot_t.size());
    res.p_value = static_cast<double>(exceed) / res.b_boot;
    if (res.n_dropped > 0)
        res.warnings.push_back(std::to_string(res.n_dropped) +
                               " bootstrap replicates dropped; p computed over " +
                               std::to_string(res.b_boot));
    return res;
}

}  // namespace copasbias::scoretest
