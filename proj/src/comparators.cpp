#include "copasbias/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "copasbias/estimation.hpp"
#include "copasbias/normal.hpp"
#include "copasbias/stats.hpp"

namespace copasbias::comparators {

std::string method_name(Method m) {
    switch (m) {
        case Method::egger: return "egger";
        case Method::trim_fill: return "trim_fill";
        case Method::copas_naive: return "copas_naive";
    }
    return "unknown";
}

namespace {

double t_from_estimate(double estimate, double se) {
    if (se > 0.0) return estimate / se;
    if (estimate == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), estimate);
}

}  // namespace

ComparatorResult egger_test(const Dataset& data) {
    const std::size_t n = data.n();
    std::vector<double> x(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 / data[i].s;
        z[i] = data[i].y / data[i].s;
    }
    const double nx = static_cast<double>(n);
    const double x_bar = std::accumulate(x.begin(), x.end(), 0.0) / nx;
    const double z_bar = std::accumulate(z.begin(), z.end(), 0.0) / nx;
    double sxx = 0.0, sxz = 0.0, sx2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - x_bar) * (x[i] - x_bar);
        sxz += (x[i] - x_bar) * (z[i] - z_bar);
        sx2 += x[i] * x[i];
    }
    if (!(sxx > 1e-12 * sx2))
        throw singular_design_error("all standard errors are (nearly) identical");

    const double slope = sxz / sxx;
    const double intercept = z_bar - slope * x_bar;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = z[i] - intercept - slope * x[i];
        rss += r * r;
    }
    rss = std::max(rss, 0.0);
    const double sigma2 = rss / (nx - 2.0);
    const double se = std::sqrt(sigma2 * (1.0 / nx + x_bar * x_bar / sxx));

    ComparatorResult res;
    res.method = Method::egger;
    res.statistic = t_from_estimate(intercept, se);
    res.p_value = t_two_sided_p(res.statistic, nx - 2.0);
    res.extras["intercept"] = intercept;
    res.extras["intercept_se"] = se;
    res.extras["slope"] = slope;
    return res;
}

ComparatorResult copas_naive_test(const Dataset& data) {
    const std::size_t n = data.n();
    const double tau2 = estimation::fit_null(data).tau2_hat;

    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (const auto& st : data.studies()) {
        const double w = 1.0 / (tau2 + st.s * st.s);
        sw += w;
        swx += w * st.s;
        swy += w * st.y;
        swxx += w * st.s * st.s;
        swxy += w * st.s * st.y;
    }
    const double denom = sw * swxx - swx * swx;
    if (!(denom > 1e-12 * sw * swxx))
        throw singular_design_error("all standard errors are (nearly) identical");

    const double slope = (sw * swxy - swx * swy) / denom;
    const double intercept = (swy - slope * swx) / sw;
    double wrss = 0.0;
    for (const auto& st : data.studies()) {
        const double w = 1.0 / (tau2 + st.s * st.s);
        const double r = st.y - intercept - slope * st.s;
        wrss += w * r * r;
    }
    wrss = std::max(wrss, 0.0);
    const double sigma2 = wrss / (static_cast<double>(n) - 2.0);
    const double se = std::sqrt(sigma2 * sw / denom);

    ComparatorResult res;
    res.method = Method::copas_naive;
    res.statistic = t_from_estimate(slope, se);
    res.p_value = t_two_sided_p(res.statistic, static_cast<double>(n) - 2.0);
    res.extras["slope"] = slope;
    res.extras["slope_se"] = se;
    res.extras["intercept"] = intercept;
    res.extras["tau2_hat"] = tau2;
    return res;
}

namespace {

double fe_mean(const std::vector<Study>& studies) {
    double sw = 0.0, swy = 0.0;
    for (const auto& st : studies) {
        const double w = 1.0 / (st.s * st.s);
        sw += w;
        swy += w * st.y;
    }
    return swy / sw;
}

// Signed deviations ranked by magnitude. Zero deviations are dropped; ties
// get average ranks. Orders ties negative-deviation-first, then by index, so
// runs and ranks are deterministic.
struct RankedDeviations {
    std::vector<double> dev;    // nonzero deviations in rank order
    std::vector<double> rank;   // average ranks, aligned with dev
    double t_plus = 0.0;        // rank sum over positive deviations
    double tie_correction = 0.0;
    int n = 0;
};

RankedDeviations rank_deviations(const std::vector<Study>& studies, double center) {
    std::vector<double> d;
    d.reserve(studies.size());
    for (const auto& st : studies) {
        const double v = st.y - center;
        if (v != 0.0) d.push_back(v);
    }
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(d[a]), mb = std::abs(d[b]);
        if (ma != mb) return ma < mb;
        const bool na = d[a] < 0.0, nb = d[b] < 0.0;
        if (na != nb) return na;
        return a < b;
    });

    RankedDeviations out;
    out.n = static_cast<int>(d.size());
    out.dev.resize(d.size());
    out.rank.resize(d.size());
    for (std::size_t k = 0; k < order.size(); ++k) out.dev[k] = d[order[k]];

    std::size_t k = 0;
    while (k < out.dev.size()) {
        std::size_t j = k;
        while (j + 1 < out.dev.size() && std::abs(out.dev[j + 1]) == std::abs(out.dev[k])) ++j;
        const double avg = 0.5 * static_cast<double>(k + 1 + j + 1);
        const double t = static_cast<double>(j - k + 1);
        if (t > 1.0) out.tie_correction += (t * t * t - t) / 48.0;
        for (std::size_t m = k; m <= j; ++m) out.rank[m] = avg;
        k = j + 1;
    }
    for (std::size_t m = 0; m < out.dev.size(); ++m)
        if (out.dev[m] > 0.0) out.t_plus += out.rank[m];
    return out;
}

int estimate_k0(const RankedDeviations& r, TrimFillEstimator estimator) {
    const double n = static_cast<double>(r.n);
    if (r.n == 0) return 0;
    if (estimator == TrimFillEstimator::L0) {
        const double l0 = (4.0 * r.t_plus - n * (n + 1.0)) / (2.0 * n - 1.0);
        return l0 > 0.0 ? static_cast<int>(std::lround(l0)) : 0;
    }
    // Rightmost run: consecutive largest-magnitude deviations that are
    // positive, counted from the top of the magnitude ranking.
    int run = 0;
    for (std::size_t m = r.dev.size(); m-- > 0;) {
        if (r.dev[m] > 0.0) ++run;
        else break;
    }
    return std::max(0, run - 1);
}

struct SideFit {
    int k0 = 0;
    double center = 0.0;
    int iterations = 0;
};

// One-sided trim iteration on studies as given (suppression assumed on the
// low side, so the k0 largest effects are the unmatched ones).
SideFit trim_iterate(std::vector<Study> studies, TrimFillEstimator estimator) {
    const int n = static_cast<int>(studies.size());
    std::sort(studies.begin(), studies.end(),
              [](const Study& a, const Study& b) { return a.y < b.y; });
    const int k_cap = std::max(0, n - 3);

    SideFit fit;
    std::vector<int> trajectory;
    for (int iter = 0; iter < 50; ++iter) {
        fit.iterations = iter + 1;
        const std::vector<Study> trimmed(studies.begin(), studies.end() - fit.k0);
        fit.center = fe_mean(trimmed);
        const int k_new = std::min(k_cap, estimate_k0(rank_deviations(studies, fit.center),
                                                      estimator));
        trajectory.push_back(k_new);
        if (k_new == fit.k0) return fit;
        fit.k0 = k_new;
    }
    std::string path;
    for (int k : trajectory) path += std::to_string(k) + " ";
    throw convergence_error("trim-and-fill k0 did not stabilize; trajectory: " + path);
}

}  // namespace

ComparatorResult trim_and_fill(const Dataset& data, TrimFillEstimator estimator,
                               TrimFillSide side) {
    std::vector<Study> studies = data.studies();
    std::vector<Study> mirrored = studies;
    for (auto& st : mirrored) st.y = -st.y;

    SideFit left_fit, right_fit;
    bool use_right = false;
    if (side == TrimFillSide::left) {
        left_fit = trim_iterate(studies, estimator);
    } else if (side == TrimFillSide::right) {
        right_fit = trim_iterate(mirrored, estimator);
        use_right = true;
    } else {
        left_fit = trim_iterate(studies, estimator);
        right_fit = trim_iterate(mirrored, estimator);
        use_right = right_fit.k0 > left_fit.k0;
    }
    const SideFit& fit = use_right ? right_fit : left_fit;
    const std::vector<Study>& oriented = use_right ? mirrored : studies;

    // Fill: mirror the k0 largest oriented effects about the final center.
    std::vector<Study> ordered = oriented;
    std::sort(ordered.begin(), ordered.end(),
              [](const Study& a, const Study& b) { return a.y < b.y; });
    std::vector<Study> filled = oriented;
    for (int j = 0; j < fit.k0; ++j) {
        Study mirror = ordered[ordered.size() - 1 - static_cast<std::size_t>(j)];
        mirror.y = 2.0 * fit.center - mirror.y;
        filled.push_back(mirror);
    }
    double pooled = fe_mean(filled);
    double center = fit.center;
    if (use_right) {
        pooled = -pooled;
        center = -center;
    }

    // Rank-based symmetry test about the final center, on the original data.
    const RankedDeviations r = rank_deviations(data.studies(), center);
    const double nn = static_cast<double>(r.n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - r.tie_correction;
    double zstat = 0.0;
    if (var > 0.0) zstat = (r.t_plus - mean) / std::sqrt(var);

    ComparatorResult res;
    res.method = Method::trim_fill;
    res.statistic = zstat;
    res.p_value = 2.0 * norm_cdf(-std::abs(zstat));
    res.extras["k0"] = static_cast<double>(fit.k0);
    res.extras["filled_estimate"] = pooled;
    res.extras["center"] = center;
    res.extras["side_right"] = use_right ? 1.0 : 0.0;
    if (side == TrimFillSide::auto_side) {
        res.extras["k0_left"] = static_cast<double>(left_fit.k0);
        res.extras["k0_right"] = static_cast<double>(right_fit.k0);
    }
    return res;
}

}  // namespace copasbias::comparators
