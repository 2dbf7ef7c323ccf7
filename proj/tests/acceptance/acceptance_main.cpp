// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Every check uses fixed seeds; tolerances are stated inline.

#include <initializer_list>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "json.hpp"

#include "copasbias/comparators.hpp"
#include "copasbias/data.hpp"
#include "copasbias/errors.hpp"
#include "copasbias/estimation.hpp"
#include "copasbias/model.hpp"
#include "copasbias/normal.hpp"
#include "copasbias/rng.hpp"
#include "copasbias/scoretest.hpp"
#include "copasbias/sim.hpp"
#include "support/ks.hpp"

namespace cb = copasbias;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --- criterion 1: analytic rho-score vs central differences ---------------

void criterion_score_oracle() {
    cb::Rng rng(101);
    double worst = 0.0;
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 5 + static_cast<int>(rng.below(46));
        std::vector<double> y(n), s(n);
        for (int i = 0; i < n; ++i) {
            s[i] = 0.05 + 1.95 * rng.uniform01();
            y[i] = -0.3 + rng.uniform01() + s[i] * rng.normal();
        }
        const cb::Dataset d(y, s);
        const double mu = -0.4 + 0.8 * rng.uniform01();
        const double tau2 = 0.005 + 0.4 * rng.uniform01();
        const double g0 = -2.0 + 4.0 * rng.uniform01();
        const double g1 = 2.0 * rng.uniform01();

        const auto scores = cb::model::score_rho_at_null(g0, g1, mu, tau2, d);
        double total = 0.0;
        for (double v : scores) total += v;

        const double h = 1e-6;
        const double up = cb::model::copas_loglik({mu, tau2, h, g0, g1}, d);
        const double dn = cb::model::copas_loglik({mu, tau2, -h, g0, g1}, d);
        const double fd = (up - dn) / (2.0 * h);
        const double rel = std::abs(total - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, rel);
        ++checked;
    }
    report(1, checked == 100 && worst < 1e-5,
           "analytic rho-score vs central differences on 100 random fixtures, worst relative "
           "error " + fmt(worst) + " (gate 1e-5)");
}

// --- criterion 2: standardized score is N(0,1) at a fixed grid point ------

void criterion_standardization() {
    cb::sim::SimConfig cfg;
    cfg.n = 200;
    cfg.rho = 0.0;
    std::vector<double> zs;
    zs.reserve(2000);
    int dropped = 0;
    for (int r = 0; r < 2000; ++r) {
        cb::Rng rng = cb::substream(202, static_cast<std::uint64_t>(r));
        const auto gen = cb::sim::generate(cfg, rng);
        try {
            const auto fit = cb::estimation::fit_null(gen.data);
            zs.push_back(cb::scoretest::z_at(gen.data, -1.0, 0.65, fit));
        } catch (const cb::error&) {
            ++dropped;
        }
    }
    double mean = 0.0;
    for (double z : zs) mean += z;
    mean /= static_cast<double>(zs.size());
    double var = 0.0;
    for (double z : zs) var += (z - mean) * (z - mean);
    var /= static_cast<double>(zs.size() - 1);
    const double d = testsupport::ks_statistic(zs, [](double x) { return cb::norm_cdf(x); });
    const double p = testsupport::ks_pvalue(d, zs.size());
    const bool pass = p > 0.01 && var >= 0.9 && var <= 1.1 && dropped < 100;
    report(2, pass,
           "Z at (gamma0,gamma1)=(-1,0.65), n=200, 2000 null replicates: KS p " + fmt(p) +
               " (gate > 0.01), variance " + fmt(var) + " (gate [0.9, 1.1]), dropped " +
               std::to_string(dropped));
}

// --- criteria 3-6: Monte-Carlo rejection rates -----------------------------

bool within_type1(double r05, double r10) {
    return r05 >= 0.032 && r05 <= 0.068 && r10 >= 0.072 && r10 <= 0.128;
}

void criterion_type1() {
    cb::sim::SimConfig cfg;
    cfg.n = 40;
    cfg.rho = 0.0;
    cfg.seed = 303;
    const auto rep = cb::sim::run_power_study(cfg, 1000, {cb::sim::TestKind::score_test},
                                              {0.05, 0.10}, 200, 9, 0);
    const double r05 = rep.rejection_rates[0][0];
    const double r10 = rep.rejection_rates[0][1];
    report(3, within_type1(r05, r10),
           "null rejection, n=40, 1000 replicates, B=200, p=9: alpha 0.05 -> " + fmt(r05) +
               " (gate [0.032, 0.068]), alpha 0.10 -> " + fmt(r10) + " (gate [0.072, 0.128])");
}

void criterion_power_and_ordering() {
    cb::sim::SimConfig cfg;
    cfg.n = 40;
    cfg.rho = 0.6;
    cfg.seed = 404;
    const std::vector<cb::sim::TestKind> tests{
        cb::sim::TestKind::score_test, cb::sim::TestKind::egger, cb::sim::TestKind::trim_fill,
        cb::sim::TestKind::copas_naive};
    const auto rep = cb::sim::run_power_study(cfg, 300, tests, {0.05}, 200, 9, 0);
    const double score = rep.rejection_rates[0][0];
    const double egger = rep.rejection_rates[1][0];
    const double tf = rep.rejection_rates[2][0];
    const double naive = rep.rejection_rates[3][0];
    report(4, score >= 0.80,
           "power under selection, n=40, rho=0.6, 300 replicates: score test " + fmt(score) +
               " at alpha 0.05 (gate >= 0.80)");
    report(5, score > egger && score > tf && score > naive,
           "comparator ordering at alpha 0.05: score " + fmt(score) + " vs egger " + fmt(egger) +
               ", trim-fill " + fmt(tf) + ", effect-on-se " + fmt(naive) +
               " (gate: score strictly highest)");
}

void criterion_misspecification() {
    bool pass = true;
    std::string detail;
    const std::array<cb::sim::GenModel, 2> models{cb::sim::GenModel::alt_inv_s2,
                                                  cb::sim::GenModel::alt_zscore};
    std::uint64_t seed = 505;
    for (cb::sim::GenModel m : models) {
        cb::sim::SimConfig null_cfg;
        null_cfg.n = 40;
        null_cfg.rho = 0.0;
        null_cfg.model = m;
        null_cfg.seed = seed++;
        const auto null_rep = cb::sim::run_power_study(
            null_cfg, 1000, {cb::sim::TestKind::score_test}, {0.05, 0.10}, 200, 9, 0);
        const double r05 = null_rep.rejection_rates[0][0];
        const double r10 = null_rep.rejection_rates[0][1];
        pass = pass && within_type1(r05, r10);
        detail += cb::sim::model_name(m) + " null(0.05)=" + fmt(r05) + " null(0.10)=" + fmt(r10);

        cb::sim::SimConfig pow_cfg;
        pow_cfg.n = 100;  // largest simulated size in this run
        pow_cfg.rho = 0.6;
        pow_cfg.model = m;
        pow_cfg.seed = seed++;
        const std::vector<cb::sim::TestKind> tests{cb::sim::TestKind::score_test,
                                                   cb::sim::TestKind::egger,
                                                   cb::sim::TestKind::trim_fill};
        const auto pow_rep = cb::sim::run_power_study(pow_cfg, 300, tests, {0.05}, 200, 9, 0);
        const double score = pow_rep.rejection_rates[0][0];
        const double egger = pow_rep.rejection_rates[1][0];
        const double tf = pow_rep.rejection_rates[2][0];
        pass = pass && score >= egger && score >= tf;
        detail += " power(n=100)=" + fmt(score) + " vs egger " + fmt(egger) + ", trim-fill " +
                  fmt(tf) + "; ";
    }
    report(6, pass,
           "misspecified generators, type-I gates as criterion 3, power-ordering gate >=: " +
               detail);
}

// --- criterion 7: equal-variance closed form -------------------------------

void criterion_null_mle() {
    double worst = 0.0;
    cb::Rng rng(707);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 4 + static_cast<int>(rng.below(20));
        const double s = 0.1 + rng.uniform01();
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = 0.3 + (rep % 3 == 0 ? 0.05 : 1.0) * rng.normal();
        const cb::Dataset d(y, std::vector<double>(n, s));
        const auto fit = cb::estimation::fit_null(d);
        double ybar = 0.0;
        for (double v : y) ybar += v;
        ybar /= n;
        double msd = 0.0;
        for (double v : y) msd += (v - ybar) * (v - ybar);
        msd /= n;
        worst = std::max(worst, std::abs(fit.mu_hat - ybar));
        worst = std::max(worst, std::abs(fit.tau2_hat - std::max(0.0, msd - s * s)));
    }
    report(7, worst < 1e-8,
           "equal-variance closed form over 25 random cases, worst deviation " + fmt(worst) +
               " (gate 1e-8)");
}

// --- criterion 8: comparator oracles ---------------------------------------

void criterion_comparator_oracles() {
    bool pass = true;
    std::string detail;

    // exact noiseless regressions
    {
        std::vector<double> s{0.2, 0.35, 0.5, 0.8, 1.1};
        std::vector<double> y;
        for (double si : s) y.push_back(0.7 * si + 0.3);
        const auto egger = cb::comparators::egger_test(cb::Dataset(y, s));
        const double de = std::abs(egger.extras.at("intercept") - 0.7) +
                          std::abs(egger.extras.at("slope") - 0.3);
        pass = pass && de < 1e-10 && egger.p_value < 1e-20;
        detail += "egger noiseless dev " + fmt(de);

        std::vector<double> y2;
        for (double si : s) y2.push_back(0.4 - 0.25 * si);
        const auto naive = cb::comparators::copas_naive_test(cb::Dataset(y2, s));
        const double dn = std::abs(naive.extras.at("slope") + 0.25) +
                          std::abs(naive.extras.at("intercept") - 0.4);
        pass = pass && dn < 1e-10 && naive.p_value < 1e-20;
        detail += ", effect-on-se noiseless dev " + fmt(dn);
    }

    // trim-and-fill: symmetric data, then a 3-study one-sided deletion
    {
        std::vector<double> y{0.5}, s{0.05};
        for (double dev : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}) {
            y.insert(y.end(), {0.5 + dev, 0.5 - dev});
            s.insert(s.end(), {dev, dev});
        }
        const auto sym = cb::comparators::trim_and_fill(cb::Dataset(y, s));
        pass = pass && sym.extras.at("k0") == 0.0;
        detail += ", symmetric k0 " + fmt(sym.extras.at("k0"));

        std::vector<double> y2, s2;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] > 0.95) continue;  // drops 0.5 + {0.5, 0.6, 0.7}
            y2.push_back(y[i]);
            s2.push_back(s[i]);
        }
        const auto cut = cb::comparators::trim_and_fill(cb::Dataset(y2, s2));
        const double k0 = cut.extras.at("k0");
        pass = pass && k0 >= 2.0 && k0 <= 4.0;
        detail += ", deletion-of-3 k0 " + fmt(k0) + " (gate 3 +/- 1)";
    }
    report(8, pass, detail);
}

// --- criterion 9: byte-identical reruns across thread counts ---------------

nlohmann::ordered_json score_result_json(const cb::scoretest::ScoreTestResult& r) {
    nlohmann::ordered_json j;
    j["t_stat"] = r.t_stat;
    j["z_values"] = r.z_values;
    j["p_value"] = r.p_value;
    j["boot_t"] = r.boot_t;
    j["mu_hat"] = r.null_fit.mu_hat;
    j["tau2_hat"] = r.null_fit.tau2_hat;
    return j;
}

void criterion_determinism() {
    cb::sim::SimConfig cfg;
    cfg.n = 25;
    cfg.rho = 0.5;
    cfg.seed = 909;
    cb::Rng rng(909);
    const auto gen = cb::sim::generate(cfg, rng);
    cb::scoretest::GridSpec grid = cb::scoretest::default_grid(gen.data);
    grid.n_points_used = 9;
    grid.seed = 7;

    const auto a = cb::scoretest::bootstrap_pvalue(gen.data, grid, 100, 7, 1);
    const auto b = cb::scoretest::bootstrap_pvalue(gen.data, grid, 100, 7, 4);
    const auto c = cb::scoretest::bootstrap_pvalue(gen.data, grid, 100, 7, 4);
    const bool test_same = score_result_json(a).dump() == score_result_json(b).dump() &&
                           score_result_json(b).dump() == score_result_json(c).dump();

    cb::sim::SimConfig hcfg;
    hcfg.n = 15;
    hcfg.seed = 910;
    const std::vector<cb::sim::TestKind> tests{cb::sim::TestKind::score_test,
                                               cb::sim::TestKind::egger};
    const std::string h1 =
        cb::sim::report_json(cb::sim::run_power_study(hcfg, 4, tests, {0.1}, 30, 4, 1));
    const std::string h4 =
        cb::sim::report_json(cb::sim::run_power_study(hcfg, 4, tests, {0.1}, 30, 4, 4));
    const bool harness_same = h1 == h4;

    report(9, test_same && harness_same,
           std::string("rerun stability: score test JSON identical across threads 1/4/4 -> ") +
               (test_same ? "yes" : "no") + ", harness JSON identical across threads 1/4 -> " +
               (harness_same ? "yes" : "no"));
}

}  // namespace

int main() {
    try {
        criterion_score_oracle();
        criterion_standardization();
        criterion_type1();
        criterion_power_and_ordering();
        criterion_misspecification();
        criterion_null_mle();
        criterion_comparator_oracles();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL harness: unhandled error: %s\n", e.what());
        return 1;
    }
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
