#include "copasbias/sim.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "copasbias/comparators.hpp"
#include "copasbias/parallel.hpp"
#include "copasbias/scoretest.hpp"

namespace copasbias::sim {

std::string model_name(GenModel m) {
    switch (m) {
        case GenModel::copas: return "copas";
        case GenModel::alt_inv_s2: return "alt_inv_s2";
        case GenModel::alt_zscore: return "alt_zscore";
    }
    return "unknown";
}

GenModel model_from_name(const std::string& name) {
    if (name == "copas") return GenModel::copas;
    if (name == "alt_inv_s2") return GenModel::alt_inv_s2;
    if (name == "alt_zscore") return GenModel::alt_zscore;
    throw data_error("unknown generator model: " + name);
}

std::string test_name(TestKind t) {
    switch (t) {
        case TestKind::score_test: return "score_test";
        case TestKind::egger: return "egger";
        case TestKind::trim_fill: return "trim_fill";
        case TestKind::copas_naive: return "copas_naive";
    }
    return "unknown";
}

TestKind test_from_name(const std::string& name) {
    if (name == "score_test") return TestKind::score_test;
    if (name == "egger") return TestKind::egger;
    if (name == "trim_fill" || name == "tf") return TestKind::trim_fill;
    if (name == "copas_naive" || name == "naive") return TestKind::copas_naive;
    throw data_error("unknown test: " + name);
}

void SimConfig::validate() const {
    if (n < 3) throw data_error("n must be >= 3");
    if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw data_error("tau2 must be >= 0 and finite");
    if (!std::isfinite(mu) || !std::isfinite(gamma0) || !std::isfinite(gamma1))
        throw data_error("mu, gamma0, gamma1 must be finite");
    if (model == GenModel::alt_zscore) {
        if (!(c > 0.0)) throw data_error("c must be > 0 for the z-score link");
        if (!std::isfinite(rho)) throw data_error("rho must be finite");
    } else if (!(std::abs(rho) < 1.0)) {
        throw data_error("rho must lie in (-1, 1)");
    }
    if (!(s_scale > 0.0) || !std::isfinite(s_loc))
        throw data_error("folded normal needs finite location and positive scale");
}

namespace {

constexpr long long kProposalBudget = 1'000'000;
constexpr double kMinS = 1e-3;  // below this 1/s explodes; redrawn

// One folded-normal standard error; tiny values are redrawn.
double draw_s(const SimConfig& cfg, Rng& rng, long long& budget_used) {
    for (;;) {
        if (++budget_used > kProposalBudget)
            throw generation_error("standard-error sampler exhausted its draw budget");
        const double s = std::abs(cfg.s_loc + cfg.s_scale * rng.normal());
        if (s >= kMinS) return s;
    }
}

GenResult run_sampler(const SimConfig& cfg, Rng& rng, GenModel model) {
    cfg.validate();
    if (cfg.model != model)
        throw data_error("config requests model " + model_name(cfg.model) + ", generator is " +
                         model_name(model));

    const double tau = std::sqrt(cfg.tau2);
    const double root = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
    std::vector<Study> studies;
    studies.reserve(static_cast<std::size_t>(cfg.n));

    long long proposals = 0;
    long long budget_used = 0;
    while (static_cast<int>(studies.size()) < cfg.n) {
        if (++proposals > kProposalBudget)
            throw generation_error("acceptance rate too low: " +
                                   std::to_string(studies.size()) + " studies after " +
                                   std::to_string(proposals) + " proposals");
        const double s = draw_s(cfg, rng, budget_used);
        const double u = rng.normal();
        double y, z;
        if (model == GenModel::alt_zscore) {
            const double eps = rng.normal();
            y = cfg.mu + tau * u + s * eps;
            z = cfg.gamma0 + cfg.gamma1 / s + cfg.c * cfg.rho * y / s;
            if (cfg.zscore_noise) z += rng.normal();
        } else {
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            const double delta = cfg.rho * z1 + root * z2;
            y = cfg.mu + tau * u + s * z1;
            z = model == GenModel::copas ? cfg.gamma0 + cfg.gamma1 / s + delta
                                         : cfg.gamma0 + cfg.gamma1 / (s * s) + delta;
        }
        if (z > 0.0) studies.push_back({y, s});
    }

    GenResult out{Dataset(std::move(studies)),
                  static_cast<double>(cfg.n) / static_cast<double>(proposals), proposals};
    return out;
}

}  // namespace

GenResult generate_copas(const SimConfig& cfg, Rng& rng) {
    return run_sampler(cfg, rng, GenModel::copas);
}

GenResult generate_alt_inv_s2(const SimConfig& cfg, Rng& rng) {
    return run_sampler(cfg, rng, GenModel::alt_inv_s2);
}

GenResult generate_alt_zscore(const SimConfig& cfg, Rng& rng) {
    return run_sampler(cfg, rng, GenModel::alt_zscore);
}

GenResult generate(const SimConfig& cfg, Rng& rng) { return run_sampler(cfg, rng, cfg.model); }

PowerReport run_power_study(const SimConfig& config, int n_replicates,
                            const std::vector<TestKind>& tests,
                            const std::vector<double>& alpha_levels, int b_boot,
                            int grid_points, unsigned threads) {
    config.validate();
    if (n_replicates < 0) throw data_error("n_replicates must be >= 0");
    for (double a : alpha_levels)
        if (!(a > 0.0 && a < 1.0)) throw data_error("alpha levels must lie in (0,1)");

    PowerReport report;
    report.config = config;
    report.b_boot = b_boot;
    report.grid_points = grid_points;
    report.alpha_levels = alpha_levels;
    report.tests = tests;
    if (tests.empty()) return report;  // nothing requested, nothing run

    report.n_replicates = n_replicates;
    const std::size_t n_tests = tests.size();
    std::vector<std::vector<double>> pvals(
        static_cast<std::size_t>(n_replicates),
        std::vector<double>(n_tests, std::numeric_limits<double>::quiet_NaN()));

    const auto start = std::chrono::steady_clock::now();
    parallel_for(static_cast<std::size_t>(n_replicates), threads, [&](std::size_t r) {
        Rng gen_rng = substream(config.seed, 2 * r);
        GenResult gen;
        try {
            gen = generate(config, gen_rng);
        } catch (const error&) {
            return;  // every test fails for this replicate
        }
        Rng aux = substream(config.seed, 2 * r + 1);
        const std::uint64_t grid_seed = aux.next_u64();
        const std::uint64_t boot_seed = aux.next_u64();

        for (std::size_t t = 0; t < n_tests; ++t) {
            try {
                switch (tests[t]) {
                    case TestKind::score_test: {
                        scoretest::GridSpec grid = scoretest::default_grid(gen.data);
                        grid.n_points_used = grid_points;
                        grid.seed = grid_seed;
                        pvals[r][t] =
                            scoretest::bootstrap_pvalue(gen.data, grid, b_boot, boot_seed, 1)
                                .p_value;
                        break;
                    }
                    case TestKind::egger:
                        pvals[r][t] = comparators::egger_test(gen.data).p_value;
                        break;
                    case TestKind::trim_fill:
                        pvals[r][t] = comparators::trim_and_fill(gen.data).p_value;
                        break;
                    case TestKind::copas_naive:
                        pvals[r][t] = comparators::copas_naive_test(gen.data).p_value;
                        break;
                }
            } catch (const error&) {
                // left as NaN, counted below
            }
        }
    });
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.mean_runtime_seconds =
        n_replicates > 0 ? elapsed.count() / static_cast<double>(n_replicates) : 0.0;

    report.rejection_rates.assign(n_tests, std::vector<double>(alpha_levels.size(), 0.0));
    report.n_failed.assign(n_tests, 0);
    for (std::size_t t = 0; t < n_tests; ++t) {
        int ok = 0;
        for (int r = 0; r < n_replicates; ++r) {
            if (std::isnan(pvals[static_cast<std::size_t>(r)][t])) {
                ++report.n_failed[t];
                continue;
            }
            ++ok;
            for (std::size_t a = 0; a < alpha_levels.size(); ++a)
                if (pvals[static_cast<std::size_t>(r)][t] <= alpha_levels[a])
                    report.rejection_rates[t][a] += 1.0;
        }
        if (report.n_failed[t] * 20 > n_replicates)
            throw convergence_error("more than 5% of replicates failed for " +
                                    test_name(tests[t]) + " (" +
                                    std::to_string(report.n_failed[t]) + "/" +
                                    std::to_string(n_replicates) + ")");
        for (auto& rate : report.rejection_rates[t]) rate = ok > 0 ? rate / ok : 0.0;
    }
    return report;
}

namespace {

nlohmann::ordered_json config_json(const SimConfig& cfg) {
    nlohmann::ordered_json j;
    j["n"] = cfg.n;
    j["mu"] = cfg.mu;
    j["tau2"] = cfg.tau2;
    j["rho"] = cfg.rho;
    j["gamma0"] = cfg.gamma0;
    j["gamma1"] = cfg.gamma1;
    j["model"] = model_name(cfg.model);
    j["c"] = cfg.c;
    j["s_loc"] = cfg.s_loc;
    j["s_scale"] = cfg.s_scale;
    j["zscore_noise"] = cfg.zscore_noise;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

std::string report_json(const PowerReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["config"] = config_json(report.config);
    j["n_replicates"] = report.n_replicates;
    j["b_boot"] = report.b_boot;
    j["grid_points"] = report.grid_points;
    j["alpha_levels"] = report.alpha_levels;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < report.tests.size(); ++t) {
        nlohmann::ordered_json row;
        row["test"] = test_name(report.tests[t]);
        row["rejection_rates"] = report.rejection_rates[t];
        row["n_failed"] = report.n_failed[t];
        results.push_back(row);
    }
    j["results"] = results;
    return j.dump(2) + "\n";
}

std::string report_csv(const PowerReport& report) {
    std::string out = "test,alpha,rejection_rate,n_failed,n_replicates\n";
    for (std::size_t t = 0; t < report.tests.size(); ++t) {
        for (std::size_t a = 0; a < report.alpha_levels.size(); ++a) {
            out += test_name(report.tests[t]);
            out += ',';
            out += nlohmann::json(report.alpha_levels[a]).dump();
            out += ',';
            out += nlohmann::json(report.rejection_rates[t][a]).dump();
            out += ',';
            out += std::to_string(report.n_failed[t]);
            out += ',';
            out += std::to_string(report.n_replicates);
            out += '\n';
        }
    }
    return out;
}

}  // namespace copasbias::sim
