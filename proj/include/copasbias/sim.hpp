#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copasbias/data.hpp"
#include "copasbias/rng.hpp"

namespace copasbias::sim {

// Selection mechanisms: the Copas latent-propensity model, a variant linear
// in 1/s^2, and a deterministic link through the study z-score.
enum class GenModel { copas, alt_inv_s2, alt_zscore };

std::string model_name(GenModel m);
GenModel model_from_name(const std::string& name);

struct SimConfig {
    int n = 40;
    double mu = 0.4;
    double tau2 = 0.01;
    double rho = 0.0;
    double gamma0 = -1.0;
    double gamma1 = 0.65;
    GenModel model = GenModel::copas;
    double c = 0.5;          // z-score link scaling
    double s_loc = 0.25;     // folded normal |N(s_loc, s_scale^2)|
    double s_scale = 2.0;    // standard deviation before folding
    bool zscore_noise = false;  // adds an independent N(0,1) to the z-score link
    std::uint64_t seed = 0;

    void validate() const;
};

struct GenResult {
    Dataset data;
    double acceptance_rate = 1.0;
    long long proposals = 0;
};

// Rejection samplers: propose (s, y), accept while the latent propensity is
// positive, until n studies are collected. Each is deterministic given the
// generator state; a budget of 1e6 proposals guards against near-zero
// acceptance.
GenResult generate_copas(const SimConfig& config, Rng& rng);
GenResult generate_alt_inv_s2(const SimConfig& config, Rng& rng);
GenResult generate_alt_zscore(const SimConfig& config, Rng& rng);
GenResult generate(const SimConfig& config, Rng& rng);  // dispatch on config.model

enum class TestKind { score_test, egger, trim_fill, copas_naive };

std::string test_name(TestKind t);
TestKind test_from_name(const std::string& name);

struct PowerReport {
    SimConfig config;
    int n_replicates = 0;
    int b_boot = 0;
    int grid_points = 0;
    std::vector<double> alpha_levels;
    std::vector<TestKind> tests;
    std::vector<std::vector<double>> rejection_rates;  // [test][alpha]
    std::vector<int> n_failed;                         // [test]
    double mean_runtime_seconds = 0.0;                 // reported on stderr, not serialized
};

// Monte-Carlo harness: per replicate, generate a dataset and run every
// requested test; rejection_rates[t][a] is the fraction of successful
// replicates with p <= alpha. Deterministic given config.seed for any
// thread count. More than 5% failures for any single test aborts.
PowerReport run_power_study(const SimConfig& config, int n_replicates,
                            const std::vector<TestKind>& tests,
                            const std::vector<double>& alpha_levels, int b_boot = 200,
                            int grid_points = 9, unsigned threads = 0);

std::string report_json(const PowerReport& report);
std::string report_csv(const PowerReport& report);

}  // namespace copasbias::sim
