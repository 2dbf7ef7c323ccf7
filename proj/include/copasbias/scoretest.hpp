#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copasbias/data.hpp"
#include "copasbias/estimation.hpp"

namespace copasbias::scoretest {

struct GridPoint {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
};

// The (gamma0, gamma1) search lattice and how it is subsampled. Lattice
// points are lo + k * (hi - lo)/n for k = 0..n-1 (half-open), so the default
// 50x50 lattice over [-2,2] x [0,2] has spacing 0.08 by 0.04.
struct GridSpec {
    double gamma0_lo = -2.0;
    double gamma0_hi = 2.0;
    double gamma1_lo = 0.0;
    double gamma1_hi = 2.0;
    int n_gamma0 = 50;
    int n_gamma1 = 50;
    int n_points_used = 9;
    std::uint64_t seed = 0;
    bool gamma1_fallback = false;  // solved gamma1 bounds unusable, [0,2] adopted

    void validate() const;
};

// Data-driven grid: gamma0 spans [-2,2]; gamma1's upper end is where even the
// least precise study reaches publication probability p_max at gamma0 = -2,
// and its lower end is where even the most precise study drops to p_min at
// gamma0 = +2, both clamped into [0,2]. A degenerate result falls back to
// [0,2] with gamma1_fallback set.
GridSpec default_grid(const Dataset& data, double p_min = 0.1, double p_max = 0.9);

// Full lattice in row-major order (gamma0 outer, gamma1 inner).
std::vector<GridPoint> lattice(const GridSpec& grid);

// The n_points_used points drawn uniformly without replacement from the
// lattice using grid.seed. Drawing p' > p points with the same seed yields
// the p-point draw as its prefix. Requesting the whole lattice returns it in
// row-major order independent of the seed.
std::vector<GridPoint> subsample(const GridSpec& grid);

// Standardized score at one grid point: sum of S_i over sqrt of the
// efficient information; defined as 0 when the information clamps to 0.
double z_at(const Dataset& data, double gamma0, double gamma1,
            const estimation::NullFit& null_fit);

struct TStatResult {
    double t_stat = 0.0;
    std::vector<double> z_values;  // NaN where a point was skipped
    GridPoint argmax_point;
    std::vector<GridPoint> points;
    estimation::NullFit null_fit;
    int n_failed = 0;
    std::vector<std::string> warnings;
};

// Sup-score statistic: fits the null, evaluates Z on every subsampled grid
// point, and returns max Z^2. Failing points are skipped with a warning;
// ties go to the earliest point in subsample order.
TStatResult t_statistic(const Dataset& data, const GridSpec& grid);
TStatResult t_statistic(const Dataset& data, const GridSpec& grid,
                        const estimation::NullFit& null_fit);

struct ScoreTestResult {
    double t_stat = 0.0;
    std::vector<double> z_values;
    GridPoint argmax_point;
    double p_value = 1.0;
    int b_boot = 0;  // replicates that completed; boot_t has this length
    std::vector<double> boot_t;
    estimation::NullFit null_fit;
    std::vector<GridPoint> points;
    int n_dropped = 0;
    int n_grid_failed = 0;
    std::vector<std::string> warnings;
};

// Parametric bootstrap p-value. Computes T on the data, refits the null,
// simulates b_boot replicates from it (fresh normal effects, standard errors
// resampled with replacement), recomputes T* on the same grid points, and
// returns p = #{T* > T} / successes. Replicates whose fit fails are dropped;
// more than 10% drops raises test_error. Results are identical for every
// thread count.
ScoreTestResult bootstrap_pvalue(const Dataset& data, const GridSpec& grid, int b_boot = 200,
                                 std::uint64_t seed = 0, unsigned threads = 0);

}  // namespace copasbias::scoretest
