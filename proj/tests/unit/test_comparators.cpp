#include <initializer_list>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "copasbias/comparators.hpp"
#include "copasbias/data.hpp"
#include "copasbias/errors.hpp"

// Regression references computed with 50-digit arithmetic.

using namespace copasbias;
using namespace copasbias::comparators;

TEST_CASE("egger test matches the high-precision reference") {
    const Dataset d({0.61, 0.35, 0.12, 0.55, 0.27, 0.44},
                    {0.35, 0.22, 0.14, 0.30, 0.18, 0.26});
    const auto r = egger_test(d);
    CHECK(r.method == Method::egger);
    CHECK(r.extras.at("intercept") == doctest::Approx(2.482858876004702516741).epsilon(1e-11));
    CHECK(r.extras.at("intercept_se") ==
          doctest::Approx(0.1848905559144077729968).epsilon(1e-11));
    CHECK(r.extras.at("slope") == doctest::Approx(-0.2082294571491971755702).epsilon(1e-11));
    CHECK(r.statistic == doctest::Approx(13.42880313018315377147).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(0.0001778750068616403220482).epsilon(1e-9));
}

TEST_CASE("egger reproduces noiseless constructions exactly") {
    // y/s = 0.7 + 0.3/s exactly: intercept 0.7, residual variance at
    // rounding level, so p collapses through the polynomial t tail
    std::vector<double> s{0.2, 0.35, 0.5, 0.8, 1.1};
    std::vector<double> y;
    for (double si : s) y.push_back(0.7 * si + 0.3);
    const auto r = egger_test(Dataset(y, s));
    CHECK(std::abs(r.extras.at("intercept") - 0.7) < 1e-10);
    CHECK(std::abs(r.extras.at("slope") - 0.3) < 1e-10);
    CHECK(r.p_value < 1e-20);

    // y/s = 0.3/s exactly: intercept 0 (the t ratio is rounding noise over
    // rounding noise, so only the coefficients are checked)
    const std::vector<double> y0(s.size(), 0.3);
    const auto r0 = egger_test(Dataset(y0, s));
    CHECK(std::abs(r0.extras.at("intercept")) < 1e-10);
    CHECK(std::abs(r0.extras.at("slope") - 0.3) < 1e-10);
}

TEST_CASE("egger rejects a constant-precision design") {
    const Dataset d({0.1, 0.2, 0.3, 0.4}, {0.5, 0.5, 0.5, 0.5});
    CHECK_THROWS_AS(egger_test(d), singular_design_error);
}

TEST_CASE("weighted effect-on-se regression matches the reference") {
    const Dataset d({0.02, 0.85, -0.40, 0.62, 1.05, 0.28, -0.35, 0.51},
                    {0.15, 0.22, 0.30, 0.12, 0.25, 0.18, 0.35, 0.20});
    const auto r = copas_naive_test(d);
    CHECK(r.method == Method::copas_naive);
    CHECK(r.extras.at("tau2_hat") == doctest::Approx(0.152875197484558619888).epsilon(1e-7));
    CHECK(r.extras.at("slope") == doctest::Approx(-2.722254030567349738322).epsilon(1e-7));
    CHECK(r.extras.at("slope_se") == doctest::Approx(2.577079615812585069878).epsilon(1e-7));
    CHECK(r.extras.at("intercept") == doctest::Approx(0.9303579598448041529929).epsilon(1e-7));
    CHECK(r.statistic == doctest::Approx(-1.05633291803015925851).epsilon(1e-7));
    CHECK(r.p_value == doctest::Approx(0.3314811566993609747297).epsilon(1e-6));
}

TEST_CASE("weighted regression reproduces noiseless constructions exactly") {
    std::vector<double> s{0.2, 0.35, 0.5, 0.8, 1.1};
    std::vector<double> y;
    for (double si : s) y.push_back(0.4 - 0.25 * si);
    const auto r = copas_naive_test(Dataset(y, s));
    CHECK(std::abs(r.extras.at("slope") + 0.25) < 1e-10);
    CHECK(std::abs(r.extras.at("intercept") - 0.4) < 1e-10);
    CHECK(r.p_value < 1e-20);

    std::vector<double> yc(s.size(), 0.4);
    const auto rc = copas_naive_test(Dataset(yc, s));
    CHECK(std::abs(rc.extras.at("slope")) < 1e-10);
    CHECK(std::abs(rc.extras.at("intercept") - 0.4) < 1e-10);
}

namespace {

// Funnel-shaped mirror fixture: one precise study at the center, mirrored
// pairs of increasingly noisy studies further out.
void funnel_fixture(std::vector<double>& y, std::vector<double>& s) {
    y = {0.5};
    s = {0.05};
    for (double dev : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}) {
        y.push_back(0.5 + dev);
        s.push_back(dev);
        y.push_back(0.5 - dev);
        s.push_back(dev);
    }
}

}  // namespace

TEST_CASE("trim-and-fill finds nothing to trim in mirror-symmetric data") {
    std::vector<double> y, s;
    funnel_fixture(y, s);
    const auto r = trim_and_fill(Dataset(y, s));
    CHECK(r.method == Method::trim_fill);
    CHECK(r.extras.at("k0") == 0.0);
    CHECK(r.p_value >= 0.5);
    CHECK(r.extras.at("center") == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.extras.at("filled_estimate") == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("trim-and-fill recovers a one-sided deletion within one study") {
    std::vector<double> y, s;
    funnel_fixture(y, s);
    // suppress the three most positive studies
    std::vector<double> y2, s2;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.5 + 0.45) continue;
        y2.push_back(y[i]);
        s2.push_back(s[i]);
    }
    REQUIRE(y2.size() == y.size() - 3);
    const auto r = trim_and_fill(Dataset(y2, s2));
    const double k0 = r.extras.at("k0");
    CHECK(k0 >= 2.0);
    CHECK(k0 <= 4.0);
    CHECK(r.extras.at("side_right") == 1.0);
    CHECK(std::isfinite(r.extras.at("filled_estimate")));
    // filling pushes the pooled estimate back toward the suppressed side
    CHECK(r.extras.at("filled_estimate") >= r.extras.at("center") - 1e-12);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("trim-and-fill forced sides agree with the auto pick") {
    std::vector<double> y, s;
    funnel_fixture(y, s);
    std::vector<double> y2, s2;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.5 + 0.45) continue;
        y2.push_back(y[i]);
        s2.push_back(s[i]);
    }
    const Dataset d(y2, s2);
    const auto auto_pick = trim_and_fill(d);
    const auto right = trim_and_fill(d, TrimFillEstimator::L0, TrimFillSide::right);
    CHECK(auto_pick.extras.at("k0") == right.extras.at("k0"));
    CHECK(auto_pick.statistic == doctest::Approx(right.statistic));
    const auto left = trim_and_fill(d, TrimFillEstimator::L0, TrimFillSide::left);
    CHECK(left.extras.at("k0") <= auto_pick.extras.at("k0"));
}

TEST_CASE("trim-and-fill R0 estimator runs and stays sane") {
    std::vector<double> y, s;
    funnel_fixture(y, s);
    std::vector<double> y2, s2;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.5 + 0.45) continue;
        y2.push_back(y[i]);
        s2.push_back(s[i]);
    }
    const auto r = trim_and_fill(Dataset(y2, s2), TrimFillEstimator::R0);
    CHECK(r.extras.at("k0") >= 0.0);
    CHECK(r.extras.at("k0") <= 4.0);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
}
