#include <initializer_list>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "copasbias/data.hpp"
#include "copasbias/errors.hpp"
#include "copasbias/model.hpp"
#include "copasbias/rng.hpp"

// Fixture references computed with 50-digit arithmetic on the model's
// log-likelihood (additive constant dropped).

using namespace copasbias;
using model::CopasParams;

namespace {

Dataset fixture5() {
    return Dataset({1.1, -0.6, 0.45, 0.0, 0.9}, {0.3, 0.5, 0.2, 0.4, 0.25});
}

const CopasParams kFixtureParams{0.3, 0.05, 0.4, -0.5, 0.8};

Dataset random_dataset(Rng& rng, int n) {
    std::vector<double> y(n), s(n);
    for (int i = 0; i < n; ++i) {
        s[i] = 0.05 + rng.uniform01() * 1.5;
        y[i] = -0.5 + rng.uniform01() + s[i] * rng.normal();
    }
    return Dataset(y, s);
}

CopasParams random_params(Rng& rng) {
    CopasParams p;
    p.mu = -0.5 + rng.uniform01();
    p.tau2 = 0.01 + rng.uniform01() * 0.5;
    p.rho = -0.85 + 1.7 * rng.uniform01();
    p.gamma0 = -2.0 + 4.0 * rng.uniform01();
    p.gamma1 = 2.0 * rng.uniform01();
    return p;
}

}  // namespace

TEST_CASE("selection probability is the normal cdf of the propensity mean") {
    CHECK(model::selection_prob(-1.0, 0.65, 0.2) ==
          doctest::Approx(0.9877755273449552968474).epsilon(1e-12));
    CHECK(model::selection_prob(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    // more precise studies are more likely to be published when gamma1 > 0
    CHECK(model::selection_prob(-1.0, 0.65, 0.1) > model::selection_prob(-1.0, 0.65, 1.0));
}

TEST_CASE("log-likelihood matches the high-precision reference") {
    CHECK(model::copas_loglik(kFixtureParams, fixture5()) ==
          doctest::Approx(-1.122997780883927429503801).epsilon(1e-12));
}

TEST_CASE("log-likelihood reduces exactly to the random-effects form at rho=0") {
    const Dataset d = fixture5();
    CopasParams p = kFixtureParams;
    p.rho = 0.0;
    CHECK(model::copas_loglik(p, d) == model::random_effects_loglik(d, p.mu, p.tau2));
    // and continuously: small rho stays close
    p.rho = 1e-9;
    CHECK(model::copas_loglik(p, d) ==
          doctest::Approx(model::random_effects_loglik(d, p.mu, p.tau2)).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches the high-precision reference") {
    const auto g = model::copas_loglik_grad(kFixtureParams, fixture5());
    CHECK(g[0] == doctest::Approx(7.787646185572837698446125).epsilon(1e-10));
    CHECK(g[1] == doctest::Approx(20.91219790732303146805387).epsilon(1e-10));
    CHECK(g[2] == doctest::Approx(-0.6982223900722226121618149).epsilon(1e-10));
}

TEST_CASE("analytic gradient agrees with central differences on random fixtures") {
    Rng rng(314159);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 5 + static_cast<int>(rng.below(46));
        const Dataset d = random_dataset(rng, n);
        const CopasParams p = random_params(rng);
        const auto g = model::copas_loglik_grad(p, d);

        auto fd = [&](int k) {
            const double h = 1e-6;
            CopasParams lo = p, hi = p;
            double* fields_lo[] = {&lo.mu, &lo.tau2, &lo.rho};
            double* fields_hi[] = {&hi.mu, &hi.tau2, &hi.rho};
            *fields_lo[k] -= h;
            *fields_hi[k] += h;
            return (model::copas_loglik(hi, d) - model::copas_loglik(lo, d)) / (2 * h);
        };
        for (int k = 0; k < 3; ++k) {
            const double approx = fd(k);
            const double scale = std::max(1.0, std::abs(approx));
            CHECK(std::abs(g[k] - approx) / scale < 1e-5);
        }
    }
}

TEST_CASE("per-study null scores match the references") {
    const Dataset d = fixture5();
    const auto s = model::score_rho_at_null(-0.5, 0.8, 0.3, 0.05, d);
    REQUIRE(s.size() == 5);
    CHECK(s[0] == doctest::Approx(0.0664092791308015123013).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(-0.3780694599434845564172).epsilon(1e-12));
    CHECK(s[2] == doctest::Approx(0.0002909619178849119990061).epsilon(1e-12));
    CHECK(s[3] == doctest::Approx(-0.07930842883362900354418).epsilon(1e-12));
    CHECK(s[4] == doctest::Approx(0.01394291948917031830709).epsilon(1e-12));
}

TEST_CASE("null scores equal the rho-gradient at rho=0") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset d = random_dataset(rng, 12);
        CopasParams p = random_params(rng);
        p.rho = 0.0;
        const auto s = model::score_rho_at_null(p.gamma0, p.gamma1, p.mu, p.tau2, d);
        double total = 0.0;
        for (double v : s) total += v;
        CHECK(model::copas_loglik_grad(p, d)[2] == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("efficient information matches the outer-product reference at the MLE") {
    // reference evaluated at the fixture's own null MLE (high-precision).
    const Dataset d = fixture5();
    const double mu_hat = 0.4856559099440848859258;
    const double tau2_hat = 0.1561259967122743617344;
    const double info = model::efficient_information(-0.5, 0.8, mu_hat, tau2_hat, d);
    CHECK(info == doctest::Approx(0.03582406720995889580483331).epsilon(1e-10));
    // projection can only remove information, never add it
    const auto row = model::detail::rho_info_row(-0.5, 0.8, mu_hat, tau2_hat, d);
    CHECK(info <= row.i_rr + 1e-9);
    CHECK(row.i_rr == doctest::Approx(0.1216315439635441571924664).epsilon(1e-10));
}

TEST_CASE("duplicating every study doubles score and information") {
    const Dataset d = fixture5();
    std::vector<double> y2, s2;
    for (const auto& st : d.studies()) {
        y2.insert(y2.end(), {st.y, st.y});
        s2.insert(s2.end(), {st.s, st.s});
    }
    const Dataset dd(y2, s2);
    const double mu = 0.4856559099440848859258, t2 = 0.1561259967122743617344;
    const auto one = model::efficient_score_parts(-0.5, 0.8, mu, t2, d);
    const auto two = model::efficient_score_parts(-0.5, 0.8, mu, t2, dd);
    CHECK(two.score_total == doctest::Approx(2.0 * one.score_total).epsilon(1e-10));
    CHECK(two.info_efficient == doctest::Approx(2.0 * one.info_efficient).epsilon(1e-10));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(model::copas_loglik({0.0, -0.1, 0.0, 0.0, 0.0}, fixture5()), data_error);
    CHECK_THROWS_AS(model::copas_loglik({0.0, 0.1, 1.0, 0.0, 0.0}, fixture5()), data_error);
    CHECK_THROWS_AS(model::copas_loglik({0.0, 0.1, -1.2, 0.0, 0.0}, fixture5()), data_error);
}
