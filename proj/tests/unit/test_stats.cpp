#include <initializer_list>
#include <cmath>
#include <limits>

#include "doctest.h"

#include "copasbias/stats.hpp"

// Reference p-values computed with 50-digit arithmetic.

using namespace copasbias;

TEST_CASE("two-sided t p-values match references") {
    CHECK(t_two_sided_p(2.0, 10) == doctest::Approx(0.07338803477074036561786).epsilon(1e-12));
    CHECK(t_two_sided_p(-1.5, 3) == doctest::Approx(0.2305838652448230522818).epsilon(1e-12));
    CHECK(t_two_sided_p(0.5, 38) == doctest::Approx(0.6199583140362965850019).epsilon(1e-12));
    CHECK(t_two_sided_p(4.2, 18) == doctest::Approx(0.0005382186590030325026677).epsilon(1e-11));
    CHECK(t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("t p-value edge cases") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(t_two_sided_p(inf, 7) == 0.0);
    CHECK(t_two_sided_p(-inf, 7) == 0.0);
    CHECK(std::isnan(t_two_sided_p(std::numeric_limits<double>::quiet_NaN(), 7)));
    // symmetric in the sign of t, decreasing in |t|
    CHECK(t_two_sided_p(1.7, 12) == doctest::Approx(t_two_sided_p(-1.7, 12)).epsilon(1e-15));
    CHECK(t_two_sided_p(2.5, 12) < t_two_sided_p(1.5, 12));
}

TEST_CASE("regularized incomplete beta basics") {
    CHECK(betainc(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(betainc(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // I_x(1,1) = x
    for (double x : {0.1, 0.45, 0.8}) CHECK(betainc(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-13));
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(betainc(2.5, 4.0, 0.3) ==
          doctest::Approx(1.0 - betainc(4.0, 2.5, 0.7)).epsilon(1e-12));
}
