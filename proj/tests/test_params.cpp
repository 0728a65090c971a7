#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracmem/params.hpp"

using namespace fracmem;

TEST_SUITE_BEGIN("params");

TEST_CASE("validate_params accepts the reference configuration") {
    const ModelParams p = validate_params(2.0, 1.0, 0.8, 2.0, 1.0, 3);
    CHECK(p.theorem_compliant);  // 2 in (1.25, 3]
    CHECK_FALSE(p.below_unit_order);
}

TEST_CASE("validate_params rejects boundary violations with named fields") {
    CHECK_THROWS_WITH_AS(validate_params(1.0, 1.0, 0.5, 1.0, 1.0, 1),
                         doctest::Contains("power"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_params(0.0, 1.0, 0.5, 2.0, 1.0, 1),
                         doctest::Contains("damping"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_params(1.0, -1.0, 0.5, 2.0, 1.0, 1),
                         doctest::Contains("mass"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_params(1.0, 1.0, 1.0, 2.0, 1.0, 1),
                         doctest::Contains("memory_exponent"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_params(1.0, 1.0, 0.5, 2.0, 0.0, 1),
                         doctest::Contains("laplacian_order"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_params(1.0, 1.0, 0.5, 2.0, 1.0, 0),
                         doctest::Contains("dim"), std::invalid_argument);
}

TEST_CASE("low dimension admits every power above the memory threshold") {
    const ModelParams p = validate_params(1.0, 1.0, 0.5, 3.0, 1.0, 1);
    CHECK(p.theorem_compliant);  // n <= 2 sigma and 3 > 1/0.5
}

TEST_CASE("sigma below one is accepted and flagged") {
    const ModelParams p = validate_params(1.0, 1.0, 0.5, 3.0, 0.8, 1);
    CHECK(p.below_unit_order);
}

TEST_CASE("power at the memory threshold is non-compliant (strict inequality)") {
    const ModelParams p = validate_params(1.0, 1.0, 0.5, 2.0, 1.0, 1);
    CHECK_FALSE(p.theorem_compliant);  // p = 1/gamma exactly
}

TEST_CASE("power exactly at the upper endpoint is compliant (inclusive)") {
    // n=3, sigma=1: upper endpoint n/(n-2 sigma) = 3
    const ModelParams p = validate_params(2.0, 1.0, 0.8, 3.0, 1.0, 3);
    CHECK(p.theorem_compliant);
}

TEST_CASE("admissible_exponent_interval reference values") {
    SUBCASE("n=3, sigma=1, gamma=0.8 gives (1.25, 3]") {
        const AdmissibleRange r = admissible_exponent_interval(3, 1.0, 0.8);
        CHECK(r.lower == doctest::Approx(1.25));
        CHECK(r.upper == doctest::Approx(3.0));
        CHECK_FALSE(r.unbounded);
        CHECK_FALSE(r.empty);
    }
    SUBCASE("n=3, sigma=1, gamma=0.3 is empty") {
        const AdmissibleRange r = admissible_exponent_interval(3, 1.0, 0.3);
        CHECK(r.empty);
    }
    SUBCASE("n=1, sigma=1, gamma=0.6 is (5/3, inf)") {
        const AdmissibleRange r = admissible_exponent_interval(1, 1.0, 0.6);
        CHECK(r.lower == doctest::Approx(5.0 / 3.0));
        CHECK(r.unbounded);
        CHECK_FALSE(r.empty);
    }
}

TEST_CASE("emptiness criterion matches the direct bound comparison on a grid") {
    for (int n = 1; n <= 3; ++n) {
        for (double sigma : {0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0}) {
            for (int gi = 1; gi <= 39; ++gi) {
                const double gamma = gi / 40.0;
                const AdmissibleRange r = admissible_exponent_interval(n, sigma, gamma);
                const bool empty_predicted =
                    n > 2.0 * sigma && gamma <= 1.0 - 2.0 * sigma / n + 1e-12;
                CHECK_MESSAGE(r.empty == empty_predicted,
                              "n=", n, " sigma=", sigma, " gamma=", gamma);
            }
        }
    }
}

TEST_CASE("linear_decay_rate reference values and bounds") {
    CHECK(linear_decay_rate(2.0, 1.0) == doctest::Approx(2.0 - std::sqrt(3.0)));
    CHECK(linear_decay_rate(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(linear_decay_rate(1.0, 1.0) == doctest::Approx(1.0));

    for (double a : {0.1, 0.5, 1.0, 2.0, 7.0}) {
        for (double m : {0.1, 0.9, 1.0, 3.0, 10.0}) {
            const double rate = linear_decay_rate(a, m);
            CHECK(rate > 0.0);
            CHECK(rate <= a + 1e-15);
            if (m >= a) CHECK(rate == doctest::Approx(a));
        }
    }
}

TEST_CASE("gn_theta reference values") {
    CHECK(gn_theta(2, 1.0, 4.0).value == doctest::Approx(0.5));
    const GnTheta boundary = gn_theta(3, 1.0, 6.0);
    CHECK(boundary.value == doctest::Approx(1.0));
    CHECK(boundary.within_unit_interval);
    CHECK(gn_theta(5, 1.0, 2.0).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(gn_theta(1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gn_theta validity agrees with the admissible upper bound at q = 2p") {
    for (int n = 1; n <= 3; ++n) {
        for (double sigma : {0.5, 1.0, 1.5}) {
            for (double p : {1.1, 1.5, 2.0, 3.0, 5.0, 9.0}) {
                const GnTheta t = gn_theta(n, sigma, 2.0 * p);
                const bool within_upper =
                    n <= 2.0 * sigma || boundary_le(p, n / (n - 2.0 * sigma));
                CHECK_MESSAGE(t.within_unit_interval == within_upper,
                              "n=", n, " sigma=", sigma, " p=", p);
            }
        }
    }
}

TEST_SUITE_END();
