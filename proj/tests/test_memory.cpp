#include <doctest.h>

#include <cmath>
#include <random>

#include "fracmem/memory.hpp"
#include "fracmem/spectral.hpp"
#include "oracles.hpp"

using namespace fracmem;

TEST_SUITE_BEGIN("memory");

TEST_CASE("first-row weights have their closed-form values") {
    const std::vector<double> w = product_integration_weights(0.5, 1.0, 1);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("weights sum to the exact kernel integral") {
    for (double gamma : {0.25, 0.5, 0.9}) {
        for (double dt : {0.1, 0.73}) {
            ProductIntegrationWeights w(gamma, dt);
            for (std::size_t j : {std::size_t{1}, std::size_t{4}, std::size_t{57}}) {
                const std::vector<double> row = w.row(j);
                double sum = 0.0;
                for (double x : row) sum += x;
                CHECK(sum == doctest::Approx(w.total(j)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("weights are nonnegative") {
    for (double gamma : {0.1, 0.5, 0.95}) {
        const std::vector<double> row = product_integration_weights(gamma, 0.3, 40);
        for (double x : row) CHECK(x >= 0.0);
    }
}

TEST_CASE("vanishing memory exponent recovers trapezoidal weights") {
    const double dt = 0.4;
    const std::vector<double> row = product_integration_weights(1e-12, dt, 6);
    CHECK(row.front() == doctest::Approx(dt / 2.0).epsilon(1e-9));
    CHECK(row.back() == doctest::Approx(dt / 2.0).epsilon(1e-9));
    for (std::size_t k = 1; k + 1 < row.size(); ++k)
        CHECK(row[k] == doctest::Approx(dt).epsilon(1e-9));
}

TEST_CASE("interior weights depend only on the lag") {
    ProductIntegrationWeights w(0.65, 0.2);
    const std::vector<double> row9 = w.row(9);
    const std::vector<double> row23 = w.row(23);
    for (std::size_t lag = 1; lag <= 8; ++lag) {
        CHECK(row9[9 - lag] == doctest::Approx(row23[23 - lag]).epsilon(1e-13));
        CHECK(w.interior(lag) == doctest::Approx(row9[9 - lag]).epsilon(1e-13));
    }
}

TEST_CASE("quadrature is exact on linear samples") {
    const double gamma = 0.35, dt = 0.17;
    ProductIntegrationWeights w(gamma, dt);
    for (std::size_t j : {std::size_t{1}, std::size_t{7}, std::size_t{30}}) {
        const std::vector<double> row = w.row(j);
        double acc = 0.0;
        for (std::size_t k = 0; k <= j; ++k) acc += row[k] * (2.0 + 3.0 * (k * dt));
        const double t = j * dt;
        const double exact = 2.0 * oracles::fractional_integral_of_power(gamma, 0, t) +
                             3.0 * oracles::fractional_integral_of_power(gamma, 1, t);
        CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("memory history evaluates the convolution") {
    auto grid = TorusGrid::make(1, 4.0, 8);
    const std::size_t n = grid->num_points();

    SUBCASE("constant history against the closed form") {
        MemoryHistory h(grid, 0.5, 1.0);
        for (int j = 0; j <= 4; ++j) h.append(std::vector<double>(n, 1.0));
        const std::vector<double> f = h.evaluate(4);
        for (double x : f) CHECK(x == doctest::Approx(4.0).epsilon(1e-13));  // 2 sqrt(4)
    }
    SUBCASE("linear-in-time history hits the Beta identity") {
        const double dt = 0.125;
        MemoryHistory h(grid, 0.5, dt);
        const std::size_t steps = 8;  // t = 1
        for (std::size_t j = 0; j <= steps; ++j)
            h.append(std::vector<double>(n, static_cast<double>(j) * dt));
        const std::vector<double> f = h.evaluate(steps);
        const double exact = oracles::fractional_integral_of_power(0.5, 1, 1.0);  // 4/3
        for (double x : f) CHECK(x == doctest::Approx(exact).epsilon(1e-12));
        CHECK(exact == doctest::Approx(4.0 / 3.0));
    }
    SUBCASE("zero history yields the zero field") {
        MemoryHistory h(grid, 0.7, 0.2);
        h.append(std::vector<double>(n, 0.0));
        h.append(std::vector<double>(n, 0.0));
        for (double x : h.evaluate(1)) CHECK(x == 0.0);
        const Field f = evaluate_memory_integral(h, 1);
        CHECK(l2_norm(f) == 0.0);
    }
    SUBCASE("missing samples are reported") {
        MemoryHistory h(grid, 0.5, 0.1);
        h.append(std::vector<double>(n, 1.0));
        CHECK_THROWS_AS(h.evaluate(1), std::out_of_range);
    }
}

TEST_CASE("history scales linearly and preserves positivity") {
    auto grid = TorusGrid::make(1, 4.0, 16);
    const std::size_t n = grid->num_points();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MemoryHistory h(grid, 0.4, 0.3), h3(grid, 0.4, 0.3);
    for (int j = 0; j <= 6; ++j) {
        std::vector<double> g(n), g3(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = unit(rng);
            g3[i] = 3.0 * g[i];
        }
        h.append(std::move(g));
        h3.append(std::move(g3));
    }
    const std::vector<double> f = h.evaluate(6);
    const std::vector<double> f3 = h3.evaluate(6);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(f[i] >= 0.0);
        CHECK(f3[i] == doctest::Approx(3.0 * f[i]).epsilon(1e-13));
    }
}

TEST_CASE("history budget violations raise a sizing error") {
    auto grid = TorusGrid::make(1, 4.0, 16);
    MemoryHistory h(grid, 0.5, 0.1, 40);  // room for two samples of 16 points
    h.append(std::vector<double>(16, 1.0));
    h.append(std::vector<double>(16, 1.0));
    CHECK_THROWS_WITH_AS(h.append(std::vector<double>(16, 1.0)),
                         doctest::Contains("budget"), std::runtime_error);
}

TEST_CASE("nonuniform product integration matches the Beta oracle") {
    for (double gamma : {0.25, 0.75}) {
        const double tau = 7.0;
        std::vector<double> nodes{0.0};
        for (int i = 0; i <= 3000; ++i)
            nodes.push_back(tau * std::pow(10.0, -8.0 + 8.0 * i / 3000.0));
        nodes.back() = tau;
        std::vector<double> vals(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = nodes[i] * nodes[i];
        const double got = fractional_integral_nonuniform(gamma, nodes, vals, tau);
        const double exact = oracles::fractional_integral_of_power(gamma, 2, tau);
        CHECK(got == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("nonuniform product integration agrees with the uniform weights") {
    const double gamma = 0.6, dt = 0.25;
    const std::size_t j = 13;
    std::vector<double> nodes(j + 1), vals(j + 1);
    for (std::size_t k = 0; k <= j; ++k) {
        nodes[k] = k * dt;
        vals[k] = std::sin(0.7 * k) + 2.0;
    }
    const std::vector<double> row = product_integration_weights(gamma, dt, j);
    double via_row = 0.0;
    for (std::size_t k = 0; k <= j; ++k) via_row += row[k] * vals[k];
    const double via_nodes = fractional_integral_nonuniform(gamma, nodes, vals, j * dt);
    CHECK(via_nodes == doctest::Approx(via_row).epsilon(1e-12));
}

TEST_CASE("convergence probe reports errors and slope against the Beta oracle") {
    const std::vector<double> dts{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256,
                                  1.0 / 512};

    SUBCASE("smooth quadratic") {
        const double gamma = 0.5;
        const OrderProbe probe = convergence_order_probe(
            gamma, [](double s) { return s * s; },
            oracles::fractional_integral_of_power(gamma, 2, 1.0), 1.0, dts);
        REQUIRE_FALSE(probe.errors_at_roundoff);
        // Piecewise-linear product integration is second order against smooth
        // integrands: the interpolation error is O(dt^2) uniformly and the
        // kernel is integrable.
        CHECK(probe.order == doctest::Approx(2.0).epsilon(0.05));
        for (std::size_t i = 1; i < probe.errors.size(); ++i)
            CHECK(probe.errors[i] < probe.errors[i - 1]);
    }
    SUBCASE("constants are integrated exactly") {
        const double gamma = 0.3;
        const OrderProbe probe = convergence_order_probe(
            gamma, [](double) { return 1.0; },
            oracles::fractional_integral_of_power(gamma, 0, 1.0), 1.0, dts);
        CHECK(probe.errors_at_roundoff);
        for (double e : probe.errors) CHECK(e <= 1e-13);
    }
    SUBCASE("linears are integrated exactly") {
        const double gamma = 0.8;
        const OrderProbe probe = convergence_order_probe(
            gamma, [](double s) { return 2.0 * s; },
            2.0 * oracles::fractional_integral_of_power(gamma, 1, 1.0), 1.0, dts);
        CHECK(probe.errors_at_roundoff);
        for (double e : probe.errors) CHECK(e <= 1e-12);
    }
}

TEST_SUITE_END();
