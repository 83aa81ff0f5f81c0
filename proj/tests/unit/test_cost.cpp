#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tvhc/cost.hpp"
#include "tvhc/rng.hpp"

using namespace tvhc;
using tvhc::testing::exp_expectation;
using tvhc::testing::simpson_split;

TEST_CASE("eval on the basic variants") {
    CHECK(eval(HoldingCostFn::constant(5.0), 3.7) == 5.0);
    const auto dl = HoldingCostFn::deadline(10.0, 10.0);
    CHECK(eval(dl, 9.99) == 0.0);
    CHECK(eval(dl, 10.0) == 10.0);
    CHECK(eval(HoldingCostFn::polynomial({0, 0, 1}), 3.0) == doctest::Approx(9.0));

    const auto pl = HoldingCostFn::piecewise_linear({{1.0, 2.0}, {3.0, 6.0}});
    CHECK(eval(pl, 0.5) == 2.0);
    CHECK(eval(pl, 2.0) == doctest::Approx(4.0));
    CHECK(eval(pl, 5.0) == doctest::Approx(10.0));
    CHECK_THROWS_AS(eval(pl, -1.0), std::domain_error);
}

TEST_CASE("construction rejects illegal cost functions") {
    CHECK_THROWS_AS(HoldingCostFn::constant(-1.0), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::polynomial({5.0, -1.0}), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::polynomial({0.0, 3.0, -1.0}), InvalidCost);
    // Decreasing on [0, 1) even though the leading coefficient is positive.
    CHECK_THROWS_AS(HoldingCostFn::polynomial({1.0, -2.0, 1.0}), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::polynomial({}), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::deadline(-1.0, 2.0), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::deadline(1.0, NAN), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::piecewise_linear({{0.0, 3.0}, {1.0, 2.0}}), InvalidCost);
    CHECK_THROWS_AS(HoldingCostFn::piecewise_linear({{1.0, 3.0}, {1.0, 4.0}}), InvalidCost);
    CHECK_NOTHROW(HoldingCostFn::polynomial({1.0, 0.0, 0.0}));
    CHECK(HoldingCostFn::polynomial({1.0, 2.0, 0.0, 0.0}).degree() == 1);
}

TEST_CASE("limits and breakpoints") {
    CHECK(HoldingCostFn::constant(2.0).limit() == 2.0);
    CHECK(HoldingCostFn::deadline(10.0, 10.0).limit() == 10.0);
    CHECK(std::isinf(HoldingCostFn::polynomial({0, 1}).limit()));
    CHECK(HoldingCostFn::piecewise_linear({{0, 0}, {2, 3}, {4, 3}}).limit() == 3.0);
    CHECK(HoldingCostFn::deadline(10.0, 10.0).breakpoints() == std::vector<double>{10.0});
}

TEST_CASE("cumulative") {
    CHECK(cumulative(HoldingCostFn::constant(2.0), 5.0) == doctest::Approx(10.0));
    CHECK(cumulative(HoldingCostFn::polynomial({0, 0, 1}), 3.0) == doctest::Approx(9.0));

    const auto dl = HoldingCostFn::deadline(10.0, 10.0);
    const double oracle = simpson_split([&](double s) { return eval(dl, s); }, 0.0, 12.0, {10.0});
    CHECK(oracle == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(cumulative(dl, 12.0) == doctest::Approx(oracle).epsilon(1e-9));

    const auto pl = HoldingCostFn::piecewise_linear({{1.0, 1.0}, {2.0, 3.0}, {5.0, 4.0}});
    for (double t : {0.5, 1.5, 3.0, 7.0}) {
        const double ref = simpson_split([&](double s) { return eval(pl, s); }, 0.0, t, {1.0, 2.0, 5.0});
        CHECK(cumulative(pl, t) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("derivative") {
    CHECK(derivative(HoldingCostFn::polynomial({1, 2, 3}), 2.0) == doctest::Approx(14.0));
    CHECK(derivative(HoldingCostFn::deadline(10.0, 10.0), 3.0) == 0.0);
    CHECK_THROWS_AS(derivative(HoldingCostFn::deadline(10.0, 10.0), 10.0), std::domain_error);
    CHECK(derivative(HoldingCostFn::piecewise_linear({{0, 0}, {2, 4}}), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("exp_shift_mean examples") {
    CHECK(exp_shift_mean(HoldingCostFn::constant(7.0), 2.5, 0.3) == 7.0);

    const auto sq = HoldingCostFn::polynomial({0, 0, 1});
    const double ref = exp_expectation([](double s) { return s * s; }, 1.0);
    CHECK(ref == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(exp_shift_mean(sq, 0.0, 1.0) == doctest::Approx(ref).epsilon(1e-10));

    const auto dl = HoldingCostFn::deadline(10.0, 10.0);
    for (double t : {0.0, 4.0, 8.8662, 9.9}) {
        const double closed = 10.0 * std::exp(-3.0 * (10.0 - t));
        const double quad = exp_expectation([&](double s) { return eval(dl, t + s); }, 3.0, {10.0 - t});
        CHECK(exp_shift_mean(dl, t, 3.0) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(quad == doctest::Approx(closed).epsilon(1e-8));
    }
    CHECK(exp_shift_mean(dl, 8.8662, 3.0) == doctest::Approx(0.3334).epsilon(1e-3));
    CHECK(exp_shift_mean(dl, 11.0, 3.0) == 10.0);
    CHECK_THROWS_AS(exp_shift_mean(dl, 1.0, 0.0), std::domain_error);
}

TEST_CASE("exp_shift_mean matches a Simpson oracle on random non-decreasing costs") {
    Xoshiro256 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int degree = 1 + trial % 6;
        std::vector<double> coeffs(degree + 1);
        for (double& c : coeffs) {
            c = rng.uniform() * 3.0;
        }
        const auto f = HoldingCostFn::polynomial(coeffs);
        const double t = rng.uniform() * 5.0;
        const double theta = 0.5 + rng.uniform() * 4.0;
        const double ref = exp_expectation([&](double s) { return eval(f, t + s); }, theta, {}, 200000);
        CAPTURE(degree);
        CAPTURE(t);
        CAPTURE(theta);
        CHECK(exp_shift_mean(f, t, theta) == doctest::Approx(ref).epsilon(1e-8));
        CHECK(exp_shift_mean_quadrature(f, t, theta) == doctest::Approx(ref).epsilon(1e-8));
    }
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Knot> knots;
        double t = rng.uniform(), rate = rng.uniform();
        std::vector<double> cuts;
        for (int k = 0; k < 4; ++k) {
            knots.push_back({t, rate});
            t += 0.5 + rng.uniform() * 3.0;
            rate += rng.uniform() * 2.0;
        }
        const auto f = HoldingCostFn::piecewise_linear(knots);
        const double x = rng.uniform() * 4.0;
        const double theta = 0.5 + rng.uniform() * 2.0;
        for (const Knot& k : knots) {
            if (k.t > x) {
                cuts.push_back(k.t - x);
            }
        }
        const double ref = exp_expectation([&](double s) { return eval(f, x + s); }, theta, cuts, 200000);
        CHECK(exp_shift_mean(f, x, theta) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("NetCost extends to negative ages by its value at 0") {
    const NetCost nc{HoldingCostFn::polynomial({1, 1}), 2.0, 3.0, 1.0};
    CHECK(nc(0.0) == doctest::Approx(1.0));
    CHECK(nc(2.0) == doctest::Approx(7.0));
    CHECK(nc(-4.0) == nc(0.0));
    CHECK(nc.integral(2.0) == doctest::Approx(3.0 * 2.0 + 3.0 * 2.0 - 2.0 * 2.0));
    CHECK(nc.integral(-2.0) == doctest::Approx(-2.0 * nc(0.0)));
    CHECK(nc.derivative(-1.0) == 0.0);
    CHECK(nc.derivative(1.0) == doctest::Approx(3.0));
    const auto bps = nc.breakpoints();
    CHECK(std::find(bps.begin(), bps.end(), 0.0) != bps.end());
    const double ref = exp_expectation([&](double s) { return nc(-1.5 + s); }, 2.0, {1.5}, 200000);
    CHECK(exp_shift_mean(nc, -1.5, 2.0) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("bandit_r closed cases") {
    const NetCost k{HoldingCostFn::constant(4.0), 0.0, 1.0, 1.0};
    CHECK(bandit_r(k, 0.7, 2.0) == doctest::Approx(4.0 + 0.7 * 4.0 * 2.0));
    const NetCost sq{HoldingCostFn::polynomial({1, 0, 1}), 0.5, 2.0, 1.0};
    CHECK(bandit_r(sq, 3.0, 0.0) == doctest::Approx(sq(0.0)));
}

TEST_CASE("bandit_r against a Monte Carlo model of the younger jobs") {
    // r(t1) = c(t1) + E[sum of c over the ages of Poisson(lambda1) arrivals
    // behind the oldest job].
    const NetCost lin{HoldingCostFn::polynomial({0, 1}), 0.0, 1.0, 1.0};
    const double lambda1 = 2.0;
    const double t1 = 3.0;
    std::mt19937_64 gen(99);
    std::exponential_distribution<double> gap(lambda1);
    const int reps = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        double v = lin(t1);
        for (double s = gap(gen); s < t1; s += gap(gen)) {
            v += lin(t1 - s);
        }
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
    // 4 sigma keeps the false-alarm rate of this fixed-seed check below 1e-4.
    CHECK(std::abs(mean - 12.0) < 4.0 * se);
    CHECK(bandit_r(lin, lambda1, t1) == doctest::Approx(12.0));
    CHECK(std::abs(bandit_r(lin, lambda1, t1) - mean) < 4.0 * se);
}

TEST_CASE("r' finite-difference residual") {
    const NetCost lin{HoldingCostFn::polynomial({0, 1}), 0.0, 1.0, 1.0};
    CHECK(r_derivative_residual(lin, 2.0, 3.0, 1e-4) < 1e-6);
    const NetCost k{HoldingCostFn::constant(3.0), 1.0, 2.0, 1.0};
    CHECK(r_derivative_residual(k, 0.8, 5.0, 1e-4) < 1e-9);
    const NetCost sq{HoldingCostFn::polynomial({0, 0, 1}), 0.0, 1.0, 1.0};
    CHECK(r_derivative_residual(sq, 1.0, 2.0, 1e-4) < 1e-6);
    const NetCost dl{HoldingCostFn::deadline(10.0, 10.0), 1.0, 3.0, 1.0};
    CHECK_THROWS_AS(r_derivative_residual(dl, 1.0, 10.0 - 5e-5, 1e-4), std::domain_error);
    CHECK(r_derivative_residual(dl, 1.0, 11.0, 1e-4) < 1e-6);
}
