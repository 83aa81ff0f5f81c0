#include <doctest.h>

#include <cmath>

#include "tvhc/family.hpp"
#include "tvhc/params.hpp"
#include "tvhc/policy.hpp"
#include "tvhc/rng.hpp"

using namespace tvhc;

namespace {

const SystemParams kDeadlineLightLoad{0.0, 0.0, 3.0, 1.0};

}  // namespace

TEST_CASE("system parameters") {
    const SystemParams p = deadline_family().params_at(0.8);
    CHECK(p.lambda1 == doctest::Approx(1.8));
    CHECK(p.lambda2 == doctest::Approx(0.2));
    CHECK(p.rho() == doctest::Approx(0.8));
    CHECK(p.mean_work() == doctest::Approx(2.0));
    CHECK_THROWS_AS(deadline_family().params_at(1.0).validate(), UnstableSystem);
    CHECK_THROWS_AS((SystemParams{-0.1, 0.1, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SystemParams{0.1, 0.1, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((SystemParams{0.0, 0.1, 1.0, 1.0}.validate()));
    CHECK_NOTHROW((SystemParams{0.5, 0.0, 1.0, 1.0}.validate()));
    const SystemParams q = quadratic_family().params_at(0.5);
    CHECK(q.lambda1 == doctest::Approx(0.45));
    CHECK(q.lambda2 == doctest::Approx(0.15));
}

TEST_CASE("index functions") {
    const auto k = HoldingCostFn::constant(2.5);
    const SystemParams p{0.4, 0.3, 2.0, 1.0};
    for (double t : {0.0, 1.0, 30.0}) {
        CHECK(index_class1(PolicySpec::lookahead(), t, p, k) == doctest::Approx(5.0));
    }
    const auto dl = HoldingCostFn::deadline(10.0, 10.0);
    CHECK(index_class1(PolicySpec::gen_cmu(), 9.0, kDeadlineLightLoad, dl) == 0.0);
    CHECK(index_class1(PolicySpec::lookahead(), 8.8662, kDeadlineLightLoad, dl) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(index_class1(PolicySpec::pprio12(), 0.0, p, k) == INFINITY);
    CHECK(index_class1(PolicySpec::pprio21(), 5.0, p, k) == -INFINITY);
    CHECK(index_class1(PolicySpec::overtake(2.0), 1.0, p, k) == -INFINITY);
    CHECK(index_class1(PolicySpec::overtake(2.0), 2.0, p, k) == INFINITY);
    CHECK_THROWS_AS(index_class1(PolicySpec::fcfs(), 1.0, p, k), std::invalid_argument);

    CHECK(index_class2(SystemParams{0.1, 0.1, 1.0, 3.0}, 30.0) == 90.0);
    CHECK(index_class2(SystemParams{0.1, 0.1, 3.0, 1.0}, 1.0) == 1.0);
    CHECK(index_class2(SystemParams{0.1, 0.1, 3.0, 1.0}, 0.0) == 0.0);
}

TEST_CASE("overtake ages in the deadline setting") {
    const FamilySetup s = deadline_family();
    const SystemParams p0 = s.params_at(0.0);
    const AlphaDecision gen = overtake_age(PolicySpec::gen_cmu(), p0, s.c1, s.c2);
    REQUIRE(gen.is_finite());
    CHECK(gen.age() == doctest::Approx(10.0).epsilon(1e-9));
    const AlphaDecision aalto = overtake_age(PolicySpec::aalto(), p0, s.c1, s.c2);
    CHECK(aalto.age() == doctest::Approx(10.0 - std::log(30.0) / 3.0).epsilon(1e-9));
    CHECK(aalto.age() == doctest::Approx(8.866).epsilon(1e-4));

    const SystemParams p98 = s.params_at(0.98);
    CHECK(p98.lambda1 == doctest::Approx(2.205));
    CHECK(std::abs(overtake_age(PolicySpec::lookahead(), p98, s.c1, s.c2).age() - 5.72) < 0.02);

    CHECK(overtake_age(PolicySpec::pprio12(), p0, s.c1, s.c2).is_zero());
    CHECK(overtake_age(PolicySpec::pprio21(), p0, s.c1, s.c2).is_infinite());
    CHECK(overtake_age(PolicySpec::overtake(3.25), p0, s.c1, s.c2).age() == 3.25);
    CHECK(overtake_age(PolicySpec::overtake(INFINITY), p0, s.c1, s.c2).is_infinite());
}

TEST_CASE("quadratic setting reaches a zero overtake age at high load") {
    const FamilySetup s = quadratic_family();
    CHECK(overtake_age(PolicySpec::lookahead(), s.params_at(0.95), s.c1, s.c2).is_zero());
    CHECK(overtake_age(PolicySpec::lookahead(), s.params_at(0.5), s.c1, s.c2).is_finite());
}

TEST_CASE("light load: LookAhead approaches Aalto") {
    const auto gap = [](const FamilySetup& s, double rho) {
        const SystemParams p = s.params_at(rho);
        return overtake_age(PolicySpec::aalto(), p, s.c1, s.c2).age() -
               overtake_age(PolicySpec::lookahead(), p, s.c1, s.c2).age();
    };
    for (const FamilySetup& s : {deadline_family(), quadratic_family()}) {
        CHECK(gap(s, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(gap(s, 0.01) < 0.05);
        double prev = INFINITY;
        for (double rho : {0.2, 0.1, 0.05, 0.01, 0.001}) {
            const double g = gap(s, rho);
            CHECK(g >= 0.0);
            CHECK(g < prev);
            prev = g;
        }
    }
    // Closed forms at rho = 0.05: 0.0444 (deadline) and 0.0522 (quadratic).
    CHECK(gap(deadline_family(), 0.05) == doctest::Approx(0.0444).epsilon(1e-2));
    CHECK(gap(quadratic_family(), 0.05) == doctest::Approx(0.0522).epsilon(1e-2));
}

TEST_CASE("GenCmu ignores the arrival rates") {
    const FamilySetup s = quadratic_family();
    const double a0 = overtake_age(PolicySpec::gen_cmu(), s.params_at(0.1), s.c1, s.c2).age();
    CHECK(a0 == doctest::Approx(std::sqrt(90.0)).epsilon(1e-9));
    for (double rho : {0.3, 0.6, 0.9, 0.98}) {
        CHECK(overtake_age(PolicySpec::gen_cmu(), s.params_at(rho), s.c1, s.c2).age() == a0);
    }
}

TEST_CASE("overtake ages are ordered LookAhead <= Aalto <= GenCmu on random costs") {
    // E over a longer exponential look-ahead of a non-decreasing cost is
    // larger, so the crossing comes earlier.
    Xoshiro256 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Knot> knots;
        double t = 0.0, rate = rng.uniform();
        for (int k = 0; k < 3; ++k) {
            knots.push_back({t, rate});
            t += 0.2 + 5.0 * rng.uniform();
            rate += 4.0 * rng.uniform();
        }
        const auto c1 = HoldingCostFn::piecewise_linear(knots);
        const double mu1 = 0.5 + 3.0 * rng.uniform();
        const double mu2 = 0.5 + 3.0 * rng.uniform();
        const double rho = 0.95 * rng.uniform();
        const double f = 0.1 + 0.8 * rng.uniform();
        const double lambda = rho / (f / mu1 + (1 - f) / mu2);
        const SystemParams p{f * lambda, (1 - f) * lambda, mu1, mu2};
        const double c2 = 10.0 * rng.uniform();
        const double la = overtake_age(PolicySpec::lookahead(), p, c1, c2).age();
        const double aa = overtake_age(PolicySpec::aalto(), p, c1, c2).age();
        const double gc = overtake_age(PolicySpec::gen_cmu(), p, c1, c2).age();
        CAPTURE(trial);
        CHECK(la <= aa + 1e-8);
        CHECK(aa <= gc + 1e-8);
    }
}

TEST_CASE("policy names") {
    for (const PolicySpec& p : standard_policies()) {
        CHECK(PolicySpec::from_name(p.name()) == p);
    }
    CHECK(PolicySpec::overtake(2.5).label() == "overtake(2.5)");
    CHECK(PolicySpec::overtake(INFINITY).label() == "overtake(inf)");
    CHECK_THROWS_AS(PolicySpec::from_name("srpt"), std::invalid_argument);
    CHECK_THROWS_AS(PolicySpec::overtake(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(PolicySpec::overtake(NAN), std::invalid_argument);
}

TEST_CASE("AlphaDecision normalizes its cases") {
    CHECK(AlphaDecision::finite(0.0).is_zero());
    CHECK(AlphaDecision::finite(-2.0).is_zero());
    CHECK(AlphaDecision::finite(INFINITY).is_infinite());
    CHECK(AlphaDecision::finite(1.5).age() == 1.5);
    CHECK_THROWS(AlphaDecision::finite(NAN));
}
