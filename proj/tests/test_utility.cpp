#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pim/errors.hpp"
#include "pim/utility.hpp"

using namespace pim;

TEST_SUITE("utility") {

TEST_CASE("exponential closed form") {
    const auto u = UtilitySpec::exponential(2.5);
    for (double x : {-3.0, -0.2, 0.0, 1.7, 6.0}) {
        const auto d = u.eval(x, 3);
        const double e = std::exp(-2.5 * x);
        CHECK(d[0] == doctest::Approx(-e / 2.5).epsilon(1e-14));
        CHECK(d[1] == doctest::Approx(e).epsilon(1e-14));
        CHECK(d[2] == doctest::Approx(-2.5 * e).epsilon(1e-14));
        CHECK(d[3] == doctest::Approx(6.25 * e).epsilon(1e-14));
        CHECK(u.aversion(x) == doctest::Approx(2.5));
    }
    CHECK(u.c_bound() == doctest::Approx(2.5));
    CHECK(UtilitySpec::exponential(0.25).c_bound() == doctest::Approx(4.0));
}

TEST_CASE("tanh aversion against an independent quadrature") {
    const oracle::Tanh ref{2.0, 0.5, 1.0};
    const auto u = UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2.0, 0.5), 3.0);
    for (double x : {-8.0, -2.5, -0.3, 0.0, 0.9, 4.0, 12.0}) {
        CHECK(u.log_marginal(x) == doctest::Approx(ref.log_marginal(x)).epsilon(1e-11));
        CHECK(u.marginal(x) == doctest::Approx(std::exp(ref.log_marginal(x))).epsilon(1e-11));
        CHECK(u.value(x) == doctest::Approx(ref.value(x)).epsilon(1e-10));
        CHECK(u.aversion(x) == doctest::Approx(ref.a(x)).epsilon(1e-14));
        const auto d = u.eval(x, 2);
        CHECK(-d[2] / d[1] == doctest::Approx(ref.a(x)).epsilon(1e-12));
    }
    for (double y : {-30.0, -4.0, 0.0, 2.0, 15.0})
        CHECK(u.inverse_log_marginal(y) == doctest::Approx(ref.inverse(y)).epsilon(1e-12));
}

TEST_CASE("aversion derivatives and tolerance") {
    const auto u = UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2.0, 0.5, 2.0), 3.0);
    const double x = 0.37;
    const double th = std::tanh(2 * x);
    const double s2 = 1 - th * th;
    const auto a = u.aversion_derivatives(x, 2);
    CHECK(a[0] == doctest::Approx(2 + 0.5 * th));
    CHECK(a[1] == doctest::Approx(0.5 * 2 * s2).epsilon(1e-13));
    CHECK(a[2] == doctest::Approx(-0.5 * 8 * th * s2).epsilon(1e-13));
    const auto t = u.tolerance(x);
    CHECK(t[0] == doctest::Approx(1 / a[0]));
    CHECK(t[1] == doctest::Approx(-a[1] / (a[0] * a[0])));
}

TEST_CASE("invariants on a grid") {
    std::vector<double> grid;
    for (int i = -400; i <= 400; ++i) grid.push_back(i * 0.05);
    CHECK(check_utility_invariants(UtilitySpec::exponential(1.5), grid).ok());
    CHECK(check_utility_invariants(UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3), grid).ok());
    CHECK(check_utility_invariants(UtilitySpec::from_risk_aversion(RiskAversionFn::sine(1.5, 0.4, 3), 3), grid).ok());
}

TEST_CASE("aversion outside the declared bound is rejected") {
    CHECK_THROWS_AS(UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(1.0, 2.0), 4.0), InvalidRiskAversionError);
    CHECK_THROWS_AS(UtilitySpec::from_risk_aversion(RiskAversionFn::constant(5.0), 2.0), InvalidRiskAversionError);
}

TEST_CASE("smoothness suprema") {
    // sup |d^2/dx^2 0.5 tanh x| = 0.5 * 4 / (3 sqrt 3)
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3)});
    const auto rep = check_smoothness(agents, 2);
    CHECK(rep.pass());
    CHECK(rep.aversion[0].sup_by_radius.back() == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(rep.aversion[1].sup_by_radius.back() == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-4));

    AgentSet bad({UtilitySpec::from_risk_aversion(RiskAversionFn::sine_squared(2, 0.5), 3)});
    const auto r2 = check_smoothness(bad, 1);
    CHECK(r2.growth_flag);
    CHECK_FALSE(r2.pass());
}

TEST_CASE("agent set bound") {
    AgentSet s({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    CHECK(s.all_exponential());
    CHECK(s.c() >= 6.0);
}

}
