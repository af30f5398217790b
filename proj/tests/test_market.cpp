#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pim/errors.hpp"
#include "pim/market.hpp"

using namespace pim;

TEST_SUITE("market") {

TEST_CASE("payoffs") {
    const auto lin = PayoffSpec::linear(0.5, -2.0);
    CHECK(lin(1.5) == doctest::Approx(-2.5));
    CHECK(lin.derivative(7.0) == doctest::Approx(-2.0));

    const auto tab = PayoffSpec::table({-1.0, 0.0, 2.0}, {1.0, 0.0, 4.0});
    CHECK(tab(-0.5) == doctest::Approx(0.5));
    CHECK(tab(1.0) == doctest::Approx(2.0));
    CHECK(tab(3.0) == doctest::Approx(6.0));
    CHECK(tab(-2.0) == doctest::Approx(2.0));
    CHECK(tab.derivative(0.0) == doctest::Approx(-1.0));
    CHECK(tab.derivative(0.5) == doctest::Approx(2.0));
    CHECK(tab.kinks().size() == 3);

    const auto s = PayoffSpec::named("sin", {2.0, 3.0});
    CHECK(s(0.4) == doctest::Approx(2.0 * std::sin(1.2)));
    CHECK(s.derivative(0.4) == doctest::Approx(6.0 * std::cos(1.2)));

    const auto c = PayoffSpec::custom("step", [](double z) { return z > 0 ? 1.0 : 0.0; });
    CHECK_FALSE(c.has_derivative());
    CHECK_THROWS_AS(c.derivative(0.0), UnsupportedPayoffError);
}

TEST_CASE("total wealth and its derivative") {
    MarketModel m;
    m.endowment = PayoffSpec::linear(1.0, 0.3);
    m.dividends = {PayoffSpec::linear(0.0, 1.0), PayoffSpec::named("square", {0.5})};
    Vec q(2);
    q << 0.2, -1.0;
    CHECK(sigma_total(m, 0.5, q, 2.0) == doctest::Approx(0.5 + 1.6 + 0.4 - 2.0));
    const auto d = malliavin_derivative(m, 2.0);
    CHECK(d.endowment == doctest::Approx(0.3));
    CHECK(d.dividends(0) == doctest::Approx(1.0));
    CHECK(d.dividends(1) == doctest::Approx(2.0));
}

TEST_CASE("moment estimates for linear payoffs") {
    // E exp(al Z^+ + be Z^-) = e^{al^2/2} Phi(al) + e^{be^2/2} Phi(be)
    auto two_sided = [](double al, double be) {
        return std::exp(0.5 * al * al) * oracle::normal_cdf(al) + std::exp(0.5 * be * be) * oracle::normal_cdf(be);
    };
    MarketModel m;
    m.endowment = PayoffSpec::linear(0.0, 0.3);
    m.dividends = {PayoffSpec::linear(0.0, 1.0)};
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    const double c = agents.c();
    const std::vector<double> ps = {0.5, 2.0};

    const auto gen = check_integrability(m, agents, ps, IntegrabilityMode::general);
    REQUIRE(gen.pass());
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(gen.entries[i].estimate.value == doctest::Approx(two_sided(ps[i], ps[i] + c * 0.3 / 2)).epsilon(1e-8));

    const auto str = check_integrability(m, agents, ps, IntegrabilityMode::strong);
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(str.entries[i].estimate.value == doctest::Approx(two_sided(ps[i], ps[i] + c * 0.3)).epsilon(1e-8));

    const auto ex = check_integrability(m, agents, ps, IntegrabilityMode::exponential);
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(ex.entries[i].estimate.value == doctest::Approx(two_sided(ps[i] - 0.6, ps[i] + 0.6)).epsilon(1e-8));

    AgentSet mixed({UtilitySpec::exponential(2), UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3)});
    CHECK_FALSE(check_integrability(m, mixed, ps, IntegrabilityMode::exponential).applicable);
}

TEST_CASE("heavy payoffs diverge") {
    MarketModel m;
    m.dividends = {PayoffSpec::named("square", {1.0})};
    AgentSet agents({UtilitySpec::exponential(1)});
    const auto rep = check_integrability(m, agents, {1.0}, IntegrabilityMode::general);
    CHECK_FALSE(rep.pass());
    CHECK(rep.divergent());
}

}
