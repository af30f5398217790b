#include <doctest.h>

#include "pim/conditions.hpp"

using namespace pim;

namespace {

MarketModel linear_model() {
    MarketModel m;
    m.endowment = PayoffSpec::linear(0.0, 0.3);
    m.dividends = {PayoffSpec::linear(0.0, 1.0)};
    return m;
}

}  // namespace

TEST_SUITE("conditions") {

TEST_CASE("index l") {
    CHECK(theorem_index_l(1, 1) == 2);
    CHECK(theorem_index_l(2, 1) == 2);
    CHECK(theorem_index_l(2, 2) == 3);
    CHECK(theorem_index_l(3, 3) == 4);
    CHECK(theorem_index_l(1, 0) == 1);
}

TEST_CASE("exponential desk passes every theorem") {
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    for (int w : {1, 2, 3}) CHECK(check_theorem(agents, linear_model(), w).verdict == Verdict::pass);
}

TEST_CASE("tanh desk") {
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3)});
    CHECK(check_theorem(agents, linear_model(), 1).verdict == Verdict::pass);
    CHECK(check_theorem(agents, linear_model(), 2).verdict == Verdict::fail);
    CHECK(check_theorem(agents, linear_model(), 3).verdict == Verdict::pass);
}

TEST_CASE("unbounded a' is flagged") {
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::sine_squared(2, 0.5), 3),
                     UtilitySpec::exponential(2)});
    const auto r = check_theorem(agents, linear_model(), 3);
    CHECK(r.verdict != Verdict::pass);
    REQUIRE_FALSE(r.checks.empty());
    CHECK(r.checks[0].name == "bounded a'");
    CHECK(r.checks[0].verdict != Verdict::pass);
}

TEST_CASE("low declared order fails smoothness") {
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3, 3)});
    MarketModel m = linear_model();
    m.dividends.push_back(PayoffSpec::linear(0.0, 0.5));
    m.dividends.push_back(PayoffSpec::linear(0.0, 0.2));
    // M + J = 4, l = 3, needs order 5
    const auto r = check_theorem(agents, m, 1);
    CHECK(r.verdict == Verdict::fail);
}

TEST_CASE("functionals for exponential agents") {
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    FieldEngine eng(agents, linear_model(), 32);
    Vec q(1);
    q << 0.2;
    std::vector<std::pair<Vec, Vec>> uq;
    for (double s : {1.0, 0.1}) uq.emplace_back(Vec::Constant(2, -s), q);
    uq.emplace_back(Vec::Constant(2, -50.0), q);
    const auto rep = eval_functionals(eng, 0.3, 0.0, uq, {}, 10.0);
    CHECK(rep.skipped_L == 1);
    REQUIRE(rep.L.size() == 2);
    // K = -a(s0+q)u, so |K/u|^2 = 2 and the denominator is 1 + 2|log s|
    CHECK(rep.L[0].L == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rep.L[1].L == doctest::Approx(2.0 / (1.0 + 2.0 * std::log(10.0))).epsilon(1e-8));
}

}
