#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pim/errors.hpp"
#include "pim/pareto.hpp"

using namespace pim;

namespace {

AgentSet tanh_pair() {
    return AgentSet({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3),
                     UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5, 2), 3)});
}

}  // namespace

TEST_SUITE("pareto") {

TEST_CASE("exponential agents match the closed form") {
    const std::vector<double> am = {1.0, 2.5, 4.0};
    AgentSet agents({UtilitySpec::exponential(1.0), UtilitySpec::exponential(2.5), UtilitySpec::exponential(4.0)});
    Vec v(3);
    v << 0.7, 2.0, 1.3;
    for (double x : {-2.0, 0.0, 3.5}) {
        const auto p = r_eval(agents, v, x, 3);
        const double r = oracle::exp_r(am, {0.7, 2.0, 1.3}, x);
        const double a = oracle::harmonic(am);
        CHECK(p.r == doctest::Approx(r).epsilon(1e-12));
        CHECK(p.lambda == doctest::Approx(-a * r).epsilon(1e-12));
        CHECK(p.r_xx == doctest::Approx(a * a * r).epsilon(1e-12));
        CHECK(p.allocation.sum() == doctest::Approx(x).epsilon(1e-12));
        for (int m = 0; m < 3; ++m) CHECK(p.r_v(m) == doctest::Approx(a / am[m] * r / v(m)).epsilon(1e-12));
    }
}

TEST_CASE("tanh allocation satisfies the first-order conditions") {
    const oracle::Tanh u1{2, 0.5, 1}, u2{2, 0.5, 2};
    const auto agents = tanh_pair();
    Vec v(2);
    v << 1.4, 0.6;
    for (double x : {-4.0, 0.5, 6.0}) {
        const auto al = solve_allocation(agents, v, x);
        CHECK(al.allocation.sum() == doctest::Approx(x).epsilon(1e-13));
        CHECK(std::log(v(0)) + u1.log_marginal(al.allocation(0)) == doctest::Approx(al.log_lambda).epsilon(1e-12));
        CHECK(std::log(v(1)) + u2.log_marginal(al.allocation(1)) == doctest::Approx(al.log_lambda).epsilon(1e-12));
    }
}

TEST_CASE("tanh derivatives agree with central differences") {
    const auto agents = tanh_pair();
    Vec v(2);
    v << 1.4, 0.6;
    const double x = 0.8, h = 1e-4;
    const auto p = r_eval(agents, v, x, 3);
    auto r = [&](const Vec& w, double y) { return r_eval(agents, w, y, 0).r; };
    auto rx = [&](const Vec& w, double y) { return r_eval(agents, w, y, 1).lambda; };
    CHECK(p.lambda == doctest::Approx((r(v, x + h) - r(v, x - h)) / (2 * h)).epsilon(1e-7));
    CHECK(p.r_xx == doctest::Approx((rx(v, x + h) - rx(v, x - h)) / (2 * h)).epsilon(1e-7));
    const double rxx_p = r_eval(agents, v, x + h, 2).r_xx, rxx_m = r_eval(agents, v, x - h, 2).r_xx;
    CHECK(p.r_xxx == doctest::Approx((rxx_p - rxx_m) / (2 * h)).epsilon(1e-6));
    for (int m = 0; m < 2; ++m) {
        Vec vp = v, vm = v;
        vp(m) += h;
        vm(m) -= h;
        CHECK(p.r_v(m) == doctest::Approx((r(vp, x) - r(vm, x)) / (2 * h)).epsilon(1e-7));
        CHECK(p.r_xv(m) == doctest::Approx((rx(vp, x) - rx(vm, x)) / (2 * h)).epsilon(1e-7));
        const Vec dv = (r_eval(agents, vp, x, 1).r_v - r_eval(agents, vm, x, 1).r_v) / (2 * h);
        for (int k = 0; k < 2; ++k) CHECK(p.r_vv(m, k) == doctest::Approx(dv(k)).epsilon(1e-6));
        const double dxx = (r_eval(agents, vp, x, 2).r_xx - r_eval(agents, vm, x, 2).r_xx) / (2 * h);
        CHECK(p.r_xxv(m) == doctest::Approx(dxx).epsilon(1e-6));
    }
}

TEST_CASE("structural bounds and growth") {
    const auto agents = tanh_pair();
    Vec v(2);
    v << 3.0, 0.2;
    for (double x : {-10.0, 0.0, 10.0}) {
        const auto p = r_eval(agents, v, x, 2);
        CHECK(check_pareto_bounds(p, agents.c()).ok());
        const double rx2 = r_eval(agents, v, x + 1.5, 1).lambda;
        CHECK(check_growth_bound(p.lambda, rx2, 1.5, agents.c(), 2));
    }
}

TEST_CASE("weights are validated") {
    const auto agents = tanh_pair();
    Vec v(2);
    v << 1.0, -1.0;
    CHECK_THROWS_AS(r_eval(agents, v, 0.0, 1), Error);
    v << 1.0, 1e-13;
    CHECK_THROWS_AS(r_eval(agents, v, 0.0, 1), Error);
}

}
