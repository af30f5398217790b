#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pim/errors.hpp"
#include "pim/fields.hpp"

using namespace pim;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

MarketModel linear_model(double g0, double g1, double f0, double f1) {
    MarketModel m;
    m.endowment = PayoffSpec::linear(g0, g1);
    m.dividends = {PayoffSpec::linear(f0, f1)};
    return m;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("exponential agents with linear payoffs") {
    const std::vector<double> am = {3.0, 6.0};
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    FieldEngine eng(agents, linear_model(0.1, 0.3, -0.2, 1.0), 64);
    const double a = oracle::harmonic(am);
    const Vec v = vec({0.8, 1.7});
    const Vec q = vec({0.4});
    const double x = 0.35;
    for (double t : {0.0, 0.3, 0.95}) {
        for (double z : {-1.0, 0.4}) {
            const double c0 = 0.1 + 0.4 * -0.2, c1 = 0.3 + 0.4;
            const double F = oracle::exp_r(am, {0.8, 1.7}, x + c0 + c1 * z) * std::exp(0.5 * a * a * c1 * c1 * (1 - t));
            const auto p = eng.evaluate(t, z, {v, x, q}, 2, 1);
            CHECK(p.F == doctest::Approx(F).epsilon(1e-12));
            CHECK(p.F_x == doctest::Approx(-a * F).epsilon(1e-12));
            CHECK(p.F_xx == doctest::Approx(a * a * F).epsilon(1e-12));
            CHECK(p.H == doctest::Approx(-a * c1 * F).epsilon(1e-12));
            for (int m = 0; m < 2; ++m) {
                const double fv = a / am[m] * F / v(m);
                CHECK(p.F_v(m) == doctest::Approx(fv).epsilon(1e-12));
                CHECK(p.F_xv(m) == doctest::Approx(-a * fv).epsilon(1e-12));
                CHECK(p.H_v(m) == doctest::Approx(-a * c1 * fv).epsilon(1e-12));
                for (int k = 0; k < 2; ++k) {
                    const double vv = a / am[m] * a / am[k] * F / (v(m) * v(k)) - (m == k ? fv / v(m) : 0.0);
                    CHECK(p.F_vv(m, k) == doctest::Approx(vv).epsilon(1e-11));
                }
            }
        }
    }
}

TEST_CASE("H is the z-derivative of F for tanh agents") {
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3),
                     UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5, 2), 3)});
    MarketModel m;
    m.endowment = PayoffSpec::named("sin", {0.5, 1.0});
    m.dividends = {PayoffSpec::linear(0.0, 0.8)};
    FieldEngine eng(agents, m, 64);
    const FieldArgs args{vec({1.1, 0.9}), 0.2, vec({0.3})};
    const double t = 0.4, z = 0.3, h = 1e-4;
    const auto p = eng.evaluate(t, z, args, 2, 1);
    const auto up = eng.evaluate(t, z + h, args, 1, -1), dn = eng.evaluate(t, z - h, args, 1, -1);
    CHECK(p.H == doctest::Approx((up.F - dn.F) / (2 * h)).epsilon(1e-7));
    for (int k = 0; k < 2; ++k) CHECK(p.H_v(k) == doctest::Approx((up.F_v(k) - dn.F_v(k)) / (2 * h)).epsilon(1e-7));
    FieldArgs xp = args, xm = args;
    xp.x += h;
    xm.x -= h;
    CHECK(p.F_x == doctest::Approx((eng.eval_F(t, z, xp, 0).F - eng.eval_F(t, z, xm, 0).F) / (2 * h)).epsilon(1e-7));
    CHECK(p.F_xx == doctest::Approx((eng.eval_F(t, z, xp, 1).F_x - eng.eval_F(t, z, xm, 1).F_x) / (2 * h)).epsilon(1e-6));

    const auto ctl = eng.eval_F_controlled(t, z, args, 1, 1e-10);
    CHECK(ctl.F == doctest::Approx(p.F).epsilon(1e-9));
}

TEST_CASE("conjugate solve inverts the gradient") {
    AgentSet agents({UtilitySpec::from_risk_aversion(RiskAversionFn::tanh(2, 0.5), 3), UtilitySpec::exponential(2)});
    FieldEngine eng(agents, linear_model(0.0, 0.4, 0.0, 1.0), 64);
    const Vec q = vec({0.1});
    for (double t : {0.0, 0.5, 0.9}) {
        const Vec u = vec({-0.7, -0.2});
        const auto c = eng.solve_conjugate(t, 0.2, u, 1.0, q);
        const auto p = eng.evaluate(t, 0.2, {c.v, c.x, q}, 1, -1);
        CHECK(p.F_x == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(p.F_v(0) == doctest::Approx(u(0)).epsilon(1e-10));
        CHECK(p.F_v(1) == doctest::Approx(u(1)).epsilon(1e-10));
        CHECK(c.residual <= 1e-10);
    }
}

TEST_CASE("K is geometric for exponential agents") {
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    FieldEngine eng(agents, linear_model(0.0, 0.3, 0.0, 1.0), 32);
    const Vec u = vec({-0.55, -0.27});
    const auto k = eng.eval_K(0.25, -0.4, u, vec({0.2}));
    CHECK(k.K(0) == doctest::Approx(-2.0 * 0.5 * u(0)).epsilon(1e-9));
    CHECK(k.K(1) == doctest::Approx(-2.0 * 0.5 * u(1)).epsilon(1e-9));
}

TEST_CASE("normalized weights give unit F_x") {
    AgentSet agents({UtilitySpec::exponential(1), UtilitySpec::exponential(2)});
    FieldEngine eng(agents, linear_model(0.0, 0.3, 0.0, 1.0), 32);
    const FieldArgs a{vec({2.0, 5.0}), 0.0, vec({0.0})};
    const Vec w = eng.normalize_weights(0.0, 0.0, a);
    CHECK(eng.eval_F(0.0, 0.0, {w, 0.0, a.q}, 1).F_x == doctest::Approx(1.0).epsilon(1e-13));
}

}
