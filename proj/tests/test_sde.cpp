#include <doctest.h>

#include <cmath>

#include "pim/rng.hpp"
#include "pim/sde.hpp"

using namespace pim;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

FieldEngine exp_engine() {
    AgentSet agents({UtilitySpec::exponential(3), UtilitySpec::exponential(6)});
    MarketModel m;
    m.endowment = PayoffSpec::linear(0.0, 0.3);
    m.dividends = {PayoffSpec::linear(0.0, 1.0)};
    return FieldEngine(agents, m, 32);
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("order flows") {
    const auto pw = OrderFlow::piecewise({0.0, 0.5}, {vec({1.0}), vec({-2.0})});
    const Vec U = vec({-1.0, -1.0});
    CHECK(pw.at(0.2, U, 0.0)(0) == 1.0);
    CHECK(pw.at(0.5, U, 0.0)(0) == -2.0);
    CHECK_FALSE(pw.is_constant());

    const auto fb = OrderFlow::feedback(vec({0.1}), 0.5, vec({1.0}), 2.0, 0.0, 3.0);
    CHECK(fb.at(0.4, U, 9.0)(0) == 0.1);
    CHECK(fb.at(0.6, U, 0.5)(0) == doctest::Approx(2.0));
    CHECK(fb.at(0.6, U, 5.0)(0) == 3.0);
    CHECK(fb.at(0.6, U, -5.0)(0) == -3.0);
    const auto lg = OrderFlow::feedback(vec({0.0}), 0.0, vec({0.0}), 0.0, 1.0, 10.0);
    CHECK(lg.at(0.1, vec({-std::exp(1.0), -std::exp(3.0)}), 0.0)(0) == doctest::Approx(2.0));
}

TEST_CASE("log coordinates are exact for geometric motion") {
    const auto eng = exp_engine();
    const auto flow = OrderFlow::constant(vec({0.2}));
    const auto kappa = gbm_rate(eng, flow);
    REQUIRE(kappa);
    CHECK(*kappa == doctest::Approx(2.0 * 0.5));

    const auto init = initial_state(eng, vec({1.0, 1.0}), 0.0, vec({0.2}));
    CHECK(eng.eval_F(0, 0, init.args, 1).F_x == doctest::Approx(1.0).epsilon(1e-12));
    SimulationConfig cfg;
    cfg.dt = 1.0 / 64;
    const auto dB = brownian_increments(3, 0, 64);
    const auto path = simulate_path(eng, flow, cfg, init.U0, dB);
    REQUIRE_FALSE(path.stopped);
    REQUIRE(path.t.size() == 65);
    for (std::size_t n = 0; n <= 64; n += 16) {
        const Vec exact = init.U0 * std::exp(-*kappa * path.B[n] - 0.5 * *kappa * *kappa * path.t[n]);
        CHECK((path.U[n] - exact).cwiseAbs().maxCoeff() <= 1e-9);
    }
    const auto st = static_oracle(eng, init.args.v, init.args.x, vec({0.2}), path.t, path.B);
    CHECK((st[0] - init.U0).norm() <= 1e-14);
    CHECK((st[40] - path.U[40]).cwiseAbs().maxCoeff() <= 1e-9);
    // cash is x, the conjugate G at y = 1
    CHECK(path.cash[32] == doctest::Approx(init.args.x).epsilon(1e-8));
}

TEST_CASE("ensembles do not depend on the worker count") {
    const auto eng = exp_engine();
    const auto flow = OrderFlow::constant(vec({0.2}));
    const auto init = initial_state(eng, vec({1.0, 1.0}), 0.0, vec({0.2}));
    SimulationConfig cfg;
    cfg.dt = 1.0 / 32;
    cfg.n_paths = 7;
    cfg.use_log_coordinates = false;
    const auto one = run_ensemble(eng, flow, cfg, init.U0, true, 1);
    const auto three = run_ensemble(eng, flow, cfg, init.U0, true, 3);
    CHECK(one.summary.mean_U1 == three.summary.mean_U1);
    CHECK(one.summary.stderr_U1 == three.summary.stderr_U1);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(one.paths[i].index == i);
        CHECK(one.paths[i].U.back() == three.paths[i].U.back());
    }
    CHECK(one.summary.completed == 7);
    REQUIRE(one.summary.oracle_mean_abs_error);
}

TEST_CASE("explosion stop") {
    const auto eng = exp_engine();
    const auto flow = OrderFlow::constant(vec({0.2}));
    const auto init = initial_state(eng, vec({1.0, 1.0}), 0.0, vec({0.2}));
    SimulationConfig cfg;
    cfg.dt = 1.0 / 16;
    cfg.explosion_eps = 0.5;  // above |U_0^2|, so the first check stops
    const auto p = simulate_path(eng, flow, cfg, init.U0, brownian_increments(1, 0, 16));
    CHECK(p.stopped);
    CHECK(p.stop_reason == StopReason::explosion);
    REQUIRE(p.tau);
    CHECK(*p.tau == doctest::Approx(1.0 / 16));
    CHECK(to_string(p.stop_reason) == "explosion");
}

}
