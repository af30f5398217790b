#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pim/fields.hpp"

namespace pim {

/// The investor's position process Q, evaluated on left limits.
class OrderFlow {
public:
    enum class Kind { constant, piecewise, feedback };
    using Rule = std::function<Vec(double t, const Vec& U, double B)>;

    static OrderFlow constant(Vec q);
    /// q = values[k] on [times[k], times[k+1]); times[0] must be 0.
    static OrderFlow piecewise(std::vector<double> times, std::vector<Vec> values);
    /// Before t_on: q_before. From t_on on:
    ///   q = q_after + gain_B * B + gain_logU * mean_m log(-U^m), clipped to [-bound, bound].
    static OrderFlow feedback(Vec q_before, double t_on, Vec q_after, double gain_B, double gain_logU, double bound);
    /// Arbitrary rule with a declared local bound.
    static OrderFlow custom(Rule rule, std::size_t J, double bound);

    Kind kind() const { return kind_; }
    std::size_t J() const { return J_; }
    double bound() const { return bound_; }
    bool is_constant() const { return kind_ == Kind::constant; }

    Vec at(double t, const Vec& U, double B) const;
    std::string describe() const;

    // Parameters, kept public for config echo.
    Vec q0;
    std::vector<double> times;
    std::vector<Vec> values;
    double t_on = 0;
    Vec q_after;
    double gain_B = 0;
    double gain_logU = 0;

private:
    Kind kind_ = Kind::constant;
    std::size_t J_ = 0;
    double bound_ = 0;
    Rule rule_;
};

struct SimulationConfig {
    double dt = 1.0 / 256.0;
    std::size_t n_paths = 100;
    std::uint64_t seed = 1;
    /// Explosion threshold; <= 0 selects 1e-6 * min_m |U_0^m|.
    double explosion_eps = 0;
    std::size_t quadrature_n = 64;
    double newton_tol = 1e-12;
    bool use_log_coordinates = true;
    /// Noise is drawn on this many substeps of [0, 1] (a multiple of the step
    /// count); 0 means one draw per step.
    std::size_t noise_steps = 0;

    std::size_t steps() const;
    std::size_t refine() const;
};

enum class StopReason { completed, explosion, conjugate_infeasible };
std::string to_string(StopReason r);

struct PathResult {
    std::size_t index = 0;
    std::vector<double> t;
    std::vector<double> B;
    std::vector<Vec> U;
    std::vector<Vec> v;
    std::vector<double> cash;
    std::vector<Vec> Q;
    bool stopped = false;
    std::optional<double> tau;
    StopReason stop_reason = StopReason::completed;
    Vec U_stop;  ///< state at the stop (or at t = 1)
    double eps = 0;
    std::string message;
};

struct InitialState {
    Vec U0;
    FieldArgs args;  ///< weights normalized so that F_x = 1 at (0, 0)
};

/// Normalizes v0 and returns U_0 = F_v(0, 0, v_norm, x0, q0).
InitialState initial_state(const FieldEngine& engine, const Vec& v0, double x0, const Vec& q0);

/// Euler-Maruyama for dU = K(U, Q) dB along the given increments (dB.size() steps on [0, 1]).
PathResult simulate_path(const FieldEngine& engine, const OrderFlow& flow, const SimulationConfig& cfg, const Vec& U0,
                         const std::vector<double>& dB, std::size_t index = 0);

/// Constant (v, x, q) martingale U_t = F_v(t, B_t, v, x, q) along a Brownian path.
std::vector<Vec> static_oracle(const FieldEngine& engine, const Vec& v, double x, const Vec& q,
                               const std::vector<double>& t, const std::vector<double>& B);

/// kappa with K^m = -kappa U^m when the agents are exponential, the payoffs
/// linear and the flow constant; U is then geometric Brownian motion.
std::optional<double> gbm_rate(const FieldEngine& engine, const OrderFlow& flow);

struct EnsembleSummary {
    std::size_t n_paths = 0;
    std::size_t completed = 0;
    std::size_t explosions = 0;
    std::size_t infeasible = 0;
    double eps = 0;
    Vec U0;
    Vec mean_U1;    ///< over completed paths
    Vec stderr_U1;
    std::optional<double> oracle_mean_abs_error;  ///< GBM closed form at t = 1
    std::optional<double> oracle_max_abs_error;
    double fraction_stopped() const { return n_paths ? double(explosions + infeasible) / double(n_paths) : 0.0; }
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<PathResult> paths;  ///< kept only when requested
};

/// Worker count from PIM_WORKERS, else the hardware concurrency.
std::size_t worker_count();

/// Runs cfg.n_paths independent paths keyed by (cfg.seed, path index).
/// Results do not depend on the worker count.
EnsembleResult run_ensemble(const FieldEngine& engine, const OrderFlow& flow, const SimulationConfig& cfg,
                            const Vec& U0, bool keep_paths = false, std::size_t workers = 0);

}  // namespace pim
