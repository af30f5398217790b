#include "pim/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "pim/errors.hpp"
#include "pim/rng.hpp"

namespace pim {

OrderFlow OrderFlow::constant(Vec q) {
    OrderFlow f;
    f.kind_ = Kind::constant;
    f.J_ = static_cast<std::size_t>(q.size());
    f.bound_ = q.size() ? q.cwiseAbs().maxCoeff() : 0.0;
    f.q0 = std::move(q);
    return f;
}

OrderFlow OrderFlow::piecewise(std::vector<double> times, std::vector<Vec> values) {
    if (times.empty() || times.size() != values.size()) throw InvalidArgument("piecewise flow needs matching times and values");
    if (times[0] != 0.0) throw InvalidArgument("piecewise flow must start at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InvalidArgument("piecewise flow times must increase");
    OrderFlow f;
    f.kind_ = Kind::piecewise;
    f.J_ = static_cast<std::size_t>(values[0].size());
    for (const auto& v : values) {
        if (static_cast<std::size_t>(v.size()) != f.J_) throw InvalidArgument("piecewise flow values differ in size");
        if (v.size()) f.bound_ = std::max(f.bound_, v.cwiseAbs().maxCoeff());
    }
    f.times = std::move(times);
    f.values = std::move(values);
    return f;
}

OrderFlow OrderFlow::feedback(Vec q_before, double t_on, Vec q_after, double gain_B, double gain_logU, double bound) {
    if (q_before.size() != q_after.size()) throw InvalidArgument("feedback flow positions differ in size");
    if (!(bound > 0.0)) throw InvalidArgument("feedback flow needs a positive bound");
    OrderFlow f;
    f.kind_ = Kind::feedback;
    f.J_ = static_cast<std::size_t>(q_before.size());
    f.bound_ = bound;
    f.q0 = std::move(q_before);
    f.t_on = t_on;
    f.q_after = std::move(q_after);
    f.gain_B = gain_B;
    f.gain_logU = gain_logU;
    return f;
}

OrderFlow OrderFlow::custom(Rule rule, std::size_t J, double bound) {
    OrderFlow f;
    f.kind_ = Kind::feedback;
    f.J_ = J;
    f.bound_ = bound;
    f.rule_ = std::move(rule);
    return f;
}

Vec OrderFlow::at(double t, const Vec& U, double B) const {
    switch (kind_) {
        case Kind::constant:
            return q0;
        case Kind::piecewise: {
            const auto it = std::upper_bound(times.begin(), times.end(), t);
            return values[static_cast<std::size_t>(std::distance(times.begin(), it)) - 1];
        }
        case Kind::feedback: {
            if (rule_) {
                Vec q = rule_(t, U, B);
                return q.cwiseMax(-bound_).cwiseMin(bound_);
            }
            if (t < t_on) return q0;
            const double mean_log = U.array().abs().log().mean();
            Vec q = q_after.array() + gain_B * B + gain_logU * mean_log;
            return q.cwiseMax(-bound_).cwiseMin(bound_);
        }
    }
    return q0;
}

std::string OrderFlow::describe() const {
    std::ostringstream os;
    os.precision(12);
    auto vec = [&](const Vec& v) {
        os << "(";
        for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? "," : "") << v(j);
        os << ")";
    };
    switch (kind_) {
        case Kind::constant:
            os << "constant";
            vec(q0);
            break;
        case Kind::piecewise:
            os << "piecewise[";
            for (std::size_t k = 0; k < times.size(); ++k) {
                os << (k ? ";" : "") << times[k] << ":";
                vec(values[k]);
            }
            os << "]";
            break;
        case Kind::feedback:
            if (rule_) {
                os << "custom(bound=" << bound_ << ")";
                break;
            }
            os << "feedback(before=";
            vec(q0);
            os << ",t_on=" << t_on << ",after=";
            vec(q_after);
            os << ",gain_B=" << gain_B << ",gain_logU=" << gain_logU << ",bound=" << bound_ << ")";
            break;
    }
    return os.str();
}

std::size_t SimulationConfig::steps() const {
    if (!(dt > 0.0 && dt <= 1.0)) throw InvalidArgument("dt must lie in (0, 1]");
    const double n = std::round(1.0 / dt);
    if (std::abs(n * dt - 1.0) > 1e-9) throw InvalidArgument("1/dt must be an integer");
    return static_cast<std::size_t>(n);
}

std::size_t SimulationConfig::refine() const {
    const std::size_t n = steps();
    if (noise_steps == 0) return 1;
    if (noise_steps % n != 0) throw InvalidArgument("noise grid must refine the time grid");
    return noise_steps / n;
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::completed:
            return "completed";
        case StopReason::explosion:
            return "explosion";
        case StopReason::conjugate_infeasible:
            return "conjugate-infeasible";
    }
    return "?";
}

InitialState initial_state(const FieldEngine& engine, const Vec& v0, double x0, const Vec& q0) {
    FieldArgs a{v0, x0, q0};
    a.v = engine.normalize_weights(0.0, 0.0, a);
    InitialState s;
    s.U0 = engine.eval_F(0.0, 0.0, a, 1).F_v;
    s.args = std::move(a);
    return s;
}

PathResult simulate_path(const FieldEngine& engine, const OrderFlow& flow, const SimulationConfig& cfg, const Vec& U0,
                         const std::vector<double>& dB, std::size_t index) {
    const std::size_t N = dB.size();
    const double dt = 1.0 / static_cast<double>(N);
    const double eps = cfg.explosion_eps > 0.0 ? cfg.explosion_eps : 1e-6 * U0.cwiseAbs().minCoeff();

    PathResult res;
    res.index = index;
    res.eps = eps;
    res.t.reserve(N + 1);
    Vec U = U0;
    Vec Z = U0.array().abs().log();
    double B = 0.0;
    std::optional<FieldArgs> warm;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto record = [&](double t, const Vec& q, const ConjugatePoint* cp) {
        res.t.push_back(t);
        res.B.push_back(B);
        res.U.push_back(U);
        res.Q.push_back(q);
        if (cp) {
            res.v.push_back(cp->v);
            res.cash.push_back(cp->x);
        } else {
            res.v.push_back(Vec::Constant(U.size(), nan));
            res.cash.push_back(nan);
        }
    };

    for (std::size_t n = 0; n <= N; ++n) {
        const double t = n == N ? 1.0 : static_cast<double>(n) * dt;
        const Vec q = flow.at(t, U, B);
        KPoint kp;
        try {
            kp = engine.eval_K(t, B, U, q, warm);
        } catch (const Error& e) {
            res.stopped = true;
            res.tau = t;
            res.stop_reason = StopReason::conjugate_infeasible;
            res.U_stop = U;
            res.message = e.what();
            record(t, q, nullptr);
            return res;
        }
        record(t, q, &kp.conjugate);
        if (n == N) break;
        warm = FieldArgs{kp.conjugate.v, kp.conjugate.x, q};

        const double db = dB[n];
        if (cfg.use_log_coordinates) {
            // U = -exp(Z): dZ = A dB - A^2 dt / 2 with A = K / U.
            const Vec A = kp.K.cwiseQuotient(U);
            Z.array() += A.array() * db - 0.5 * A.array().square() * dt;
            U = -Z.array().exp();
        } else {
            U += kp.K * db;
            Z = U.array().abs().log();
        }
        B += db;
        if (!(U.maxCoeff() <= -eps)) {
            res.stopped = true;
            res.tau = static_cast<double>(n + 1) * dt;
            res.stop_reason = StopReason::explosion;
            res.U_stop = U;
            if (U.maxCoeff() < 0.0) record(*res.tau, flow.at(*res.tau, U, B), nullptr);
            return res;
        }
    }
    res.U_stop = U;
    return res;
}

std::vector<Vec> static_oracle(const FieldEngine& engine, const Vec& v, double x, const Vec& q,
                               const std::vector<double>& t, const std::vector<double>& B) {
    std::vector<Vec> out;
    out.reserve(t.size());
    const FieldArgs a{v, x, q};
    for (std::size_t n = 0; n < t.size(); ++n) out.push_back(engine.eval_F(t[n], B[n], a, 1).F_v);
    return out;
}

std::optional<double> gbm_rate(const FieldEngine& engine, const OrderFlow& flow) {
    if (!engine.agents().all_exponential() || !flow.is_constant()) return std::nullopt;
    const MarketModel& m = engine.model();
    if (m.endowment.kind() != PayoffSpec::Kind::linear) return std::nullopt;
    double slope = m.endowment.params()[1];
    for (std::size_t j = 0; j < m.J(); ++j) {
        if (m.dividends[j].kind() != PayoffSpec::Kind::linear) return std::nullopt;
        slope += flow.q0(static_cast<Eigen::Index>(j)) * m.dividends[j].params()[1];
    }
    Vec a(static_cast<Eigen::Index>(engine.agents().size()));
    for (std::size_t k = 0; k < engine.agents().size(); ++k)
        a(static_cast<Eigen::Index>(k)) = engine.agents()[k].exp_coefficient();
    return harmonic_aversion(a) * slope;
}

std::size_t worker_count() {
    if (const char* s = std::getenv("PIM_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(s, &end, 10);
        if (end != s && n > 0) return static_cast<std::size_t>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

EnsembleResult run_ensemble(const FieldEngine& engine, const OrderFlow& flow, const SimulationConfig& cfg,
                            const Vec& U0, bool keep_paths, std::size_t workers) {
    const std::size_t N = cfg.steps();
    const std::size_t refine = cfg.refine();
    const std::size_t P = cfg.n_paths;
    if (workers == 0) workers = worker_count();
    workers = std::max<std::size_t>(1, std::min(workers, P));

    std::vector<PathResult> paths(P);
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < P; i += workers) {
            const auto dB = brownian_increments(cfg.seed, i, N, refine);
            paths[i] = simulate_path(engine, flow, cfg, U0, dB, i);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    EnsembleResult out;
    EnsembleSummary& s = out.summary;
    const auto M = U0.size();
    s.n_paths = P;
    s.U0 = U0;
    s.eps = cfg.explosion_eps > 0.0 ? cfg.explosion_eps : 1e-6 * U0.cwiseAbs().minCoeff();
    s.mean_U1 = Vec::Zero(M);
    s.stderr_U1 = Vec::Zero(M);
    const auto kappa = gbm_rate(engine, flow);
    double err_sum = 0.0;
    double err_max = 0.0;
    for (const auto& p : paths) {
        switch (p.stop_reason) {
            case StopReason::explosion:
                ++s.explosions;
                continue;
            case StopReason::conjugate_infeasible:
                ++s.infeasible;
                continue;
            case StopReason::completed:
                break;
        }
        ++s.completed;
        const Vec& U1 = p.U.back();
        s.mean_U1 += U1;
        if (kappa) {
            const double k = *kappa;
            const Vec exact = U0 * std::exp(-k * p.B.back() - 0.5 * k * k);
            const Vec e = (U1 - exact).cwiseAbs();
            err_sum += e.sum();
            err_max = std::max(err_max, e.maxCoeff());
        }
    }
    if (s.completed > 0) {
        const double n = static_cast<double>(s.completed);
        s.mean_U1 /= n;
        if (s.completed > 1) {
            Vec ss = Vec::Zero(M);
            for (const auto& p : paths)
                if (p.stop_reason == StopReason::completed) ss += (p.U.back() - s.mean_U1).cwiseAbs2();
            s.stderr_U1 = (ss / (n * (n - 1.0))).cwiseSqrt();
        }
        if (kappa) {
            s.oracle_mean_abs_error = err_sum / (n * static_cast<double>(M));
            s.oracle_max_abs_error = err_max;
        }
    }
    if (keep_paths) out.paths = std::move(paths);
    return out;
}

}  // namespace pim
