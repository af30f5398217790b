#include "pim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pim/errors.hpp"

namespace pim {

FieldEngine::FieldEngine(const AgentSet& agents, const MarketModel& model, std::size_t quadrature_n)
    : agents_(agents), model_(model), rule_(&gauss_hermite_cached(quadrature_n)) {}

FieldPoint FieldEngine::evaluate(double t, double z, const FieldArgs& a, int f_order, int h_order) const {
    return evaluate_with(*rule_, t, z, a, f_order, h_order);
}

FieldPoint FieldEngine::evaluate_with(const QuadratureRule& rule, double t, double z, const FieldArgs& a,
                                      int f_order, int h_order) const {
    if (f_order > 2 || h_order > 1) throw UnsupportedOrderError("fields support F up to order 2 and H up to order 1");
    if (t < 0.0 || t > 1.0) throw InvalidArgument("time must lie in [0, 1]");
    const auto M = static_cast<Eigen::Index>(agents_.size());
    const auto J = static_cast<Eigen::Index>(model_.J());
    if (a.q.size() != J) throw InvalidArgument("position vector q has wrong dimension");

    FieldPoint fp;
    fp.t = t;
    fp.z = z;
    fp.args = a;
    fp.f_order = f_order;
    fp.h_order = h_order;
    if (f_order >= 1) {
        fp.F_v = Vec::Zero(M);
    }
    if (f_order >= 2) {
        fp.F_xv = Vec::Zero(M);
        fp.F_vv = Mat::Zero(M, M);
    }
    if (h_order >= 1) fp.H_v = Vec::Zero(M);

    const int r_order = (f_order >= 2 || h_order >= 1) ? 2 : 0;
    const double s = std::sqrt(std::max(1.0 - t, 0.0));
    const bool terminal = s == 0.0;
    const std::size_t n = terminal ? 1 : rule.size();

    // Neighbouring nodes have nearby multipliers: d log(lambda) / dS = -1 / sum_m t_m.
    double hint = 0.0;
    double prev_S = 0.0;
    double slope = 0.0;
    bool have_hint = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = terminal ? 1.0 : rule.weights[i];
        const double zz = terminal ? z : z + s * rule.nodes[i];
        const double S = sigma_total(model_, a.x, a.q, zz);
        ParetoPoint p;
        try {
            double guess = hint + slope * (S - prev_S);
            p = r_eval(agents_, a.v, S, r_order, have_hint ? &guess : nullptr);
            hint = std::log(p.lambda);
            prev_S = S;
            slope = r_order >= 2 ? -1.0 / p.tolerance.sum() : 0.0;
            have_hint = std::isfinite(hint);
        } catch (const NumericFailure& e) {
            std::ostringstream os;
            os << "field quadrature failed at t=" << t << " z=" << z << " Sigma=" << S << ": " << e.what();
            throw RangeError(os.str());
        }
        if (!std::isfinite(p.r) || !std::isfinite(p.lambda) || p.lambda <= 0.0) {
            std::ostringstream os;
            os << "sup-convolution out of floating-point range at t=" << t << " z=" << z << " Sigma=" << S;
            throw RangeError(os.str());
        }
        if (f_order >= 0) fp.F += w * p.r;
        if (f_order >= 1) {
            fp.F_v += w * p.r_v;
            fp.F_x += w * p.lambda;
        }
        if (f_order >= 2) {
            fp.F_xx += w * p.r_xx;
            fp.F_xv += w * p.r_xv;
            fp.F_vv += w * p.r_vv;
        }
        if (h_order >= 0) {
            // Malliavin derivative of Sigma(x,q) = g(B_1) + <q, f(B_1)> + x.
            double D = model_.endowment.derivative(zz);
            for (Eigen::Index j = 0; j < J; ++j) D += a.q(j) * model_.dividends[static_cast<std::size_t>(j)].derivative(zz);
            fp.H += w * p.lambda * D;
            if (h_order >= 1) fp.H_v += (w * D) * p.r_xv;
        }
    }
    return fp;
}

FieldPoint FieldEngine::eval_F_controlled(double t, double z, const FieldArgs& a, int order, double rel_tol,
                                          std::size_t max_n) const {
    std::size_t n = rule_->size();
    FieldPoint prev = evaluate_with(*rule_, t, z, a, order, -1);
    if (t >= 1.0) return prev;
    auto close = [&](double p, double q) { return std::abs(p - q) <= rel_tol * std::abs(q); };
    while (n * 2 <= max_n) {
        n *= 2;
        FieldPoint next = evaluate_with(gauss_hermite_cached(n), t, z, a, order, -1);
        bool ok = close(prev.F, next.F);
        if (order >= 1) {
            ok = ok && close(prev.F_x, next.F_x);
            for (Eigen::Index m = 0; m < next.F_v.size(); ++m) ok = ok && close(prev.F_v(m), next.F_v(m));
        }
        if (order >= 2) ok = ok && close(prev.F_xx, next.F_xx);
        if (ok) return next;
        prev = std::move(next);
    }
    throw NumericFailure("field quadrature did not stabilize");
}

Vec FieldEngine::normalize_weights(double t, double z, const FieldArgs& a) const {
    const FieldPoint fp = eval_F(t, z, a, 1);
    return a.v / fp.F_x;
}

FieldArgs FieldEngine::initial_guess(double t, double z, const Vec& u, double y, const Vec& q) const {
    // Exponential-utility inversion: F = -F_x / a gives v^m = -y / (a_m u^m).
    const auto M = static_cast<Eigen::Index>(agents_.size());
    FieldArgs a;
    a.q = q;
    a.v.resize(M);
    for (Eigen::Index m = 0; m < M; ++m) a.v(m) = -y / (agents_[static_cast<std::size_t>(m)].aversion(0.0) * u(m));
    a.x = 0.0;
    // Then F_x(v, x) = y by Newton in x on log F_x.
    for (int it = 0; it < 60; ++it) {
        const FieldPoint fp = evaluate(t, z, a, 2, -1);
        const double res = std::log(fp.F_x / y);
        if (std::abs(res) < 1e-12) break;
        double step = -res * fp.F_x / fp.F_xx;
        step = std::clamp(step, -20.0, 20.0);
        a.x += step;
    }
    return a;
}

namespace {

// Log residuals log(F_v^m / u^m), log(F_x / y).
Vec log_residual(const FieldPoint& fp, const Vec& u, double y) {
    const auto M = u.size();
    Vec R(M + 1);
    for (Eigen::Index m = 0; m < M; ++m) R(m) = std::log(fp.F_v(m) / u(m));
    R(M) = std::log(fp.F_x / y);
    return R;
}

}  // namespace

ConjugatePoint FieldEngine::solve_conjugate(double t, double z, const Vec& u, double y, const Vec& q,
                                            const std::optional<FieldArgs>& warm_start) const {
    const auto M = static_cast<Eigen::Index>(agents_.size());
    if (u.size() != M) throw InvalidArgument("u has wrong dimension");
    if (!(u.maxCoeff() < 0.0)) throw InvalidArgument("u must be strictly negative");
    if (!(y > 0.0)) throw InvalidArgument("y must be positive");

    constexpr int max_steps = 100;
    const double tol = newton_tol_;
    const double accept = std::max(1e-10, 100.0 * newton_tol_);

    FieldArgs args;
    try {
        args = warm_start ? *warm_start : initial_guess(t, z, u, y, q);
        args.q = q;
    } catch (const Error& e) {
        throw ConjugateInfeasibleError(std::string("conjugate initial guess failed: ") + e.what());
    }

    FieldPoint fp;
    Vec R;
    try {
        fp = evaluate(t, z, args, 2, 1);
        R = log_residual(fp, u, y);
    } catch (const Error& e) {
        throw ConjugateInfeasibleError(std::string("conjugate start point not evaluable: ") + e.what());
    }

    int it = 0;
    for (; it < max_steps; ++it) {
        const double norm = R.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(norm)) break;
        if (norm <= tol) break;
        Mat Jac(M + 1, M + 1);
        for (Eigen::Index m = 0; m < M; ++m) {
            for (Eigen::Index k = 0; k < M; ++k) Jac(m, k) = fp.F_vv(m, k) * args.v(k) / fp.F_v(m);
            Jac(m, M) = fp.F_xv(m) / fp.F_v(m);
        }
        for (Eigen::Index k = 0; k < M; ++k) Jac(M, k) = fp.F_xv(k) * args.v(k) / fp.F_x;
        Jac(M, M) = fp.F_xx / fp.F_x;
        const Vec delta = Jac.fullPivLu().solve(-R);
        if (!delta.allFinite()) break;

        bool moved = false;
        double alpha = 1.0;
        for (int half = 0; half < 40; ++half, alpha *= 0.5) {
            FieldArgs trial = args;
            trial.v = (args.v.array() * (alpha * delta.head(M)).array().exp()).matrix();
            trial.x = args.x + alpha * delta(M);
            try {
                FieldPoint tp = evaluate(t, z, trial, 2, 1);
                Vec tR = log_residual(tp, u, y);
                const double tn = tR.lpNorm<Eigen::Infinity>();
                if (std::isfinite(tn) && tn < norm) {
                    args = std::move(trial);
                    fp = std::move(tp);
                    R = std::move(tR);
                    moved = true;
                    break;
                }
            } catch (const RangeError&) {
            } catch (const NumericFailure&) {
            } catch (const InvalidArgument&) {
            }
        }
        if (!moved) break;
    }

    const double final_norm = R.lpNorm<Eigen::Infinity>();
    if (!(final_norm <= accept)) {
        std::ostringstream os;
        os << "conjugate solve failed at t=" << t << " z=" << z << " (residual " << final_norm << " after " << it
           << " steps)";
        throw ConjugateInfeasibleError(os.str());
    }

    ConjugatePoint cp;
    cp.t = t;
    cp.z = z;
    cp.u = u;
    cp.y = y;
    cp.q = q;
    cp.v = args.v;
    cp.x = args.x;
    cp.G = args.x * y;
    cp.iterations = it;
    double res = std::abs(fp.F_x - y) / y;
    for (Eigen::Index m = 0; m < M; ++m) res = std::max(res, std::abs(fp.F_v(m) - u(m)) / std::abs(u(m)));
    cp.residual = res;
    cp.field = std::move(fp);
    return cp;
}

KPoint FieldEngine::eval_K(double t, double z, const Vec& u, const Vec& q,
                           const std::optional<FieldArgs>& warm_start) const {
    KPoint k;
    k.conjugate = solve_conjugate(t, z, u, 1.0, q, warm_start);
    k.K = k.conjugate.field.H_v;
    return k;
}

}  // namespace pim
