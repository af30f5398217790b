#pragma once

#include <optional>

#include "pim/market.hpp"
#include "pim/pareto.hpp"
#include "pim/quadrature.hpp"

namespace pim {

/// The (v, x, q) argument of the primal fields.
struct FieldArgs {
    Vec v;
    double x = 0;
    Vec q;
};

/// F_t(v,x,q) = E[r(v, Sigma(x,q)) | B_t = z] and the Clark-Ocone integrand
///   H_t(v,x,q) = E[r_x(v, Sigma(x,q)) (g'(B_1) + <q, f'(B_1)>) | B_t = z],
/// with v-derivatives taken under the expectation.
struct FieldPoint {
    double t = 0;
    double z = 0;
    FieldArgs args;
    int f_order = -1;  ///< highest F derivative order filled, -1 if none
    int h_order = -1;  ///< 0: H only, 1: H and H_v
    double F = 0;
    Vec F_v;
    double F_x = 0;
    double F_xx = 0;
    Vec F_xv;
    Mat F_vv;
    double H = 0;
    Vec H_v;
};

/// Saddle point of G_t(u, y, q) = sup_v inf_x [<v,u> + x y - F_t(v,x,q)].
struct ConjugatePoint {
    double t = 0;
    double z = 0;
    Vec u;
    double y = 1;
    Vec q;
    Vec v;       ///< dG/du
    double x = 0;
    double G = 0;  ///< x y
    double residual = 0;  ///< max relative residual of F_v = u, F_x = y
    int iterations = 0;
    FieldPoint field;  ///< F (order 2) and H (order 1) at the solution
};

struct KPoint {
    Vec K;
    ConjugatePoint conjugate;
};

/// Conditional expectations for the Brownian desk model, by Gauss-Hermite
/// quadrature over B_1 | B_t = z ~ N(z, 1 - t).
class FieldEngine {
public:
    FieldEngine(const AgentSet& agents, const MarketModel& model, std::size_t quadrature_n = 64);

    const AgentSet& agents() const { return agents_; }
    const MarketModel& model() const { return model_; }
    const QuadratureRule& rule() const { return *rule_; }

    /// Stopping tolerance on the log residuals of the conjugate solve.
    void set_newton_tolerance(double tol) { newton_tol_ = tol; }
    double newton_tolerance() const { return newton_tol_; }

    /// F and its partials; f_order in {0,1,2}, h_order in {-1,0,1}.
    FieldPoint evaluate(double t, double z, const FieldArgs& a, int f_order, int h_order) const;

    FieldPoint eval_F(double t, double z, const FieldArgs& a, int order) const { return evaluate(t, z, a, order, -1); }
    FieldPoint eval_H(double t, double z, const FieldArgs& a, int order) const { return evaluate(t, z, a, -1, order); }

    /// Same as eval_F but doubles the quadrature order until F and its
    /// requested partials change by at most rel_tol.
    FieldPoint eval_F_controlled(double t, double z, const FieldArgs& a, int order, double rel_tol = 1e-9,
                                 std::size_t max_n = 1024) const;

    /// v / F_x(v,x,q), so that F_x = 1 at the result.
    Vec normalize_weights(double t, double z, const FieldArgs& a) const;

    /// Newton solve of F_v(v,x,q) = u, F_x(v,x,q) = y in (log v, x).
    /// Throws ConjugateInfeasibleError after 100 damped steps.
    ConjugatePoint solve_conjugate(double t, double z, const Vec& u, double y, const Vec& q,
                                   const std::optional<FieldArgs>& warm_start = std::nullopt) const;

    /// K^m(u,q) = dH/dv^m at the y = 1 conjugate point.
    KPoint eval_K(double t, double z, const Vec& u, const Vec& q,
                  const std::optional<FieldArgs>& warm_start = std::nullopt) const;

private:
    FieldPoint evaluate_with(const QuadratureRule& rule, double t, double z, const FieldArgs& a, int f_order,
                             int h_order) const;
    FieldArgs initial_guess(double t, double z, const Vec& u, double y, const Vec& q) const;

    AgentSet agents_;
    MarketModel model_;
    const QuadratureRule* rule_;
    double newton_tol_ = 1e-12;
};

}  // namespace pim
