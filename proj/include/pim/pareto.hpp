#pragma once

#include <Eigen/Dense>

#include "pim/utility.hpp"

namespace pim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Pareto-optimal split of aggregate wealth x under weights v.
struct Allocation {
    Vec allocation;     ///< maximizer x_hat, sums to x
    double lambda = 0;  ///< common marginal v^m u_m'(x_hat^m) = dr/dx
    double log_lambda = 0;
};

/// The v-weighted sup-convolution r(v, x) = max_{sum x^m = x} sum_m v^m u_m(x^m)
/// with its partial derivatives.
///
/// First derivatives come from the envelope theorem, higher ones from
/// implicit differentiation of v^m u_m'(x_hat^m) = lambda. With t_m the risk
/// tolerance at x_hat^m and T = sum t_m:
///   r_xx = -lambda / T,  v^m r_xv^m = lambda t_m / T,
///   r_vv^{mk} = lambda t_m (delta_mk - t_k / T) / (v^m v^k).
struct ParetoPoint {
    Vec v;
    double x = 0;
    Vec allocation;
    double lambda = 0;  ///< r_x
    double r = 0;
    Vec tolerance;  ///< t_m(x_hat^m)
    Vec r_v;
    double r_xx = 0;
    Vec r_xv;
    Mat r_vv;
    double r_xxx = 0;
    Vec r_xxv;  ///< d^3 r / dx^2 dv^m
    int order = 0;
};

/// Solves sum_m (u_m')^{-1}(lambda / v^m) = x for log lambda by bracketed Newton.
/// Rejects v with non-positive entries or max/min ratio above 1e12.
Allocation solve_allocation(const AgentSet& agents, const Vec& v, double x, const double* log_lambda_hint = nullptr);

/// r and its partials up to the given order (0..3).
ParetoPoint r_eval(const AgentSet& agents, const Vec& v, double x, int order = 3,
                   const double* log_lambda_hint = nullptr);

/// Closed-form sup-convolution of exponential utilities u_m = -exp(-a_m x)/a_m:
/// r = -(1/a) exp(-a x) prod (v^m)^{a/a_m}, 1/a = sum 1/a_m.
struct ExponentialClosedForm {
    double a = 0;
    double r = 0;
    double r_x = 0;
    double r_xx = 0;
    double r_xxx = 0;
    Vec r_v;
    Vec r_xv;
    Vec r_xxv;
    Mat r_vv;
    Vec allocation;
};

double harmonic_aversion(const Vec& a_coeffs);
ExponentialClosedForm exponential_closed_form(const Vec& a_coeffs, const Vec& v, double x);

/// Structural bounds of r at one point, each as a pass flag.
struct ParetoBoundCheck {
    bool curvature = true;  ///< (1/c) r_x <= -M r_xx <= c r_x
    bool level = true;      ///< (-1/c) r <= M r_x <= -c r
    bool weights = true;    ///< (1/c) r_x <= -v^m r_v^m <= c r_x
    bool mixed = true;      ///< 1/(M c^2) <= v^m r_xv^m / r_x <= c^2 / M
    bool ok() const { return curvature && level && weights && mixed; }
};

ParetoBoundCheck check_pareto_bounds(const ParetoPoint& p, double c, double rel_tol = 1e-12);

/// Exponential growth property of r_x(v, x + y) / r_x(v, x).
bool check_growth_bound(double r_x_at_x, double r_x_at_x_plus_y, double y, double c, std::size_t M,
                        double rel_tol = 1e-12);

}  // namespace pim
