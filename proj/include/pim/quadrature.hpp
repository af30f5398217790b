#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pim {

/// Nodes and weights of a quadrature rule.
///
/// For Gauss-Hermite rules the weights integrate against the standard normal
/// density, so sum_i w_i f(x_i) ~ E[f(N(0,1))] and the weights sum to one.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1).
QuadratureRule gauss_hermite(std::size_t n);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Cached rules; safe for concurrent use after first construction.
const QuadratureRule& gauss_hermite_cached(std::size_t n);
const QuadratureRule& gauss_legendre_cached(std::size_t n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_legendre(const std::function<double(double)>& f, double a, double b, std::size_t n = 16);

/// Result of a nested expectation estimate.
struct NestedEstimate {
    enum class Status { converged, divergent, unresolved };
    Status status = Status::unresolved;
    double value = 0.0;
    std::vector<double> radii;
    std::vector<double> estimates;
};

/// E[f(Z)], Z ~ N(0,1), over truncation radii 8, 12, 16, 24, 32, 48, 64.
///
/// Each level integrates f times the normal density on [-R, R] with
/// composite Gauss-Legendre panels split at the given breakpoints (kinks of
/// f), so piecewise-smooth integrands converge geometrically. Converged when
/// the relative change between levels drops below rel_tol. Estimates that
/// keep growing without their relative increments shrinking are reported as
/// divergent; this is a heuristic, not a proof.
NestedEstimate nested_expectation(const std::function<double(double)>& f,
                                  std::vector<double> breakpoints = {}, double rel_tol = 1e-6);

/// Same as nested_expectation for E[exp(h(Z))], evaluated as exp(h(z) - z^2/2)
/// so that large exponents do not overflow before the density damps them.
NestedEstimate nested_exp_moment(const std::function<double(double)>& h,
                                 std::vector<double> breakpoints = {}, double rel_tol = 1e-6);

}  // namespace pim
