#include "pim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pim/errors.hpp"

namespace pim {

QuadratureRule gauss_hermite(std::size_t n) {
    if (n == 0) throw InvalidArgument("gauss_hermite: n must be positive");
    // Newton iteration on orthonormal Hermite functions (weight exp(-x^2)),
    // then rescaled to the standard normal density.
    constexpr double pim4 = 0.7511255444649425;  // pi^(-1/4)
    std::vector<double> x(n), w(n);
    const std::size_t half = (n + 1) / 2;
    const double dn = static_cast<double>(n);
    double z = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(dn, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double dj = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 - std::sqrt(dj / (dj + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * dn) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = -x[i] * std::numbers::sqrt2;  // ascending order
        rule.weights[i] = w[i] / std::sqrt(std::numbers::pi);
        total += rule.weights[i];
    }
    for (double& wi : rule.weights) wi /= total;
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule gauss_legendre(std::size_t n) {
    if (n == 0) throw InvalidArgument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double dj = static_cast<double>(j);
                p1 = ((2.0 * dj - 1.0) * z * p2 - (dj - 1.0) * p3) / dj;
            }
            pp = dn * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-16) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace {

const QuadratureRule& cached(std::map<std::size_t, QuadratureRule>& cache, std::mutex& mu, std::size_t n,
                             QuadratureRule (*make)(std::size_t)) {
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite_cached(std::size_t n) {
    static std::map<std::size_t, QuadratureRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, &gauss_hermite);
}

const QuadratureRule& gauss_legendre_cached(std::size_t n) {
    static std::map<std::size_t, QuadratureRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, &gauss_legendre);
}

double integrate_legendre(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const QuadratureRule& gl = gauss_legendre_cached(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return s * half;
}

namespace {

// Integral of weighted(z) over [-radius, radius] / sqrt(2 pi); weighted already
// includes the exp(-z^2/2) factor.
template <class W>
double truncated_expectation(W&& weighted, const std::vector<double>& breaks, double radius) {
    constexpr double panel = 0.25;
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    std::vector<double> cuts{-radius};
    for (double b : breaks)
        if (b > -radius && b < radius) cuts.push_back(b);
    cuts.push_back(radius);
    std::sort(cuts.begin(), cuts.end());
    const QuadratureRule& gl = gauss_legendre_cached(16);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        if (hi <= lo) continue;
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
        const double h = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = lo + (static_cast<double>(p) + 0.5) * h;
            double acc = 0.0;
            for (std::size_t i = 0; i < gl.size(); ++i) {
                const double z = mid + 0.5 * h * gl.nodes[i];
                acc += gl.weights[i] * weighted(z);
            }
            total += 0.5 * h * acc;
        }
    }
    return total * inv_sqrt_2pi;
}

template <class W>
NestedEstimate nested(W&& weighted, const std::vector<double>& breakpoints, double rel_tol) {
    NestedEstimate out;
    static constexpr double radii[] = {8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0};
    for (double r : radii) {
        const double e = truncated_expectation(weighted, breakpoints, r);
        out.radii.push_back(r);
        out.estimates.push_back(e);
        out.value = e;
        if (!std::isfinite(e)) {
            out.status = NestedEstimate::Status::divergent;
            return out;
        }
        const std::size_t n = out.estimates.size();
        if (n >= 2 && std::abs(e - out.estimates[n - 2]) <= rel_tol * std::abs(e)) {
            out.status = NestedEstimate::Status::converged;
            return out;
        }
    }
    // Not settled: divergent if the last increments are positive and not shrinking.
    const auto& est = out.estimates;
    const std::size_t n = est.size();
    const double d1 = (est[n - 1] - est[n - 2]) / std::abs(est[n - 1]);
    const double d0 = (est[n - 2] - est[n - 3]) / std::abs(est[n - 2]);
    if (d1 > 0.0 && d0 > 0.0 && d1 >= 0.5 * d0)
        out.status = NestedEstimate::Status::divergent;
    else
        out.status = NestedEstimate::Status::unresolved;
    return out;
}

}  // namespace

NestedEstimate nested_expectation(const std::function<double(double)>& f, std::vector<double> breakpoints,
                                  double rel_tol) {
    return nested([&](double z) { return f(z) * std::exp(-0.5 * z * z); }, breakpoints, rel_tol);
}

NestedEstimate nested_exp_moment(const std::function<double(double)>& h, std::vector<double> breakpoints,
                                 double rel_tol) {
    return nested([&](double z) { return std::exp(h(z) - 0.5 * z * z); }, breakpoints, rel_tol);
}

}  // namespace pim
