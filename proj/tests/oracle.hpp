// Reference formulas used by the tests, written independently of the library.
#pragma once

#include <cmath>
#include <vector>

namespace oracle {

inline double log_cosh(double s) { return std::abs(s) + std::log1p(std::exp(-2.0 * std::abs(s))) - std::log(2.0); }

// a(x) = base + amp tanh(scale x), u'(0) = 1
struct Tanh {
    double base, amp, scale = 1.0;
    double a(double x) const { return base + amp * std::tanh(scale * x); }
    double log_marginal(double x) const { return -(base * x + amp / scale * log_cosh(scale * x)); }
    // u(x) = -int_x^inf u', composite Simpson
    double value(double x) const {
        const double len = 60.0 / (base - std::abs(amp));
        const int n = 120000;
        const double h = len / n;
        double s = std::exp(log_marginal(x)) + std::exp(log_marginal(x + len));
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std::exp(log_marginal(x + i * h));
        return -s * h / 3.0;
    }
    // u'(y) = exp(target) by bisection
    double inverse(double target) const {
        double lo = -200, hi = 200;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (log_marginal(mid) > target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

// r for exponential agents: -(1/a) exp(-a x) prod v_m^(a/a_m)
inline double exp_r(const std::vector<double>& am, const std::vector<double>& v, double x) {
    double inv = 0;
    for (double a : am) inv += 1.0 / a;
    const double a = 1.0 / inv;
    double lp = -a * x;
    for (std::size_t m = 0; m < am.size(); ++m) lp += a / am[m] * std::log(v[m]);
    return -std::exp(lp) / a;
}

inline double harmonic(const std::vector<double>& am) {
    double inv = 0;
    for (double a : am) inv += 1.0 / a;
    return 1.0 / inv;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracle
