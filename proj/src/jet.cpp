#include "pim/jet.hpp"

#include <algorithm>
#include <cmath>

namespace pim {

Jet Jet::constant(double value, std::size_t order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(double x0, std::size_t order) {
    Jet j(order);
    j.c_[0] = x0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

double Jet::derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c_[k] * f;
}

std::vector<double> Jet::derivatives() const {
    std::vector<double> d(c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) d[k] = derivative(k);
    return d;
}

Jet Jet::differentiate() const {
    if (order() == 0) return Jet::constant(0.0, 0);
    Jet d(order() - 1);
    for (std::size_t k = 0; k + 1 < c_.size(); ++k) d.c_[k] = static_cast<double>(k + 1) * c_[k + 1];
    return d;
}

Jet& Jet::operator+=(const Jet& o) {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.order(), b.order());
    Jet p(n);
    for (std::size_t k = 0; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i <= k; ++i) s += a[i] * b[k - i];
        p[k] = s;
    }
    return p;
}

// Taylor recurrences: for h = F(g) with h' = F'(g) g', k h_k = sum_j j g_j (F'(g))_{k-j}.

Jet exp(const Jet& g) {
    const std::size_t n = g.order();
    Jet e(n);
    e[0] = std::exp(g[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * g[j] * e[k - j];
        e[k] = s / static_cast<double>(k);
    }
    return e;
}

namespace {

void sincos_jet(const Jet& g, Jet& s, Jet& c) {
    const std::size_t n = g.order();
    s = Jet(n);
    c = Jet(n);
    s[0] = std::sin(g[0]);
    c[0] = std::cos(g[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            ss += static_cast<double>(j) * g[j] * c[k - j];
            cc -= static_cast<double>(j) * g[j] * s[k - j];
        }
        s[k] = ss / static_cast<double>(k);
        c[k] = cc / static_cast<double>(k);
    }
}

}  // namespace

Jet sin(const Jet& g) {
    Jet s, c;
    sincos_jet(g, s, c);
    return s;
}

Jet cos(const Jet& g) {
    Jet s, c;
    sincos_jet(g, s, c);
    return c;
}

Jet tanh(const Jet& g) {
    // h' = (1 - h^2) g'
    const std::size_t n = g.order();
    Jet h(n);
    Jet h2(n);
    h[0] = std::tanh(g[0]);
    h2[0] = h[0] * h[0];
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const double one_minus = (k - j == 0 ? 1.0 : 0.0) - h2[k - j];
            s += static_cast<double>(j) * g[j] * one_minus;
        }
        h[k] = s / static_cast<double>(k);
        double sq = 0.0;
        for (std::size_t i = 0; i <= k; ++i) sq += h[i] * h[k - i];
        h2[k] = sq;
    }
    return h;
}

Jet reciprocal(const Jet& g) {
    const std::size_t n = g.order();
    Jet h(n);
    h[0] = 1.0 / g[0];
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) s += g[i] * h[k - i];
        h[k] = -s / g[0];
    }
    return h;
}

}  // namespace pim
