#pragma once

#include <cstddef>
#include <vector>

namespace pim {

/// Truncated Taylor expansion f(x0 + h) = sum_k c[k] h^k, k = 0..order.
///
/// Used to push derivatives of risk-aversion functions through the
/// u'' = -a u' recursion to arbitrary order without symbolic algebra.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::size_t order) : c_(order + 1, 0.0) {}

    static Jet constant(double value, std::size_t order);
    /// The identity x evaluated at x0: coefficients (x0, 1, 0, ...).
    static Jet variable(double x0, std::size_t order);

    std::size_t order() const { return c_.size() - 1; }
    double operator[](std::size_t k) const { return c_[k]; }
    double& operator[](std::size_t k) { return c_[k]; }

    /// k-th derivative at the expansion point, k! * c[k].
    double derivative(std::size_t k) const;
    std::vector<double> derivatives() const;

    /// d/dh, truncated one order lower.
    Jet differentiate() const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    Jet operator-() const { return *this * -1.0; }

private:
    std::vector<double> c_;
};

Jet exp(const Jet& g);
Jet sin(const Jet& g);
Jet cos(const Jet& g);
Jet tanh(const Jet& g);
Jet reciprocal(const Jet& g);

}  // namespace pim
