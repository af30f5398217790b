#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pim/pareto.hpp"
#include "pim/quadrature.hpp"

namespace pim {

/// A terminal payoff h(B_1) with its first derivative.
///
/// Three kinds: linear alpha + beta z, a named smooth function, or a
/// piecewise-linear table extended linearly beyond its end knots. At a knot
/// the derivative is the left slope.
class PayoffSpec {
public:
    enum class Kind { linear, named, table, custom };

    static PayoffSpec linear(double alpha, double beta);
    /// Named families: "sin" (amp, freq), "cos" (amp, freq), "tanh" (amp, scale), "square" (coef).
    static PayoffSpec named(const std::string& name, std::vector<double> params);
    static PayoffSpec table(std::vector<double> knots, std::vector<double> values);
    /// Arbitrary function; derivative optional.
    static PayoffSpec custom(std::string name, std::function<double(double)> value,
                             std::function<double(double)> derivative = {});

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double z) const;
    bool has_derivative() const;
    /// Throws UnsupportedPayoffError when no derivative is declared.
    double derivative(double z) const;

    /// Points where the payoff is not differentiable (table knots).
    std::vector<double> kinks() const;
    /// Grid supremum of |h'| on [lo, hi].
    double lipschitz_on(double lo, double hi, double step = 1e-3) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::linear;
    std::string name_;
    std::vector<double> params_;
    std::vector<double> knots_;
    std::vector<double> values_;
    std::function<double(double)> value_;
    std::function<double(double)> deriv_;
};

/// Brownian desk model on [0, 1]: endowment Sigma_0 = g(B_1), dividends psi^j = f^j(B_1).
struct MarketModel {
    PayoffSpec endowment = PayoffSpec::linear(0.0, 0.0);
    std::vector<PayoffSpec> dividends;

    std::size_t J() const { return dividends.size(); }
};

/// Sigma(x, q) at B_1 = z: x + g(z) + sum_j q^j f^j(z).
double sigma_total(const MarketModel& model, double x, const Vec& q, double z);

struct MalliavinDerivative {
    double endowment = 0;  ///< g'(z)
    Vec dividends;         ///< f'(z)
};

/// D_t of the terminal payoffs; constant in t for functions of B_1.
MalliavinDerivative malliavin_derivative(const MarketModel& model, double z);

enum class IntegrabilityMode { value_proxy, general, exponential, strong };

std::string to_string(IntegrabilityMode mode);
std::optional<IntegrabilityMode> integrability_mode_from_string(const std::string& s);

struct IntegrabilityEntry {
    double p = 0;
    NestedEstimate estimate;
};

struct IntegrabilityReport {
    IntegrabilityMode mode = IntegrabilityMode::general;
    std::vector<IntegrabilityEntry> entries;
    bool applicable = true;  ///< false e.g. for the exponential form with non-exponential agents
    std::string note;
    bool pass() const;
    bool divergent() const;
};

/// Estimates the exponential moments required by the integrability conditions:
///   general:     E[exp(p |psi| + c Sigma_0^- / M)]
///   exponential: E[exp(-a Sigma_0 + p |psi|)], a the harmonic aversion (exponential agents)
///   strong:      E[exp(p |psi| + 2 c Sigma_0^- / M)]
///   value_proxy: E[-r(1, Sigma(0, p 1))]
/// for each p in p_list, by nested truncated quadrature.
IntegrabilityReport check_integrability(const MarketModel& model, const AgentSet& agents,
                                        const std::vector<double>& p_list, IntegrabilityMode mode);

}  // namespace pim
