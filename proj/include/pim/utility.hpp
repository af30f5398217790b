#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pim/jet.hpp"

namespace pim {

/// A prescribed absolute risk aversion a(x), evaluable to any derivative order.
class RiskAversionFn {
public:
    using JetFn = std::function<Jet(const Jet&)>;
    using ValueFn = std::function<double(double)>;

    RiskAversionFn(std::string family, std::vector<double> params, JetFn jet, ValueFn value);

    /// a(x) = level.
    static RiskAversionFn constant(double level);
    /// a(x) = base + amp * tanh(scale * x).
    static RiskAversionFn tanh(double base, double amp, double scale = 1.0);
    /// a(x) = base + amp * sin(freq * x).
    static RiskAversionFn sine(double base, double amp, double freq = 1.0);
    /// a(x) = base + amp * sin(x^2); a' is unbounded.
    static RiskAversionFn sine_squared(double base, double amp);

    /// Builds one of the named families above from its parameter list.
    static RiskAversionFn from_name(const std::string& family, const std::vector<double>& params);

    double operator()(double x) const { return value_(x); }
    /// (a, a', ..., a^(order)) at x.
    std::vector<double> derivatives(double x, std::size_t order) const;
    Jet jet(double x, std::size_t order) const { return jet_(Jet::variable(x, order)); }

    const std::string& family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

private:
    std::string family_;
    std::vector<double> params_;
    JetFn jet_;
    ValueFn value_;
};

enum class UtilityFamily { exponential, risk_aversion };

/// One market maker's utility u on the whole real line.
///
/// u is negative, increasing, strictly concave, u(+inf) = 0, and its risk
/// aversion a = -u''/u' lies in [1/c, c]. Exponential utilities are closed
/// form; risk-aversion-defined utilities are built from a(.) with the
/// normalization u'(0) = 1.
class UtilitySpec {
public:
    static UtilitySpec exponential(double a, double c_bound = 0.0);

    /// Realizes u from a(.) by quadrature: u'(x) = exp(-int_0^x a), u(x) = -int_x^inf u'.
    /// Throws InvalidRiskAversionError if a leaves [1/c_bound, c_bound] on the probe grid.
    static UtilitySpec from_risk_aversion(RiskAversionFn a, double c_bound, int max_order = 6);

    UtilityFamily family() const { return family_; }
    double c_bound() const { return c_bound_; }
    int max_derivative_order() const { return max_order_; }
    /// Exponential coefficient; only meaningful for the exponential family.
    double exp_coefficient() const { return exp_a_; }
    const RiskAversionFn* risk_aversion_fn() const { return ra_.get(); }

    /// (u, u', ..., u^(order)) at x.
    std::vector<double> eval(double x, int order) const;

    double value(double x) const;
    double marginal(double x) const;
    /// log u'(x) = -int_0^x a.
    double log_marginal(double x) const;
    /// The unique x with log u'(x) = log_y.
    double inverse_log_marginal(double log_y) const;

    double aversion(double x) const;
    /// (a, a', ..., a^(order)) at x; order <= max_derivative_order - 2.
    std::vector<double> aversion_derivatives(double x, int order) const;
    /// Risk tolerance t = 1/a and its first derivative.
    std::array<double, 2> tolerance(double x) const;

    /// Short human-readable description, e.g. "exponential(a=2)".
    std::string describe() const;

    struct Tables;

private:
    UtilitySpec() = default;

    UtilityFamily family_ = UtilityFamily::exponential;
    double exp_a_ = 1.0;
    double c_bound_ = 1.0;
    int max_order_ = 8;
    std::shared_ptr<const RiskAversionFn> ra_;
    std::shared_ptr<const Tables> tables_;
};

/// The M market makers sharing one risk-aversion bound c.
class AgentSet {
public:
    explicit AgentSet(std::vector<UtilitySpec> agents);

    std::size_t size() const { return agents_.size(); }
    const UtilitySpec& operator[](std::size_t m) const { return agents_[m]; }
    const std::vector<UtilitySpec>& agents() const { return agents_; }
    double c() const { return c_; }
    bool all_exponential() const;

private:
    std::vector<UtilitySpec> agents_;
    double c_;
};

/// Free-function forms of the utility operations.
std::vector<double> eval_utility(const UtilitySpec& spec, double x, int order);
std::vector<double> risk_aversion(const UtilitySpec& spec, double x, int order);
UtilitySpec build_from_risk_aversion(RiskAversionFn a, double c_bound, int max_order);

/// Pointwise check of the standing utility invariants on a grid.
struct UtilityInvariantReport {
    bool aversion_bounds = true;   ///< 1/c <= a <= c
    bool monotone_concave = true;  ///< u' > 0, u'' < 0
    bool tail_consistent = true;   ///< -c u >= u' >= -u / c
    bool negative_to_zero = true;  ///< u < 0, u increasing along the grid
    bool ok() const { return aversion_bounds && monotone_concave && tail_consistent && negative_to_zero; }
};

UtilityInvariantReport check_utility_invariants(const UtilitySpec& spec, std::span<const double> grid);

/// Grid suprema of |a^(k)| over nested radii, with a non-stabilization flag.
struct SmoothnessRow {
    std::size_t agent = 0;
    int k = 0;
    std::vector<double> sup_by_radius;  ///< aligned with SmoothnessReport::radii
    bool growth = false;
};

struct SmoothnessReport {
    int l = 0;
    std::vector<double> radii;
    std::vector<SmoothnessRow> aversion;   ///< |a^(k)|, k = 1..l
    std::vector<SmoothnessRow> tolerance;  ///< |t^(k)|, k = 0..l, t = 1/a
    bool growth_flag = false;
    bool order_ok = true;  ///< every agent declares order >= l + 2
    bool pass() const { return order_ok && !growth_flag; }
};

SmoothnessReport check_smoothness(const AgentSet& agents, int l,
                                  std::vector<double> radii = {10.0, 20.0, 40.0},
                                  double step = 0.005);

}  // namespace pim
