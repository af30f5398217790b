#include "pim/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pim/errors.hpp"
#include "pim/quadrature.hpp"

namespace pim {

// ---------------------------------------------------------------------------
// RiskAversionFn

RiskAversionFn::RiskAversionFn(std::string family, std::vector<double> params, JetFn jet, ValueFn value)
    : family_(std::move(family)), params_(std::move(params)), jet_(std::move(jet)), value_(std::move(value)) {}

RiskAversionFn RiskAversionFn::constant(double level) {
    return RiskAversionFn(
        "constant", {level}, [level](const Jet& x) { return Jet::constant(level, x.order()); },
        [level](double) { return level; });
}

RiskAversionFn RiskAversionFn::tanh(double base, double amp, double scale) {
    return RiskAversionFn(
        "tanh", {base, amp, scale}, [=](const Jet& x) { return base + amp * pim::tanh(x * scale); },
        [=](double x) { return base + amp * std::tanh(scale * x); });
}

RiskAversionFn RiskAversionFn::sine(double base, double amp, double freq) {
    return RiskAversionFn(
        "sine", {base, amp, freq}, [=](const Jet& x) { return base + amp * pim::sin(x * freq); },
        [=](double x) { return base + amp * std::sin(freq * x); });
}

RiskAversionFn RiskAversionFn::sine_squared(double base, double amp) {
    return RiskAversionFn(
        "sine_squared", {base, amp}, [=](const Jet& x) { return base + amp * pim::sin(x * x); },
        [=](double x) { return base + amp * std::sin(x * x); });
}

RiskAversionFn RiskAversionFn::from_name(const std::string& family, const std::vector<double>& p) {
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi) {
            std::ostringstream os;
            os << "risk aversion family '" << family << "' takes " << lo << ".." << hi << " parameters, got "
               << p.size();
            throw InvalidArgument(os.str());
        }
    };
    if (family == "constant") {
        need(1, 1);
        return constant(p[0]);
    }
    if (family == "tanh") {
        need(2, 3);
        return tanh(p[0], p[1], p.size() > 2 ? p[2] : 1.0);
    }
    if (family == "sine") {
        need(2, 3);
        return sine(p[0], p[1], p.size() > 2 ? p[2] : 1.0);
    }
    if (family == "sine_squared") {
        need(2, 2);
        return sine_squared(p[0], p[1]);
    }
    throw InvalidArgument("unknown risk aversion family '" + family + "'");
}

std::vector<double> RiskAversionFn::derivatives(double x, std::size_t order) const {
    return jet(x, order).derivatives();
}

// ---------------------------------------------------------------------------
// Tables for risk-aversion-defined utilities
//
// Nodes x_k = -X* + k h. A[k] = int_0^{x_k} a, so log u'(x_k) = -A[k].
// R[k] = int_{x_k}^inf exp(-(A(s) - A[k])) ds, so u(x_k) = -u'(x_k) R[k].
// Between nodes both are completed by short Gauss-Legendre integrals.

struct UtilitySpec::Tables {
    static constexpr double cutoff = 40.0;
    static constexpr double h = 1.0 / 32.0;

    std::shared_ptr<const RiskAversionFn> a;
    double c = 1.0;
    std::size_t n = 0;  // number of intervals
    std::vector<double> A;
    std::vector<double> R;

    double node(std::size_t k) const { return -cutoff + static_cast<double>(k) * h; }

    // Gauss-Legendre rule with its spectral integration matrix
    // S[i][j] = int_{-1}^{xi_i} l_j, l_j the Lagrange basis on the nodes.
    struct Panel {
        const QuadratureRule* rule = nullptr;
        std::vector<double> S;
    };
    Panel p8;
    Panel p16;

    static Panel make_panel(std::size_t order) {
        Panel p;
        p.rule = &gauss_legendre_cached(order);
        const auto& xi = p.rule->nodes;
        const auto& w = p.rule->weights;
        const std::size_t n = xi.size();
        auto lagrange = [&](std::size_t j, double tau) {
            double v = 1.0;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) v *= (tau - xi[k]) / (xi[j] - xi[k]);
            return v;
        };
        p.S.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double half = 0.5 * (xi[i] + 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += w[k] * lagrange(j, -1.0 + half * (xi[k] + 1.0));
                p.S[i * n + j] = half * acc;
            }
        }
        return p;
    }

    const Panel& panel(std::size_t order) const { return order >= 16 ? p16 : p8; }

    // int_lo^hi a, any lo <= hi, in panels no longer than h.
    double integrate_a(double lo, double hi, std::size_t order = 8) const {
        if (hi == lo) return 0.0;
        const double sign = hi > lo ? 1.0 : -1.0;
        if (hi < lo) std::swap(lo, hi);
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
        const std::size_t np = std::max<std::size_t>(1, panels);
        const double w = (hi - lo) / static_cast<double>(np);
        const QuadratureRule& gl = *panel(order).rule;
        double s = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            const double mid = lo + (static_cast<double>(p) + 0.5) * w;
            double acc = 0.0;
            for (std::size_t i = 0; i < gl.size(); ++i) acc += gl.weights[i] * (*a)(mid + 0.5 * w * gl.nodes[i]);
            s += 0.5 * w * acc;
        }
        return sign * s;
    }

    // For hi - lo <= h: {int_lo^hi exp(-int_lo^s a) ds, int_lo^hi a}.
    std::pair<double, double> decay_integral(double lo, double hi, std::size_t order) const {
        const Panel& pn = panel(order);
        const QuadratureRule& gl = *pn.rule;
        const std::size_t n = gl.size();
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double av[16];
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            av[j] = (*a)(mid + half * gl.nodes[j]);
            total += gl.weights[j] * av[j];
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double cum = 0.0;
            for (std::size_t j = 0; j < n; ++j) cum += pn.S[i * n + j] * av[j];
            s += gl.weights[i] * std::exp(-half * cum);
        }
        return {s * half, total * half};
    }

    // int_x^inf exp(-(A(s) - A(x))) ds for x >= X*, marched in panels of width h.
    double far_tail(double x) const {
        double total = 0.0;
        double decay = 0.0;  // A(s) - A(x) at the current panel start
        double s = x;
        while (decay < 45.0) {
            const auto [d, ia] = decay_integral(s, s + h, 8);
            total += std::exp(-decay) * d;
            decay += ia;
            s += h;
        }
        // One-term exponential completion with the local aversion.
        return total + std::exp(-decay) / (*a)(s);
    }

    double A_at(double x) const {
        if (x <= -cutoff) return A.front() - integrate_a(x, -cutoff);
        if (x >= cutoff) return A.back() + integrate_a(cutoff, x);
        const auto k = std::min(n - 1, static_cast<std::size_t>((x + cutoff) / h));
        return A[k] + integrate_a(node(k), x);
    }

    double R_at(double x) const {
        if (x >= cutoff) return far_tail(x);
        double next;
        std::size_t k_next;
        if (x < -cutoff) {
            next = -cutoff;
            k_next = 0;
        } else {
            const auto k = std::min(n - 1, static_cast<std::size_t>((x + cutoff) / h));
            k_next = k + 1;
            next = node(k_next);
        }
        // Walk from x to the next node in panels of at most h.
        double total = 0.0;
        double decay = 0.0;
        double s = x;
        while (s < next) {
            const double e = std::min(next, s + h);
            const auto [d, ia] = decay_integral(s, e, 8);
            total += std::exp(-decay) * d;
            decay += ia;
            s = e;
        }
        return total + std::exp(-decay) * R[k_next];
    }

    // Solve A(x) = target; A is strictly increasing with slope a in [1/c, c].
    double invert_A(double target) const {
        double lo;
        double hi;
        double A_lo;
        if (target <= A.front()) {
            hi = -cutoff;
            lo = hi - (A.front() - target) * c - h;
            A_lo = A_at(lo);
        } else if (target >= A.back()) {
            lo = cutoff;
            hi = lo + (target - A.back()) * c + h;
            A_lo = A.back();
        } else {
            const auto it = std::upper_bound(A.begin(), A.end(), target);
            const auto k = static_cast<std::size_t>(std::distance(A.begin(), it)) - 1;
            lo = node(k);
            hi = node(k + 1);
            A_lo = A[k];
        }
        // Safeguarded Newton from the bracket's lower end.
        double x = lo + (target - A_lo) / (*a)(lo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double f = A_at(x) - target;
            if (std::abs(f) <= 1e-16 * (1.0 + std::abs(target))) return x;
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            double next = x - f / (*a)(x);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
            x = next;
        }
        throw NumericFailure("inverse marginal utility did not converge");
    }
};

// ---------------------------------------------------------------------------
// UtilitySpec

UtilitySpec UtilitySpec::exponential(double a, double c_bound) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidRiskAversionError("exponential coefficient must be positive");
    UtilitySpec s;
    s.family_ = UtilityFamily::exponential;
    s.exp_a_ = a;
    const double natural = std::max(a, 1.0 / a);
    if (c_bound == 0.0) c_bound = natural;
    if (c_bound < natural) throw InvalidRiskAversionError("c_bound does not cover the exponential coefficient");
    s.c_bound_ = c_bound;
    s.max_order_ = 12;
    return s;
}

UtilitySpec UtilitySpec::from_risk_aversion(RiskAversionFn a, double c_bound, int max_order) {
    if (!(c_bound >= 1.0)) throw InvalidRiskAversionError("c_bound must be >= 1");
    if (max_order < 2) throw UnsupportedOrderError("max_derivative_order must be >= 2");
    auto tables = std::make_shared<Tables>();
    tables->a = std::make_shared<const RiskAversionFn>(std::move(a));
    tables->c = c_bound;
    tables->p8 = Tables::make_panel(8);
    tables->p16 = Tables::make_panel(16);
    const auto& fn = *tables->a;

    // Probe grid: nodes plus midpoints well beyond the cutoff.
    const double lo = 1.0 / c_bound - 1e-12;
    const double hi = c_bound + 1e-12;
    for (double x = -2.0 * Tables::cutoff; x <= 2.0 * Tables::cutoff; x += Tables::h / 2.0) {
        const double v = fn(x);
        if (!std::isfinite(v) || v < lo || v > hi) {
            std::ostringstream os;
            os << "risk aversion a(" << x << ") = " << v << " outside [1/c, c] = [" << 1.0 / c_bound << ", "
               << c_bound << "]";
            throw InvalidRiskAversionError(os.str());
        }
    }

    const auto n = static_cast<std::size_t>(std::lround(2.0 * Tables::cutoff / Tables::h));
    tables->n = n;
    tables->A.assign(n + 1, 0.0);
    tables->R.assign(n + 1, 0.0);
    const std::size_t zero = n / 2;  // node at x = 0
    for (std::size_t k = zero; k < n; ++k)
        tables->A[k + 1] = tables->A[k] + tables->integrate_a(tables->node(k), tables->node(k + 1), 16);
    for (std::size_t k = zero; k > 0; --k)
        tables->A[k - 1] = tables->A[k] - tables->integrate_a(tables->node(k - 1), tables->node(k), 16);

    tables->R[n] = tables->far_tail(Tables::cutoff);
    for (std::size_t k = n; k > 0; --k) {
        const double x0 = tables->node(k - 1);
        const double x1 = tables->node(k);
        const double local = tables->decay_integral(x0, x1, 16).first;
        tables->R[k - 1] = local + std::exp(-(tables->A[k] - tables->A[k - 1])) * tables->R[k];
    }

    UtilitySpec s;
    s.family_ = UtilityFamily::risk_aversion;
    s.c_bound_ = c_bound;
    s.max_order_ = max_order;
    s.ra_ = tables->a;
    s.tables_ = std::move(tables);
    return s;
}

double UtilitySpec::log_marginal(double x) const {
    if (family_ == UtilityFamily::exponential) return -exp_a_ * x;
    return -tables_->A_at(x);
}

double UtilitySpec::marginal(double x) const { return std::exp(log_marginal(x)); }

double UtilitySpec::value(double x) const {
    if (family_ == UtilityFamily::exponential) return -std::exp(-exp_a_ * x) / exp_a_;
    return -std::exp(-tables_->A_at(x)) * tables_->R_at(x);
}

double UtilitySpec::inverse_log_marginal(double log_y) const {
    if (family_ == UtilityFamily::exponential) return -log_y / exp_a_;
    return tables_->invert_A(-log_y);
}

double UtilitySpec::aversion(double x) const {
    if (family_ == UtilityFamily::exponential) return exp_a_;
    return (*ra_)(x);
}

std::vector<double> UtilitySpec::aversion_derivatives(double x, int order) const {
    if (order < 0 || order > max_order_ - 2) {
        std::ostringstream os;
        os << "risk aversion derivative of order " << order << " exceeds declared order " << max_order_ - 2;
        throw UnsupportedOrderError(os.str());
    }
    if (family_ == UtilityFamily::exponential) {
        std::vector<double> d(static_cast<std::size_t>(order) + 1, 0.0);
        d[0] = exp_a_;
        return d;
    }
    return ra_->derivatives(x, static_cast<std::size_t>(order));
}

std::array<double, 2> UtilitySpec::tolerance(double x) const {
    if (family_ == UtilityFamily::exponential) return {1.0 / exp_a_, 0.0};
    const Jet a = ra_->jet(x, 1);
    return {1.0 / a[0], -a[1] / (a[0] * a[0])};
}

std::vector<double> UtilitySpec::eval(double x, int order) const {
    if (order < 0 || order > max_order_) {
        std::ostringstream os;
        os << "utility derivative of order " << order << " exceeds declared order " << max_order_;
        throw UnsupportedOrderError(os.str());
    }
    std::vector<double> out(static_cast<std::size_t>(order) + 1);
    out[0] = value(x);
    if (order == 0) return out;
    if (family_ == UtilityFamily::exponential) {
        const double up = std::exp(-exp_a_ * x);
        double f = 1.0;
        for (int k = 1; k <= order; ++k) {
            out[static_cast<std::size_t>(k)] = f * up;
            f *= -exp_a_;
        }
        return out;
    }
    const double up = marginal(x);
    out[1] = up;
    if (order == 1) return out;
    // u^(k+1) = p_k u' with p_0 = 1, p_{k+1} = p_k' - a p_k.
    const auto top = static_cast<std::size_t>(order - 1);
    const Jet a = ra_->jet(x, top - 1);
    Jet p = Jet::constant(1.0, top);
    for (std::size_t k = 1; k <= top; ++k) {
        p = p.differentiate() - a * p;
        out[k + 1] = p[0] * up;
    }
    return out;
}

std::string UtilitySpec::describe() const {
    std::ostringstream os;
    if (family_ == UtilityFamily::exponential) {
        os << "exponential(a=" << exp_a_ << ")";
    } else {
        os << "risk_aversion(" << ra_->family();
        for (double p : ra_->params()) os << "," << p;
        os << "; c=" << c_bound_ << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// AgentSet

AgentSet::AgentSet(std::vector<UtilitySpec> agents) : agents_(std::move(agents)), c_(1.0) {
    if (agents_.empty()) throw InvalidArgument("AgentSet needs at least one agent");
    for (const auto& a : agents_) c_ = std::max(c_, a.c_bound());
}

bool AgentSet::all_exponential() const {
    return std::all_of(agents_.begin(), agents_.end(),
                       [](const UtilitySpec& s) { return s.family() == UtilityFamily::exponential; });
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<double> eval_utility(const UtilitySpec& spec, double x, int order) { return spec.eval(x, order); }

std::vector<double> risk_aversion(const UtilitySpec& spec, double x, int order) {
    return spec.aversion_derivatives(x, order);
}

UtilitySpec build_from_risk_aversion(RiskAversionFn a, double c_bound, int max_order) {
    return UtilitySpec::from_risk_aversion(std::move(a), c_bound, max_order);
}

UtilityInvariantReport check_utility_invariants(const UtilitySpec& spec, std::span<const double> grid) {
    UtilityInvariantReport rep;
    const double c = spec.c_bound();
    constexpr double tol = 1e-9;
    double prev_u = -std::numeric_limits<double>::infinity();
    double prev_x = -std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const auto d = spec.eval(x, 2);
        const double a = -d[2] / d[1];
        if (a < (1.0 / c) * (1.0 - tol) || a > c * (1.0 + tol)) rep.aversion_bounds = false;
        if (!(d[1] > 0.0) || !(d[2] < 0.0)) rep.monotone_concave = false;
        if (d[1] > -c * d[0] * (1.0 + tol) || d[1] < -d[0] / c * (1.0 - tol)) rep.tail_consistent = false;
        if (!(d[0] < 0.0)) rep.negative_to_zero = false;
        if (x > prev_x && d[0] < prev_u) rep.negative_to_zero = false;
        prev_u = d[0];
        prev_x = x;
    }
    return rep;
}

SmoothnessReport check_smoothness(const AgentSet& agents, int l, std::vector<double> radii, double step) {
    SmoothnessReport rep;
    rep.l = l;
    std::sort(radii.begin(), radii.end());
    rep.radii = radii;
    const double rmax = radii.back();
    const auto order = static_cast<std::size_t>(std::max(l, 0));

    auto flag_growth = [&](std::vector<SmoothnessRow>& rows) {
        for (auto& row : rows) {
            const auto& s = row.sup_by_radius;
            if (s.size() >= 2) {
                const double last = s[s.size() - 1];
                const double prev = s[s.size() - 2];
                row.growth = last > prev * (1.0 + 1e-3) + 1e-12;
            }
            rep.growth_flag = rep.growth_flag || row.growth;
        }
    };

    for (std::size_t m = 0; m < agents.size(); ++m) {
        const UtilitySpec& spec = agents[m];
        if (spec.max_derivative_order() < l + 2) rep.order_ok = false;
        std::vector<SmoothnessRow> arows;
        std::vector<SmoothnessRow> trows;
        for (int k = 1; k <= l; ++k) arows.push_back({m, k, std::vector<double>(radii.size(), 0.0), false});
        for (int k = 0; k <= l; ++k) trows.push_back({m, k, std::vector<double>(radii.size(), 0.0), false});

        const auto npts = static_cast<long>(std::ceil(rmax / step));
        for (long i = -npts; i <= npts; ++i) {
            const double x = static_cast<double>(i) * step;
            Jet a;
            if (spec.family() == UtilityFamily::exponential)
                a = Jet::constant(spec.exp_coefficient(), order);
            else
                a = spec.risk_aversion_fn()->jet(x, order);
            const Jet t = reciprocal(a);
            const auto ad = a.derivatives();
            const auto td = t.derivatives();
            for (std::size_t r = 0; r < radii.size(); ++r) {
                if (std::abs(x) > radii[r]) continue;
                for (int k = 1; k <= l; ++k) {
                    double& s = arows[static_cast<std::size_t>(k - 1)].sup_by_radius[r];
                    s = std::max(s, std::abs(ad[static_cast<std::size_t>(k)]));
                }
                for (int k = 0; k <= l; ++k) {
                    double& s = trows[static_cast<std::size_t>(k)].sup_by_radius[r];
                    s = std::max(s, std::abs(td[static_cast<std::size_t>(k)]));
                }
            }
        }
        flag_growth(arows);
        flag_growth(trows);
        rep.aversion.insert(rep.aversion.end(), arows.begin(), arows.end());
        rep.tolerance.insert(rep.tolerance.end(), trows.begin(), trows.end());
    }
    return rep;
}

}  // namespace pim
