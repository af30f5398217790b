#include "pim/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pim/errors.hpp"

namespace pim {

PayoffSpec PayoffSpec::linear(double alpha, double beta) {
    PayoffSpec p;
    p.kind_ = Kind::linear;
    p.name_ = "linear";
    p.params_ = {alpha, beta};
    p.value_ = [=](double z) { return alpha + beta * z; };
    p.deriv_ = [=](double) { return beta; };
    return p;
}

PayoffSpec PayoffSpec::named(const std::string& name, std::vector<double> params) {
    PayoffSpec p;
    p.kind_ = Kind::named;
    p.name_ = name;
    auto need = [&](std::size_t n) {
        if (params.size() != n) {
            std::ostringstream os;
            os << "payoff '" << name << "' takes " << n << " parameters, got " << params.size();
            throw InvalidArgument(os.str());
        }
    };
    if (name == "sin") {
        need(2);
        const double amp = params[0], w = params[1];
        p.value_ = [=](double z) { return amp * std::sin(w * z); };
        p.deriv_ = [=](double z) { return amp * w * std::cos(w * z); };
    } else if (name == "cos") {
        need(2);
        const double amp = params[0], w = params[1];
        p.value_ = [=](double z) { return amp * std::cos(w * z); };
        p.deriv_ = [=](double z) { return -amp * w * std::sin(w * z); };
    } else if (name == "tanh") {
        need(2);
        const double amp = params[0], s = params[1];
        p.value_ = [=](double z) { return amp * std::tanh(s * z); };
        p.deriv_ = [=](double z) {
            const double th = std::tanh(s * z);
            return amp * s * (1.0 - th * th);
        };
    } else if (name == "square") {
        need(1);
        const double k = params[0];
        p.value_ = [=](double z) { return k * z * z; };
        p.deriv_ = [=](double z) { return 2.0 * k * z; };
    } else {
        throw InvalidArgument("unknown payoff function '" + name + "'");
    }
    p.params_ = std::move(params);
    return p;
}

PayoffSpec PayoffSpec::table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw InvalidArgument("payoff table needs at least two knots with matching values");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1])) throw InvalidArgument("payoff table knots must be strictly increasing");
    PayoffSpec p;
    p.kind_ = Kind::table;
    p.name_ = "table";
    p.knots_ = std::move(knots);
    p.values_ = std::move(values);
    const auto kn = p.knots_;
    const auto vals = p.values_;
    // Segment index: 0 covers (-inf, k1], i covers (k_i, k_{i+1}], last extends to +inf.
    auto segment = [kn](double z) {
        const auto it = std::lower_bound(kn.begin() + 1, kn.end() - 1, z);
        return static_cast<std::size_t>(std::distance(kn.begin(), it)) - 1;
    };
    p.value_ = [kn, vals, segment](double z) {
        const std::size_t i = segment(z);
        const double slope = (vals[i + 1] - vals[i]) / (kn[i + 1] - kn[i]);
        return vals[i] + slope * (z - kn[i]);
    };
    p.deriv_ = [kn, vals, segment](double z) {
        const std::size_t i = segment(z);
        return (vals[i + 1] - vals[i]) / (kn[i + 1] - kn[i]);
    };
    return p;
}

PayoffSpec PayoffSpec::custom(std::string name, std::function<double(double)> value,
                              std::function<double(double)> derivative) {
    PayoffSpec p;
    p.kind_ = Kind::custom;
    p.name_ = std::move(name);
    p.value_ = std::move(value);
    p.deriv_ = std::move(derivative);
    return p;
}

double PayoffSpec::operator()(double z) const { return value_(z); }

bool PayoffSpec::has_derivative() const { return static_cast<bool>(deriv_); }

double PayoffSpec::derivative(double z) const {
    if (!deriv_) throw UnsupportedPayoffError("payoff '" + name_ + "' declares no derivative");
    return deriv_(z);
}

std::vector<double> PayoffSpec::kinks() const {
    if (kind_ != Kind::table) return {};
    return knots_;
}

double PayoffSpec::lipschitz_on(double lo, double hi, double step) const {
    double sup = 0.0;
    for (double z = lo; z <= hi; z += step) sup = std::max(sup, std::abs(derivative(z)));
    for (double k : kinks())
        if (k >= lo && k <= hi) {
            sup = std::max(sup, std::abs(derivative(k)));
            sup = std::max(sup, std::abs(derivative(k + 1e-12 * (1.0 + std::abs(k)))));
        }
    return sup;
}

std::string PayoffSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::linear:
            os << "linear(" << params_[0] << "," << params_[1] << ")";
            break;
        case Kind::named:
            os << name_ << "(";
            for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
            os << ")";
            break;
        case Kind::table:
            os << "table(";
            for (std::size_t i = 0; i < knots_.size(); ++i) os << (i ? ";" : "") << knots_[i] << ":" << values_[i];
            os << ")";
            break;
        case Kind::custom:
            os << "custom(" << name_ << ")";
            break;
    }
    return os.str();
}

double sigma_total(const MarketModel& model, double x, const Vec& q, double z) {
    double s = x + model.endowment(z);
    for (std::size_t j = 0; j < model.J(); ++j) s += q(static_cast<Eigen::Index>(j)) * model.dividends[j](z);
    return s;
}

MalliavinDerivative malliavin_derivative(const MarketModel& model, double z) {
    MalliavinDerivative d;
    d.endowment = model.endowment.derivative(z);
    d.dividends.resize(static_cast<Eigen::Index>(model.J()));
    for (std::size_t j = 0; j < model.J(); ++j) d.dividends(static_cast<Eigen::Index>(j)) = model.dividends[j].derivative(z);
    return d;
}

std::string to_string(IntegrabilityMode mode) {
    switch (mode) {
        case IntegrabilityMode::value_proxy:
            return "value-proxy";
        case IntegrabilityMode::general:
            return "general";
        case IntegrabilityMode::exponential:
            return "exponential";
        case IntegrabilityMode::strong:
            return "strong";
    }
    return "?";
}

std::optional<IntegrabilityMode> integrability_mode_from_string(const std::string& s) {
    if (s == "value-proxy") return IntegrabilityMode::value_proxy;
    if (s == "general") return IntegrabilityMode::general;
    if (s == "exponential") return IntegrabilityMode::exponential;
    if (s == "strong") return IntegrabilityMode::strong;
    return std::nullopt;
}

bool IntegrabilityReport::pass() const {
    if (!applicable) return false;
    return std::all_of(entries.begin(), entries.end(), [](const IntegrabilityEntry& e) {
        return e.estimate.status == NestedEstimate::Status::converged;
    });
}

bool IntegrabilityReport::divergent() const {
    return std::any_of(entries.begin(), entries.end(), [](const IntegrabilityEntry& e) {
        return e.estimate.status == NestedEstimate::Status::divergent;
    });
}

namespace {

// Sign changes of h on [-64, 64], refined by bisection; kinks of |h| and h^-.
void collect_roots(const std::function<double(double)>& h, std::vector<double>& out) {
    constexpr double step = 1.0 / 16.0;
    double prev_z = -64.0;
    double prev = h(prev_z);
    for (double z = prev_z + step; z <= 64.0; z += step) {
        const double cur = h(z);
        if (cur == 0.0) {
            out.push_back(z);
        } else if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
            double lo = prev_z, hi = z, flo = prev;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = h(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
        prev_z = z;
    }
}

}  // namespace

IntegrabilityReport check_integrability(const MarketModel& model, const AgentSet& agents,
                                        const std::vector<double>& p_list, IntegrabilityMode mode) {
    IntegrabilityReport rep;
    rep.mode = mode;
    const double c = agents.c();
    const auto M = static_cast<double>(agents.size());

    std::vector<double> breaks;
    for (const auto& f : model.dividends) {
        collect_roots([&](double z) { return f(z); }, breaks);
        for (double k : f.kinks()) breaks.push_back(k);
    }
    collect_roots([&](double z) { return model.endowment(z); }, breaks);
    for (double k : model.endowment.kinks()) breaks.push_back(k);

    auto psi_norm = [&](double z) {
        double s = 0.0;
        for (const auto& f : model.dividends) {
            const double v = f(z);
            s += v * v;
        }
        return std::sqrt(s);
    };
    auto endow_minus = [&](double z) { return std::max(-model.endowment(z), 0.0); };

    double a_harm = 0.0;
    if (mode == IntegrabilityMode::exponential) {
        if (!agents.all_exponential()) {
            rep.applicable = false;
            rep.note = "the exponential moment applies to exponential utilities only";
            return rep;
        }
        Vec a(static_cast<Eigen::Index>(agents.size()));
        for (std::size_t m = 0; m < agents.size(); ++m) a(static_cast<Eigen::Index>(m)) = agents[m].exp_coefficient();
        a_harm = harmonic_aversion(a);
    }

    for (double p : p_list) {
        IntegrabilityEntry e;
        e.p = p;
        switch (mode) {
            case IntegrabilityMode::general:
                e.estimate = nested_exp_moment([&](double z) { return p * psi_norm(z) + c * endow_minus(z) / M; }, breaks);
                break;
            case IntegrabilityMode::strong:
                e.estimate =
                    nested_exp_moment([&](double z) { return p * psi_norm(z) + 2.0 * c * endow_minus(z) / M; }, breaks);
                break;
            case IntegrabilityMode::exponential:
                e.estimate =
                    nested_exp_moment([&](double z) { return -a_harm * model.endowment(z) + p * psi_norm(z); }, breaks);
                break;
            case IntegrabilityMode::value_proxy: {
                const Vec v = Vec::Ones(static_cast<Eigen::Index>(agents.size()));
                const Vec q = Vec::Constant(static_cast<Eigen::Index>(model.J()), p);
                e.estimate = nested_expectation(
                    [&](double z) {
                        const double s = sigma_total(model, 0.0, q, z);
                        // r overflows long before the density stops damping it.
                        if (s < -700.0 * M / c) return std::numeric_limits<double>::infinity();
                        return -r_eval(agents, v, s, 0).r;
                    },
                    breaks);
                break;
            }
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace pim
