#include "pim/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pim/errors.hpp"

namespace pim {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "PASS";
        case Verdict::fail:
            return "FAIL";
        case Verdict::inconclusive:
            return "INCONCLUSIVE";
    }
    return "?";
}

int theorem_index_l(std::size_t M, std::size_t J) { return static_cast<int>((M + J) / 2) + 1; }

namespace {

SubCheck smoothness_check(const std::string& name, const SmoothnessReport& s) {
    SubCheck c;
    c.name = name;
    std::ostringstream os;
    os.precision(6);
    if (!s.order_ok) {
        c.verdict = Verdict::fail;
        os << "declared derivative order below " << s.l + 2;
    } else if (s.growth_flag) {
        c.verdict = Verdict::inconclusive;
        os << "grid suprema keep growing:";
        for (const auto& row : s.aversion)
            if (row.growth)
                os << " agent " << row.agent + 1 << " |a^(" << row.k << ")| " << row.sup_by_radius[row.sup_by_radius.size() - 2]
                   << " -> " << row.sup_by_radius.back();
    } else {
        c.verdict = Verdict::pass;
        double worst = 0.0;
        for (const auto& row : s.aversion) worst = std::max(worst, row.sup_by_radius.back());
        os << "max sup|a^(k)| = " << worst << " on radius " << s.radii.back();
    }
    c.detail = os.str();
    return c;
}

SubCheck moment_check(const std::string& name, const IntegrabilityReport& r) {
    SubCheck c;
    c.name = name;
    std::ostringstream os;
    os.precision(6);
    if (!r.applicable) {
        c.verdict = Verdict::fail;
        os << r.note;
    } else if (r.pass()) {
        c.verdict = Verdict::pass;
        os << "stable for p in {";
        for (std::size_t i = 0; i < r.entries.size(); ++i) os << (i ? "," : "") << r.entries[i].p;
        os << "}";
    } else if (r.divergent()) {
        c.verdict = Verdict::fail;
        os << "estimates grow without settling (heuristic)";
    } else {
        c.verdict = Verdict::inconclusive;
        os << "estimates did not settle";
    }
    c.detail = os.str();
    return c;
}

Verdict combine(const std::vector<SubCheck>& checks) {
    Verdict v = Verdict::pass;
    for (const auto& c : checks) {
        if (c.verdict == Verdict::fail) return Verdict::fail;
        if (c.verdict == Verdict::inconclusive) v = Verdict::inconclusive;
    }
    return v;
}

}  // namespace

ConditionReport check_theorem(const AgentSet& agents, const MarketModel& model, int which,
                              const ConditionOptions& opt) {
    if (which < 1 || which > 3) throw InvalidArgument("theorem must be 1, 2 or 3");
    ConditionReport rep;
    rep.theorem = which;
    rep.l = theorem_index_l(agents.size(), model.J());

    if (which == 1) {
        rep.smoothness = check_smoothness(agents, rep.l, opt.radii, opt.step);
        rep.checks.push_back(smoothness_check("bounded a^(k), k=1..l", *rep.smoothness));
        rep.integrability.push_back(check_integrability(model, agents, opt.p_list, IntegrabilityMode::general));
        SubCheck m = moment_check("E exp(p|psi| + c Sigma0^-/M)", rep.integrability.back());
        if (m.verdict != Verdict::pass) {
            rep.integrability.push_back(check_integrability(model, agents, opt.p_list, IntegrabilityMode::value_proxy));
            const auto& proxy = rep.integrability.back();
            if (proxy.divergent()) {
                m.verdict = Verdict::fail;
                m.detail += "; E r(1, Sigma(0, p1)) also diverges";
            } else {
                m.verdict = Verdict::inconclusive;
                m.detail += proxy.pass() ? "; E r(1, Sigma(0, p1)) finite on samples" : "; proxy unresolved";
            }
        }
        rep.checks.push_back(std::move(m));
    } else if (which == 2) {
        SubCheck e{"exponential utilities", Verdict::pass, "all agents exponential"};
        if (!agents.all_exponential()) {
            e.verdict = Verdict::fail;
            e.detail = "some agent is not exponential";
        }
        rep.checks.push_back(std::move(e));
        rep.integrability.push_back(check_integrability(model, agents, opt.p_list, IntegrabilityMode::exponential));
        rep.checks.push_back(moment_check("E exp(-a Sigma0 + p|psi|)", rep.integrability.back()));
    } else {
        rep.smoothness = check_smoothness(agents, 1, opt.radii, opt.step);
        rep.checks.push_back(smoothness_check("bounded a'", *rep.smoothness));
        SubCheck d{"payoff derivatives", Verdict::pass, "g and f^j differentiable"};
        bool ok = model.endowment.has_derivative();
        for (const auto& f : model.dividends) ok = ok && f.has_derivative();
        if (!ok) {
            d.verdict = Verdict::fail;
            d.detail = "a payoff declares no derivative";
        }
        rep.checks.push_back(std::move(d));
        rep.integrability.push_back(check_integrability(model, agents, opt.p_list, IntegrabilityMode::strong));
        rep.checks.push_back(moment_check("E exp(p|psi| + 2c Sigma0^-/M)", rep.integrability.back()));
    }
    rep.verdict = combine(rep.checks);
    return rep;
}

FunctionalReport eval_functionals(const FieldEngine& engine, double t, double z,
                                  const std::vector<std::pair<Vec, Vec>>& uq, const std::vector<FieldArgs>& primal,
                                  double b) {
    FunctionalReport rep;
    rep.t = t;
    rep.z = z;
    rep.b = b;

    for (const auto& [u, q] : uq) {
        if (!(u.maxCoeff() < 0.0) || u.minCoeff() < -b || q.norm() > b) {
            ++rep.skipped_L;
            continue;
        }
        KPoint kp;
        try {
            kp = engine.eval_K(t, z, u, q);
        } catch (const Error&) {
            ++rep.infeasible_L;
            continue;
        }
        const double num = kp.K.cwiseQuotient(u).squaredNorm();
        const double den = 1.0 + u.array().abs().log().abs().sum();
        rep.L.push_back({u, q, num / den});
        rep.sup_L = std::max(rep.sup_L, num / den);
    }

    for (const auto& a : primal) {
        PrimalSample s;
        s.a = a;
        const bool q_ok = a.q.norm() <= b;
        const FieldPoint fp = engine.evaluate(t, z, a, 1, 1);
        const double rx = r_eval(engine.agents(), a.v, a.x, 0).lambda;
        const double scale = 1.0 + std::abs(a.x);
        s.in_A = q_ok && fp.F_v.minCoeff() >= -b;
        s.in_A_tilde = q_ok && fp.F_x <= b * a.v.minCoeff();
        s.in_B = q_ok && rx <= b * a.v.minCoeff();
        const double vh = a.v.cwiseProduct(fp.H_v).squaredNorm();
        if (s.in_A) {
            s.M = fp.H_v.cwiseQuotient(fp.F_v).squaredNorm() / scale;
            rep.sup_M = std::max(rep.sup_M, s.M);
        } else {
            ++rep.skipped_A;
        }
        if (s.in_A_tilde) {
            s.M_tilde = vh / (scale * fp.F_x * fp.F_x);
            rep.sup_M_tilde = std::max(rep.sup_M_tilde, s.M_tilde);
        } else {
            ++rep.skipped_A_tilde;
        }
        if (s.in_B) {
            s.N = vh / (scale * rx * rx);
            rep.sup_N = std::max(rep.sup_N, s.N);
        } else {
            ++rep.skipped_B;
        }
        rep.primal.push_back(std::move(s));
    }
    return rep;
}

FunctionalLattice functional_lattice(const FieldEngine& engine, const std::vector<double>& times, double z,
                                     const std::vector<std::pair<Vec, Vec>>& uq, const std::vector<FieldArgs>& primal,
                                     double b) {
    FunctionalLattice lat;
    for (double t : times) lat.slices.push_back(eval_functionals(engine, t, z, uq, primal, b));
    for (std::size_t i = 1; i < lat.slices.size(); ++i) {
        const auto& p = lat.slices[i - 1];
        const auto& c = lat.slices[i];
        const double h = c.t - p.t;
        lat.int_L += 0.5 * h * (p.sup_L + c.sup_L);
        lat.int_M += 0.5 * h * (p.sup_M + c.sup_M);
        lat.int_M_tilde += 0.5 * h * (p.sup_M_tilde + c.sup_M_tilde);
        lat.int_N += 0.5 * h * (p.sup_N + c.sup_N);
    }
    return lat;
}

}  // namespace pim
