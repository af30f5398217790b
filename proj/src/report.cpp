#include "pim/report.hpp"

#include <cstdio>

namespace pim {

std::string fmt(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

namespace {

void numbered(std::ostream& os, const std::string& prefix, std::size_t n) {
    for (std::size_t i = 1; i <= n; ++i) os << ',' << prefix << i;
}

void values(std::ostream& os, const Vec& v, int precision) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << fmt(v(i), precision);
}

}  // namespace

void write_path_csv(std::ostream& os, const PathResult& p, int precision) {
    const std::size_t M = p.U.empty() ? 0 : static_cast<std::size_t>(p.U[0].size());
    const std::size_t J = p.Q.empty() ? 0 : static_cast<std::size_t>(p.Q[0].size());
    os << "t,B";
    numbered(os, "U", M);
    os << ",cash";
    numbered(os, "v", M);
    numbered(os, "Q", J);
    os << ",stopped\n";
    for (std::size_t n = 0; n < p.t.size(); ++n) {
        os << fmt(p.t[n], precision) << ',' << fmt(p.B[n], precision);
        values(os, p.U[n], precision);
        os << ',' << fmt(p.cash[n], precision);
        values(os, p.v[n], precision);
        values(os, p.Q[n], precision);
        os << ',' << (p.stopped && n + 1 == p.t.size() ? 1 : 0) << '\n';
    }
}

void write_fields_csv(std::ostream& os, const std::vector<FieldRow>& rows, std::size_t M, std::size_t J,
                      int precision) {
    os << "t,z";
    numbered(os, "v", M);
    os << ",x";
    numbered(os, "q", J);
    os << ",F,Fx";
    numbered(os, "Fv", M);
    os << ",H";
    numbered(os, "Hv", M);
    numbered(os, "K", M);
    os << '\n';
    for (const auto& row : rows) {
        const FieldPoint& f = row.field;
        os << fmt(f.t, precision) << ',' << fmt(f.z, precision);
        values(os, f.args.v, precision);
        os << ',' << fmt(f.args.x, precision);
        values(os, f.args.q, precision);
        os << ',' << fmt(f.F, precision) << ',' << fmt(f.F_x, precision);
        values(os, f.F_v, precision);
        os << ',' << fmt(f.H, precision);
        values(os, f.H_v, precision);
        values(os, row.K, precision);
        os << '\n';
    }
}

void write_summary(std::ostream& os, const EnsembleSummary& s, int precision) {
    auto vec = [&](const Vec& v) {
        std::string out;
        for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v(i), precision);
        return out;
    };
    os << "paths = " << s.n_paths << '\n';
    os << "completed = " << s.completed << '\n';
    os << "explosions = " << s.explosions << '\n';
    os << "conjugate_infeasible = " << s.infeasible << '\n';
    os << "fraction_stopped = " << fmt(s.fraction_stopped(), precision) << '\n';
    os << "eps = " << fmt(s.eps, precision) << '\n';
    os << "U0 = " << vec(s.U0) << '\n';
    os << "mean_U1 = " << vec(s.mean_U1) << '\n';
    os << "stderr_U1 = " << vec(s.stderr_U1) << '\n';
    if (s.oracle_mean_abs_error) os << "oracle_mean_abs_error = " << fmt(*s.oracle_mean_abs_error, precision) << '\n';
    if (s.oracle_max_abs_error) os << "oracle_max_abs_error = " << fmt(*s.oracle_max_abs_error, precision) << '\n';
}

void write_condition_report(std::ostream& os, const ConditionReport& r) {
    os << "theorem " << r.theorem << ": " << to_string(r.verdict) << '\n';
    os << "  l = " << r.l << '\n';
    for (const auto& c : r.checks) os << "  [" << to_string(c.verdict) << "] " << c.name << ": " << c.detail << '\n';
    if (r.smoothness) {
        const auto& s = *r.smoothness;
        os << "  suprema over radii";
        for (double rad : s.radii) os << ' ' << fmt(rad, 6);
        os << '\n';
        for (const auto& row : s.aversion) {
            os << "    agent " << row.agent + 1 << " |a^(" << row.k << ")|:";
            for (double v : row.sup_by_radius) os << ' ' << fmt(v, 6);
            if (row.growth) os << "  growing";
            os << '\n';
        }
        for (const auto& row : s.tolerance) {
            os << "    agent " << row.agent + 1 << " |t^(" << row.k << ")|:";
            for (double v : row.sup_by_radius) os << ' ' << fmt(v, 6);
            if (row.growth) os << "  growing";
            os << '\n';
        }
    }
    for (const auto& ir : r.integrability) {
        os << "  moments (" << to_string(ir.mode) << ")";
        if (!ir.applicable) os << " not applicable: " << ir.note;
        os << '\n';
        for (const auto& e : ir.entries) {
            const char* st = e.estimate.status == NestedEstimate::Status::converged   ? "stable"
                             : e.estimate.status == NestedEstimate::Status::divergent ? "divergent"
                                                                                      : "unresolved";
            os << "    p = " << fmt(e.p, 6) << ": " << fmt(e.estimate.value, 10) << " (" << st << ")\n";
        }
    }
}

void write_functionals(std::ostream& os, const FunctionalLattice& lat, int precision) {
    os << "t,sup_L,sup_M,sup_M_tilde,sup_N,skipped_L,infeasible_L,skipped_A,skipped_A_tilde,skipped_B\n";
    for (const auto& s : lat.slices)
        os << fmt(s.t, precision) << ',' << fmt(s.sup_L, precision) << ',' << fmt(s.sup_M, precision) << ','
           << fmt(s.sup_M_tilde, precision) << ',' << fmt(s.sup_N, precision) << ',' << s.skipped_L << ','
           << s.infeasible_L << ',' << s.skipped_A << ',' << s.skipped_A_tilde << ',' << s.skipped_B << '\n';
    os << "# trapezoid: L=" << fmt(lat.int_L, precision) << " M=" << fmt(lat.int_M, precision)
       << " M_tilde=" << fmt(lat.int_M_tilde, precision) << " N=" << fmt(lat.int_N, precision) << '\n';
}

}  // namespace pim
