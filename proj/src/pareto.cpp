#include "pim/pareto.hpp"

#include <cmath>
#include <sstream>

#include "pim/errors.hpp"

namespace pim {

namespace {

void validate_weights(const Vec& v, std::size_t M) {
    if (static_cast<std::size_t>(v.size()) != M) {
        std::ostringstream os;
        os << "weight vector has " << v.size() << " entries, expected " << M;
        throw InvalidArgument(os.str());
    }
    if (!(v.minCoeff() > 0.0) || !v.allFinite()) throw InvalidArgument("weights must be strictly positive");
    if (v.maxCoeff() / v.minCoeff() > 1e12) throw InvalidArgument("weight ratio exceeds 1e12");
}

}  // namespace

Allocation solve_allocation(const AgentSet& agents, const Vec& v, double x, const double* log_lambda_hint) {
    const std::size_t M = agents.size();
    validate_weights(v, M);
    Vec logv = v.array().log();
    Vec y(static_cast<Eigen::Index>(M));

    // phi(l) = sum_m y_m(l) - x, y_m = (u_m')^{-1}(e^l / v^m); phi' = -sum_m t_m(y_m).
    auto phi = [&](double l, double* slope) {
        double s = -x;
        double tsum = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const auto i = static_cast<Eigen::Index>(m);
            y(i) = agents[m].inverse_log_marginal(l - logv(i));
            s += y(i);
            tsum += 1.0 / agents[m].aversion(y(i));
        }
        if (slope) *slope = -tsum;
        return s;
    };

    double l;
    if (log_lambda_hint) {
        l = *log_lambda_hint;
    } else {
        // Exact for exponential agents; a starting point otherwise.
        double inv_a = 0.0;
        double wsum = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double am = agents[m].aversion(x / static_cast<double>(M));
            inv_a += 1.0 / am;
            wsum += logv(static_cast<Eigen::Index>(m)) / am;
        }
        l = (wsum - x) / inv_a;
    }

    const double c = agents.c();
    const double dM = static_cast<double>(M);
    const double tol = 1e-14 * (1.0 + std::abs(x));
    double slope = 0.0;
    double f = phi(l, &slope);
    if (std::abs(f) <= tol) return {y, std::exp(l), l};

    // |phi'| >= M/c gives a bracket of half-width |phi| c / M around l.
    double lo;
    double hi;
    double width = std::abs(f) * c / dM * (1.0 + 1e-9) + 1e-12;
    int doublings = 0;
    for (;;) {
        lo = f > 0.0 ? l : l - width;
        hi = f > 0.0 ? l + width : l;
        const double f_far = phi(f > 0.0 ? hi : lo, nullptr);
        if ((f > 0.0 && f_far <= 0.0) || (f < 0.0 && f_far >= 0.0)) break;
        width *= 2.0;
        if (++doublings > 200) throw NumericFailure("allocation bracket expansion failed");
    }

    for (int it = 0; it < 200; ++it) {
        double next = l - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - l;
        l = next;
        f = phi(l, &slope);
        if (f > 0.0)
            lo = l;
        else
            hi = l;
        if (std::abs(f) <= tol || std::abs(step) <= 1e-15 * (1.0 + std::abs(l))) {
            if (std::abs(f) > 1e-10 * (1.0 + std::abs(x)))
                throw NumericFailure("allocation solve stalled with residual");
            return {y, std::exp(l), l};
        }
    }
    throw NumericFailure("allocation solve did not converge");
}

ParetoPoint r_eval(const AgentSet& agents, const Vec& v, double x, int order, const double* log_lambda_hint) {
    if (order < 0 || order > 3) throw UnsupportedOrderError("r_eval supports orders 0..3");
    const Allocation alloc = solve_allocation(agents, v, x, log_lambda_hint);
    const std::size_t M = agents.size();
    const auto n = static_cast<Eigen::Index>(M);

    ParetoPoint p;
    p.v = v;
    p.x = x;
    p.order = order;
    p.allocation = alloc.allocation;
    p.lambda = alloc.lambda;
    p.r_v.resize(n);
    for (Eigen::Index m = 0; m < n; ++m) p.r_v(m) = agents[static_cast<std::size_t>(m)].value(alloc.allocation(m));
    p.r = v.dot(p.r_v);
    if (order < 2) return p;

    const double lam = p.lambda;
    Vec dt(n);
    p.tolerance.resize(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const auto t = agents[static_cast<std::size_t>(m)].tolerance(alloc.allocation(m));
        p.tolerance(m) = t[0];
        dt(m) = t[1];
    }
    const Vec& t = p.tolerance;
    const double T = t.sum();
    p.r_xx = -lam / T;
    p.r_xv = (lam / T) * t.cwiseQuotient(v);
    p.r_vv.resize(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k)
            p.r_vv(m, k) = lam * t(m) * ((m == k ? 1.0 : 0.0) - t(k) / T) / (v(m) * v(k));
    if (order < 3) return p;

    // dT/dx = sum t_m' t_m / T, dT/dv^k = sum_m t_m' t_m (delta_mk - t_k / T) / v^k.
    const double tt = dt.dot(t);
    const double T_x = tt / T;
    p.r_xxx = lam * (1.0 + T_x) / (T * T);
    p.r_xxv.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double T_vk = (dt(k) * t(k) - tt * t(k) / T) / v(k);
        const double lam_vk = lam * t(k) / (T * v(k));
        p.r_xxv(k) = -(lam_vk * T - lam * T_vk) / (T * T);
    }
    return p;
}

double harmonic_aversion(const Vec& a_coeffs) {
    if (!(a_coeffs.minCoeff() > 0.0)) throw InvalidArgument("exponential coefficients must be positive");
    return 1.0 / a_coeffs.cwiseInverse().sum();
}

ExponentialClosedForm exponential_closed_form(const Vec& a_coeffs, const Vec& v, double x) {
    validate_weights(v, static_cast<std::size_t>(a_coeffs.size()));
    ExponentialClosedForm e;
    const double a = harmonic_aversion(a_coeffs);
    e.a = a;
    const Vec inv = a_coeffs.cwiseInverse();
    const double total = inv.sum();
    const Vec share = inv / total;  // a / a_m
    const double log_prod = share.dot(v.array().log().matrix());
    e.r_x = std::exp(-a * x + log_prod);
    e.r = -e.r_x / a;
    e.r_xx = -a * e.r_x;
    e.r_xxx = a * a * e.r_x;
    e.r_v = e.r * share.cwiseQuotient(v);
    e.r_xv = e.r_x * share.cwiseQuotient(v);
    e.r_xxv = e.r_xx * share.cwiseQuotient(v);
    const auto n = v.size();
    e.r_vv.resize(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k)
            e.r_vv(m, k) = m == k ? -share(m) * ((total - inv(m)) / total) * e.r / (v(m) * v(m))
                                  : share(m) * share(k) * e.r / (v(m) * v(k));
    e.allocation = (v.array().log() - std::log(e.r_x)).matrix().cwiseQuotient(a_coeffs);
    return e;
}

ParetoBoundCheck check_pareto_bounds(const ParetoPoint& p, double c, double rel_tol) {
    ParetoBoundCheck chk;
    const auto M = static_cast<double>(p.v.size());
    const double rx = p.lambda;
    const double lo = 1.0 - rel_tol;
    const double hi = 1.0 + rel_tol;
    auto within = [&](double value, double low, double high) { return value >= low * lo && value <= high * hi; };
    if (p.order >= 2) chk.curvature = within(-M * p.r_xx, rx / c, c * rx);
    chk.level = within(M * rx, -p.r / c, -c * p.r);
    for (Eigen::Index m = 0; m < p.v.size(); ++m) {
        chk.weights = chk.weights && within(-p.v(m) * p.r_v(m), rx / c, c * rx);
        if (p.order >= 2) chk.mixed = chk.mixed && within(p.v(m) * p.r_xv(m) / rx, 1.0 / (M * c * c), c * c / M);
    }
    return chk;
}

bool check_growth_bound(double r_x_at_x, double r_x_at_x_plus_y, double y, double c, std::size_t M, double rel_tol) {
    const double dM = static_cast<double>(M);
    const double yp = std::max(y, 0.0);
    const double ym = std::max(-y, 0.0);
    const double ratio = r_x_at_x_plus_y / r_x_at_x;
    const double lower = std::exp(-yp * c / dM + ym / (c * dM));
    const double upper = std::exp(-yp / (c * dM) + ym * c / dM);
    return ratio >= lower * (1.0 - rel_tol) && ratio <= upper * (1.0 + rel_tol);
}

}  // namespace pim
