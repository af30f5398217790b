#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pim/fields.hpp"
#include "pim/market.hpp"
#include "pim/utility.hpp"

namespace pim {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct SubCheck {
    std::string name;
    Verdict verdict = Verdict::pass;
    std::string detail;
};

struct ConditionOptions {
    std::vector<double> p_list = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> radii = {10.0, 20.0, 40.0};
    double step = 0.005;
};

struct ConditionReport {
    int theorem = 1;
    int l = 0;
    std::optional<SmoothnessReport> smoothness;
    std::vector<IntegrabilityReport> integrability;
    std::vector<SubCheck> checks;
    Verdict verdict = Verdict::pass;
};

/// Smallest integer strictly greater than (M + J) / 2.
int theorem_index_l(std::size_t M, std::size_t J);

/// Hypotheses of the existence theorems:
///   1: sup|a^(k)| < inf for k = 1..l and the exponential-moment condition
///      E exp(p|psi| + c Sigma_0^- / M) < inf (falling back to E r > -inf);
///   2: exponential utilities and E exp(-a Sigma_0 + p|psi|) < inf;
///   3: sup|a'| < inf, differentiable payoffs and E exp(p|psi| + 2c Sigma_0^- / M) < inf.
/// FAIL on any failed sub-check, INCONCLUSIVE when a grid supremum keeps growing
/// or a moment estimate does not settle, PASS otherwise.
ConditionReport check_theorem(const AgentSet& agents, const MarketModel& model, int which,
                              const ConditionOptions& opt = {});

struct LSample {
    Vec u;
    Vec q;
    double L = 0;
};

struct PrimalSample {
    FieldArgs a;
    bool in_A = false;        ///< F_v >= -b 1, |q| <= b
    bool in_A_tilde = false;  ///< F_x 1 <= b v, |q| <= b
    bool in_B = false;        ///< r_x 1 <= b v, |q| <= b
    double M = 0;
    double M_tilde = 0;
    double N = 0;
};

/// L, M, M~ and N at one (t, z), restricted to the admissible sets for bound b.
struct FunctionalReport {
    double t = 0;
    double z = 0;
    double b = 0;
    std::vector<LSample> L;
    std::vector<PrimalSample> primal;
    std::size_t skipped_L = 0;   ///< outside {-b 1 <= u < 0, |q| <= b}
    std::size_t infeasible_L = 0;  ///< conjugate solve failed
    std::size_t skipped_A = 0;
    std::size_t skipped_A_tilde = 0;
    std::size_t skipped_B = 0;
    double sup_L = 0;
    double sup_M = 0;
    double sup_M_tilde = 0;
    double sup_N = 0;
};

FunctionalReport eval_functionals(const FieldEngine& engine, double t, double z,
                                  const std::vector<std::pair<Vec, Vec>>& uq, const std::vector<FieldArgs>& primal,
                                  double b);

/// Suprema on a time lattice and their trapezoidal integrals over [t_0, t_n].
struct FunctionalLattice {
    std::vector<FunctionalReport> slices;
    double int_L = 0;
    double int_M = 0;
    double int_M_tilde = 0;
    double int_N = 0;
};

FunctionalLattice functional_lattice(const FieldEngine& engine, const std::vector<double>& times, double z,
                                     const std::vector<std::pair<Vec, Vec>>& uq, const std::vector<FieldArgs>& primal,
                                     double b);

}  // namespace pim
