#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pim/conditions.hpp"
#include "pim/fields.hpp"
#include "pim/sde.hpp"

namespace pim {

/// %.<precision>g
std::string fmt(double x, int precision);

/// Header t,B,U1..UM,cash,v1..vM,Q1..QJ,stopped.
void write_path_csv(std::ostream& os, const PathResult& p, int precision);

struct FieldRow {
    FieldPoint field;
    Vec K;
};

/// Header t,z,v1..vM,x,q1..qJ,F,Fx,Fv1..FvM,H,Hv1..HvM,K1..KM.
void write_fields_csv(std::ostream& os, const std::vector<FieldRow>& rows, std::size_t M, std::size_t J,
                      int precision);

void write_summary(std::ostream& os, const EnsembleSummary& s, int precision);

void write_condition_report(std::ostream& os, const ConditionReport& r);

void write_functionals(std::ostream& os, const FunctionalLattice& lat, int precision);

}  // namespace pim
