#pragma once

#include <string>

#include "gmmcc/model.hpp"

namespace gmmcc {

// CPLEX-LP-dialect text export. Canonical: variables in declaration order
// (every variable appears in Bounds), constraints in emission order, all
// numerals with 17 significant digits. Quadratic terms sit inside bracketed
// expressions using `^2` and `*`.
std::string write_lp(const MiqpModel& model);

// Inverse of write_lp for files this library produced:
// write_lp(parse_lp(write_lp(m))) == write_lp(m) byte for byte.
MiqpModel parse_lp(const std::string& text);

// Companion JSON export of the raw IR.
std::string write_ir_json(const MiqpModel& model);

}  // namespace gmmcc
