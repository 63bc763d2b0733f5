#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gmmcc/gmm.hpp"
#include "gmmcc/pwl.hpp"

namespace gmmcc {

enum class VarKind { Continuous, Binary };
enum class RowSense { Le, Ge, Eq };

constexpr double kInf = 1e30;  // bound magnitude treated as unbounded

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct LinTerm {
  int var;
  double coeff;
};

struct LinearRow {
  std::string name;
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::Ge;
  double rhs = 0.0;
};

struct QuadTerm {
  int var_i, var_j;
  double coeff;
};

struct QuadRow {
  std::string name;
  std::vector<LinTerm> linear;
  std::vector<QuadTerm> quad;
  RowSense sense = RowSense::Ge;
  double rhs = 0.0;
};

struct Sos2Group {
  std::string name;
  std::vector<int> vars;  // ordered; weight = 1-based list position
};

// Solver-agnostic MIQP intermediate representation.
struct MiqpModel {
  std::vector<Variable> variables;
  std::vector<LinearRow> rows;
  std::vector<QuadRow> quad_rows;
  std::vector<Sos2Group> sos2;
  std::vector<LinTerm> objective;  // minimize
  std::vector<std::pair<std::string, std::string>> metadata;

  int add_var(const std::string& name, VarKind kind, double lower, double upper);
  int find_var(const std::string& name) const;  // -1 when absent
  void set_meta(const std::string& key, const std::string& value);
};

// Bounds on the auxiliary z variables; must satisfy z_lo <= z_{-L} < z_R <= z_hi.
struct ModelBounds {
  double z_lo = -1e4;
  double z_hi = 1e4;
};

struct BuildOptions {
  ModelBounds bounds;
  double endpoint = 6.466;     // breakpoint array endpoints are +-endpoint
  bool sos2_as_binary = false; // adjacency binarization instead of native SOS2
  bool split_quad_eq = false;  // x'Sx = lam^2 as two inequalities
};

// Variables x, z_k, zeta_k, lam_k; mixing row, region rows, bilinear and
// quadratic-equality rows. The CDF constraint Phi(z_k) >= zeta_k is *not*
// emitted; callers attach outer or inner blocks.
MiqpModel build_skeleton(const GmmInstance& inst, const BuildOptions& opt = {});

// Rows of the set H (outer) for component k against z_k / zeta_k.
void attach_outer_block(MiqpModel& model, int k, const PwlApprox& pwl, const ModelBounds& bounds,
                        bool sos2_as_binary = false);
// Rows of the set G (inner) for component k.
void attach_inner_block(MiqpModel& model, int k, const PwlApprox& pwl, const ModelBounds& bounds);

MiqpModel build_pwl_outer(const GmmInstance& inst, double tau, const BuildOptions& opt = {});
MiqpModel build_pwl_inner(const GmmInstance& inst, double tau, const BuildOptions& opt = {});

// Scenario model: x plus S indicator binaries, big-M rows, cardinality row.
MiqpModel build_saa(const GmmInstance& inst, int sample_count, double big_m, Rng& rng);

// S = 100/(1-theta), except 20/(1-theta) for theta >= 0.999.
int default_saa_samples(double theta);

// IR validation: references resolve, binaries have unit bounds, SOS2 groups
// are ordered duplicate-free lists of nonnegative continuous variables.
std::vector<std::string> validate_model(const MiqpModel& model);

// Single-block models over free (z, zeta); used to exercise the emitted rows
// directly.
MiqpModel build_outer_block_model(const PwlApprox& pwl, const ModelBounds& bounds);
MiqpModel build_inner_block_model(const PwlApprox& pwl, const ModelBounds& bounds);

struct WitnessResult {
  bool feasible = false;
  std::vector<std::pair<std::string, double>> assignment;  // block-model names (k = 0)
};

// Constructive feasibility per the set-equivalence proofs: an explicit
// (alpha, t, y) assignment when the PWL value admits zeta, else infeasible.
WitnessResult witness_outer(double z, double zeta, const PwlApprox& pwl, const ModelBounds& bounds);
WitnessResult witness_inner(double z, double zeta, const PwlApprox& pwl, const ModelBounds& bounds);

// Max violation of rows and variable bounds under a name -> value assignment;
// unassigned variables read as 0.
double max_violation(const MiqpModel& model,
                     const std::vector<std::pair<std::string, double>>& assignment);

}  // namespace gmmcc
