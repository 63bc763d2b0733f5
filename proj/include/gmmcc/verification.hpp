#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmcc/exec.hpp"
#include "gmmcc/gmm.hpp"

namespace gmmcc {

struct VerificationReport {
  double objective = 0.0;
  double theta_check = 0.0;  // exact chance probability at x
  bool region_ok = false;
  double worst_violation = 0.0;
  double tau_hat = 0.0;
  bool tau_feasible = false;
  std::vector<std::string> notes;
};

// Region rows at absolute tolerance 1e-8; the chance comparison is exact.
VerificationReport verify(const GmmInstance& inst, const Vec& x, double tau_hat);

struct ComparisonMetrics {
  double pct_obj = 0.0;    // max(c'(xI - xO), 0) / c'xI * 100
  double pct_theta = 0.0;  // (thetaI - thetaO) / theta * 100
  std::vector<std::string> notes;
};

ComparisonMetrics compare(const GmmInstance& inst, const Vec& x_inner, const Vec& x_outer);

struct DeskSolveResult {
  bool found = false;
  Vec x;
  double objective = 0.0;
  double theta_check = 0.0;
};

// Grid search over the box (resolution points per axis, n <= 3) filtered by
// the region rows and the exact chance constraint, then local refinement
// around the incumbent. Deterministic tie-break: (objective, lexicographic x).
DeskSolveResult desk_solve(const GmmInstance& inst, int resolution, int refine_rounds,
                           Exec exec = Exec::Parallel);

struct AuditReport {
  int samples = 0;
  double max_outer_gap = 0.0;  // max over x of sum_k w_k (outer - exact)
  double max_inner_gap = 0.0;
  int violations = 0;
  Vec first_violation_x;
};

// Draws box points and checks inner <= exact <= outer with both gaps <= tau
// for the surrogate probabilities.
AuditReport sandwich_audit(const GmmInstance& inst, double tau, int sample_count, uint64_t seed,
                           Exec exec = Exec::Parallel);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Empirical P[xi'x <= b] with binomial standard error. Chunked sub-streams
// seeded from `seed`, so the result is identical for both Exec policies and
// any thread count.
McEstimate mc_probability(const GmmInstance& inst, const Vec& x, long draws, uint64_t seed,
                          Exec exec = Exec::Parallel);

}  // namespace gmmcc
