#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gmmcc/exec.hpp"

namespace gmmcc {

enum class Side { Outer, Inner };

// Ordered breakpoints z_{-L} < ... < z_{-1} < z_0 = 0 < z_1 < ... < z_R
// together with the accuracy tau they certify.
struct BreakpointArray {
  std::vector<double> points;
  int left_count = 0;   // L
  int right_count = 0;  // R
  double tau = 0.0;
  Side kind = Side::Outer;

  double at_neg(int i) const { return points[left_count - i]; }  // z_{-i}
  double at_pos(int i) const { return points[left_count + i]; }  // z_{+i}
};

struct CertificationError : std::runtime_error {
  double offending_z;
  CertificationError(const std::string& what, double z)
      : std::runtime_error(what), offending_z(z) {}
};

// Adaptive breakpoint construction. Tangent-side gaps obey
// width <= sqrt(2 tau / C), secant-side gaps the doubled bound; the outer
// array uses tangents on z >= 0 and secants on z < 0, the inner array swaps
// the roles. Always contains {z_left, -1, 0, 1, z_right}.
BreakpointArray outer_breakpoints(double tau, double z_left, double z_right);
BreakpointArray inner_breakpoints(double tau, double z_left, double z_right);

// Independent re-check of every BreakpointArray invariant (ordering, zero
// membership, tail masses, per-gap curvature conditions). Empty result = valid.
std::vector<std::string> check_breakpoints(const BreakpointArray& bp);

// Tangent/secant coefficients realizing the PWL over/under approximation.
// Outer: right_* are tangents at z_0..z_R (size R+1), left_* are secants over
// [z_{-i}, z_{-i+1}] stored at index i-1 (size L).
// Inner: right_* are secants over [z_{i-1}, z_i] stored at index i-1 (size R),
// left_* are tangents at z_0, z_{-1}, ..., z_{-L} (size L+1).
struct PwlApprox {
  BreakpointArray breakpoints;
  std::vector<double> right_slope, right_icept;
  std::vector<double> left_slope, left_icept;
  double left_floor = 0.0;  // Phi(z_{-L})
  double right_cap = 1.0;   // Phi(z_R)
  Side kind = Side::Outer;
};

PwlApprox build_pwl(const BreakpointArray& bp);

double eval_outer(const PwlApprox& pwl, double z);
double eval_inner(const PwlApprox& pwl, double z);

// Scans [z_{-L} - 2, z_R + 2] at the given step; asserts one-sidedness and the
// tau bound, returns the max deviation in the certified direction. Throws
// CertificationError carrying the offending z on violation.
double certify_error(const PwlApprox& pwl, double grid_step, Exec exec = Exec::Parallel);

struct ProbePoint {
  double tau;
  int count;
  double bound_ratio;  // count / sqrt((1/tau) ln(1/tau))
};

// Builds arrays with endpoints +-tail_endpoint(tau) for each tau and reports
// the breakpoint counts against the theoretical growth law.
std::vector<ProbePoint> count_scaling_probe(const std::vector<double>& taus, Side kind);

}  // namespace gmmcc
