#include "gmmcc/pwl.hpp"

#include <algorithm>
#include <cmath>

#include "gmmcc/special_functions.hpp"

namespace gmmcc {

namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kOneSidedSlack = 1e-12;

// Half step width sqrt(2 tau / |Phi''(p)|); tangent gaps use it directly,
// secant gaps use twice this value.
double base_step(double tau, double p) { return std::sqrt(2.0 * tau / std::fabs(phi_second(p))); }

// max |Phi''| over [a, b]; |Phi''| is unimodal on each of (-inf,-1], [-1,1],
// [1,inf) with interior peaks only at +-1.
double curvature_bound(double a, double b) {
  double c = std::max(std::fabs(phi_second(a)), std::fabs(phi_second(b)));
  if (a <= -1.0 && b >= -1.0) c = std::max(c, std::fabs(phi_second(-1.0)));
  if (a <= 1.0 && b >= 1.0) c = std::max(c, std::fabs(phi_second(1.0)));
  return c;
}

// Core of Algorithms 1a/1b. step_mult is 1 for tangent-approximated halves
// and 2 for secant-approximated halves.
std::vector<double> build_points(double tau, double z_left, double z_right, double right_mult,
                                 double left_mult) {
  std::vector<double> pts{0.0, 1.0, -1.0, z_left, z_right};

  // Right part 1: descend from 1 toward 0; the seed step uses |Phi''(1)|,
  // later steps the value at the point just placed.
  double z = 1.0 - right_mult * base_step(tau, 1.0);
  while (z > 0.0) {
    pts.push_back(z);
    z -= right_mult * base_step(tau, z);
  }
  // Right part 2: ascend from 1 to z_right; overshoot is discarded and the
  // endpoint appended unconditionally.
  z = 1.0 + right_mult * base_step(tau, 1.0);
  while (z < z_right) {
    pts.push_back(z);
    z += right_mult * base_step(tau, z);
  }

  // Left part 1: ascend from -1 toward 0.
  z = -1.0 + left_mult * base_step(tau, -1.0);
  while (z < 0.0) {
    pts.push_back(z);
    z += left_mult * base_step(tau, z);
  }
  // Left part 2: descend from -1 to z_left.
  z = -1.0 - left_mult * base_step(tau, -1.0);
  while (z > z_left) {
    pts.push_back(z);
    z -= left_mult * base_step(tau, z);
  }

  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  out.reserve(pts.size());
  for (double p : pts) {
    if (!out.empty() && p - out.back() < kMergeTol) {
      // Merge near-duplicates, keeping the mandatory points exact.
      if (p == 0.0 || p == 1.0 || p == -1.0 || p == z_left || p == z_right) out.back() = p;
      continue;
    }
    out.push_back(p);
  }
  return out;
}

BreakpointArray make_array(double tau, double z_left, double z_right, Side kind) {
  if (!(tau > 0.0)) throw std::domain_error("breakpoints: tau must be positive");
  if (!(z_left <= -1.0) || !(z_right >= 1.0))
    throw std::domain_error("breakpoints: endpoints must satisfy z_left <= -1 and z_right >= 1");
  if (std::max(std_normal_upper_tail(z_right), std_normal_cdf(z_left)) > tau)
    throw std::domain_error("breakpoints: tail mass at the endpoints exceeds tau");

  const double right_mult = kind == Side::Outer ? 1.0 : 2.0;
  const double left_mult = kind == Side::Outer ? 2.0 : 1.0;

  BreakpointArray bp;
  bp.points = build_points(tau, z_left, z_right, right_mult, left_mult);
  bp.tau = tau;
  bp.kind = kind;
  auto zero = std::lower_bound(bp.points.begin(), bp.points.end(), 0.0);
  bp.left_count = static_cast<int>(zero - bp.points.begin());
  bp.right_count = static_cast<int>(bp.points.size()) - bp.left_count - 1;
  return bp;
}

}  // namespace

BreakpointArray outer_breakpoints(double tau, double z_left, double z_right) {
  return make_array(tau, z_left, z_right, Side::Outer);
}

BreakpointArray inner_breakpoints(double tau, double z_left, double z_right) {
  return make_array(tau, z_left, z_right, Side::Inner);
}

std::vector<std::string> check_breakpoints(const BreakpointArray& bp) {
  std::vector<std::string> issues;
  const auto& p = bp.points;
  if (p.size() != static_cast<size_t>(bp.left_count + bp.right_count + 1)) {
    issues.push_back("left_count + right_count + 1 does not match the point count");
    return issues;
  }
  if (bp.left_count < 1 || bp.right_count < 1) issues.push_back("L and R must be positive");
  for (size_t i = 1; i < p.size(); ++i)
    if (!(p[i] > p[i - 1])) issues.push_back("points not strictly increasing at index " + std::to_string(i));
  if (p[bp.left_count] != 0.0) issues.push_back("z_0 must be exactly 0");
  if (!(p.front() < 0.0 && p.back() > 0.0)) issues.push_back("need z_{-L} < 0 < z_R");
  if (std::max(std_normal_upper_tail(p.back()), std_normal_cdf(p.front())) > bp.tau)
    issues.push_back("tail mass at the endpoints exceeds tau");

  const double rel_slack = 1.0 + 1e-9;
  for (size_t i = 1; i < p.size(); ++i) {
    double a = p[i - 1], b = p[i];
    double bound = std::sqrt(2.0 * bp.tau / curvature_bound(a, b));
    bool tangent_side = (bp.kind == Side::Outer) ? (a >= 0.0) : (b <= 0.0);
    if (!tangent_side) bound *= 2.0;
    if (b - a > bound * rel_slack)
      issues.push_back("gap condition violated over [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
  }
  return issues;
}

PwlApprox build_pwl(const BreakpointArray& bp) {
  PwlApprox pwl;
  pwl.breakpoints = bp;
  pwl.kind = bp.kind;
  pwl.left_floor = std_normal_cdf(bp.at_neg(bp.left_count));
  pwl.right_cap = std_normal_cdf(bp.at_pos(bp.right_count));

  const int L = bp.left_count, R = bp.right_count;
  auto tangent = [](double at, double& slope, double& icept) {
    slope = std_normal_pdf(at);
    icept = std_normal_cdf(at) - slope * at;
  };
  auto secant = [](double a, double b, double& slope, double& icept) {
    slope = (std_normal_cdf(b) - std_normal_cdf(a)) / (b - a);
    icept = std_normal_cdf(a) - slope * a;
  };

  if (bp.kind == Side::Outer) {
    pwl.right_slope.resize(R + 1);
    pwl.right_icept.resize(R + 1);
    for (int i = 0; i <= R; ++i) tangent(bp.at_pos(i), pwl.right_slope[i], pwl.right_icept[i]);
    pwl.left_slope.resize(L);
    pwl.left_icept.resize(L);
    for (int i = 1; i <= L; ++i)
      secant(bp.at_neg(i), bp.at_neg(i - 1), pwl.left_slope[i - 1], pwl.left_icept[i - 1]);
  } else {
    pwl.right_slope.resize(R);
    pwl.right_icept.resize(R);
    for (int i = 1; i <= R; ++i)
      secant(bp.at_pos(i - 1), bp.at_pos(i), pwl.right_slope[i - 1], pwl.right_icept[i - 1]);
    pwl.left_slope.resize(L + 1);
    pwl.left_icept.resize(L + 1);
    for (int i = 0; i <= L; ++i) tangent(bp.at_neg(i), pwl.left_slope[i], pwl.left_icept[i]);
  }
  return pwl;
}

double eval_outer(const PwlApprox& pwl, double z) {
  if (pwl.kind != Side::Outer) throw std::logic_error("eval_outer: PWL kind mismatch");
  if (!std::isfinite(z)) throw std::domain_error("eval_outer: non-finite argument");
  if (z >= 0.0) {
    double m = 1.0;
    for (size_t i = 0; i < pwl.right_slope.size(); ++i)
      m = std::min(m, pwl.right_slope[i] * z + pwl.right_icept[i]);
    return m;
  }
  double m = pwl.left_floor;
  for (size_t i = 0; i < pwl.left_slope.size(); ++i)
    m = std::max(m, pwl.left_slope[i] * z + pwl.left_icept[i]);
  return m;
}

double eval_inner(const PwlApprox& pwl, double z) {
  if (pwl.kind != Side::Inner) throw std::logic_error("eval_inner: PWL kind mismatch");
  if (!std::isfinite(z)) throw std::domain_error("eval_inner: non-finite argument");
  if (z >= 0.0) {
    double m = pwl.right_cap;
    for (size_t i = 0; i < pwl.right_slope.size(); ++i)
      m = std::min(m, pwl.right_slope[i] * z + pwl.right_icept[i]);
    return m;
  }
  double m = 0.0;
  for (size_t i = 0; i < pwl.left_slope.size(); ++i)
    m = std::max(m, pwl.left_slope[i] * z + pwl.left_icept[i]);
  return m;
}

double certify_error(const PwlApprox& pwl, double grid_step, Exec exec) {
  if (!(grid_step > 0.0)) throw std::domain_error("certify_error: grid_step must be positive");
  const double lo = pwl.breakpoints.points.front() - 2.0;
  const double hi = pwl.breakpoints.points.back() + 2.0;
  const long count = static_cast<long>(std::floor((hi - lo) / grid_step)) + 1;
  const bool outer = pwl.kind == Side::Outer;

  double max_dev = -1.0, max_z = lo;
  double bad_z = 0.0, bad_dev = 0.0;

#pragma omp parallel if (exec == Exec::Parallel)
  {
    double local_max = -1.0, local_max_z = lo;
    double local_bad_z = 0.0, local_bad_dev = 0.0;
    bool local_violation = false;
#pragma omp for nowait
    for (long i = 0; i < count; ++i) {
      double z = lo + static_cast<double>(i) * grid_step;
      double dev = outer ? eval_outer(pwl, z) - std_normal_cdf(z)
                         : std_normal_cdf(z) - eval_inner(pwl, z);
      if (dev > local_max || (dev == local_max && z < local_max_z)) {
        local_max = dev;
        local_max_z = z;
      }
      if (dev < -kOneSidedSlack && (!local_violation || z < local_bad_z)) {
        local_violation = true;
        local_bad_z = z;
        local_bad_dev = dev;
      }
    }
#pragma omp critical
    {
      if (local_max > max_dev || (local_max == max_dev && local_max_z < max_z)) {
        max_dev = local_max;
        max_z = local_max_z;
      }
      if (local_violation && (bad_dev >= -kOneSidedSlack || local_bad_z < bad_z)) {
        bad_z = local_bad_z;
        bad_dev = local_bad_dev;
      }
    }
  }

  if (bad_dev < -kOneSidedSlack)
    throw CertificationError(outer ? "outer approximation fell below Phi"
                                   : "inner approximation rose above Phi",
                             bad_z);
  if (max_dev > pwl.breakpoints.tau)
    throw CertificationError("certified deviation exceeds tau", max_z);
  return max_dev;
}

std::vector<ProbePoint> count_scaling_probe(const std::vector<double>& taus, Side kind) {
  std::vector<ProbePoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    double e = tail_endpoint(tau);
    BreakpointArray bp = kind == Side::Outer ? outer_breakpoints(tau, -e, e)
                                             : inner_breakpoints(tau, -e, e);
    double law = std::sqrt((1.0 / tau) * std::log(1.0 / tau));
    out.push_back({tau, static_cast<int>(bp.points.size()),
                   static_cast<double>(bp.points.size()) / law});
  }
  return out;
}

}  // namespace gmmcc
