#pragma once

#include <string>
#include <vector>

#include "gmmcc/linalg.hpp"
#include "gmmcc/rng.hpp"

namespace gmmcc {

struct GaussianComponent {
  double weight = 0.0;
  Vec mean;
  Mat covariance;
  Mat factor;  // lower-triangular, factor factor^T = covariance
  bool factor_ok = false;
};

// Region A x >= d, H x = h plus the compactness box.
struct Polyhedron {
  Mat A;
  Vec d;
  Mat H;
  Vec h;
  Vec box_lo, box_hi;
};

struct GmmInstance {
  int n = 0;
  Vec c;
  double b = 0.0;
  double theta = 0.0;
  std::vector<GaussianComponent> components;
  Polyhedron region;
};

// Pivot tolerance used for "positive definite at tolerance" decisions.
double pd_pivot_tol(const Mat& sym);

// Computes and caches the covariance factors. Throws std::runtime_error if
// any covariance is not positive definite. Call once after building; the
// instance is immutable afterwards.
void factorize_components(GmmInstance& inst);

// Structured diagnostics (empty = valid): weight simplex, PD factorizations,
// box sanity, finite data, dimension consistency. Never throws.
std::vector<std::string> validate_instance(const GmmInstance& inst);

// p_k(x): indicator of b >= 0 at x = 0, otherwise Phi((b - mu'x)/sqrt(x'Sx)).
double component_probability(const GaussianComponent& comp, const Vec& x, double b);

// p(x) = sum_k w_k p_k(x).
double chance_probability(const GmmInstance& inst, const Vec& x);

// Gradient of p; exactly zero at x ~ 0 when b > 0, undefined (throws
// std::domain_error) at x ~ 0 when b <= 0.
Vec chance_gradient(const GmmInstance& inst, const Vec& x);

// count x n draws, row-major: pick component k with probability w_k, then
// mean_k + factor_k g with g standard normal.
Mat sample(const GmmInstance& inst, int count, Rng& rng);

}  // namespace gmmcc
