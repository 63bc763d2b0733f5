#pragma once

#include <cstdint>

#include "gmmcc/gmm.hpp"

namespace gmmcc {

enum class WeightMode { Equal, PaperUnequal };

struct GenConfig {
  int n = 100;
  int K = 5;
  double varrho = 2.0;    // component-mean control
  double varsigma = 2.0;  // variance control
  double theta = 0.95;
  WeightMode weight_mode = WeightMode::PaperUnequal;
  uint64_t seed = 0;
  double box_half_width = 20.0;
  int ineq_rows = -1;  // -1: n/10 for n <= 500, n/20 otherwise
  int b_samples = 1000;
  double b_stddev_multiplier = 1.0;
};

// Base-2 radical inverse; index >= 1.
double van_der_corput(long long index);

// Product of 2n Givens rotations at uniformly chosen distinct index pairs
// with angles uniform on [0, 2pi).
Mat random_orthogonal(int n, Rng& rng);

struct CovarianceDraw {
  Mat sigma;
  Vec eigenvalues;
  Mat q;
};

// Eigenvalues uniform on (eps, varsigma * ell_k] with eps = 1e-6 * varsigma,
// rotated by a random orthogonal matrix: sigma = Q^T D Q.
CovarianceDraw random_covariance(int n, double varsigma, double ell_k, Rng& rng);

// Per component: per-coordinate interval bounds inside [0, varrho sqrt(n) log n],
// then uniform draws within the bounds.
std::vector<Vec> random_means(int n, int K, double varrho, Rng& rng);

// Mean of x' mu_k + multiplier * sqrt(x' Sigma_k x) over b_samples box points
// and all components.
double compute_rhs(const std::vector<GaussianComponent>& components, const Polyhedron& region,
                   int b_samples, double multiplier, Rng& rng);

// A ~ U[0,1], d ~ U[n/4, 3n/4], no equality rows, box +-half_width.
Polyhedron random_polyhedron(int n, int rows, double half_width, Rng& rng);

// Unequal weight tables used by the "paper" weight mode; defined for K in {5, 10, 15}.
Vec paper_weights(int K);

// Full generator; deterministic in cfg. The result always passes
// validate_instance.
GmmInstance generate_instance(const GenConfig& cfg);

}  // namespace gmmcc
