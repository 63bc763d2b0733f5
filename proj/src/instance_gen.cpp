#include "gmmcc/instance_gen.hpp"

#include <cmath>
#include <stdexcept>

namespace gmmcc {

double van_der_corput(long long index) {
  if (index < 1) throw std::domain_error("van_der_corput: index must be >= 1");
  double result = 0.0, base = 0.5;
  for (long long i = index; i > 0; i >>= 1, base *= 0.5)
    if (i & 1) result += base;
  return result;
}

Mat random_orthogonal(int n, Rng& rng) {
  if (n < 2) throw std::domain_error("random_orthogonal: need n >= 2");
  Mat q = Mat::identity(n);
  for (int r = 0; r < 2 * n; ++r) {
    int i = static_cast<int>(rng.uniform01() * n);
    if (i >= n) i = n - 1;
    int j = i;
    while (j == i) {
      j = static_cast<int>(rng.uniform01() * n);
      if (j >= n) j = n - 1;
    }
    double angle = rng.uniform(0.0, kTwoPi);
    double c = std::cos(angle), s = std::sin(angle);
    // Left-multiply by the plane rotation acting on rows i and j.
    for (int col = 0; col < n; ++col) {
      double qi = q(i, col), qj = q(j, col);
      q(i, col) = c * qi - s * qj;
      q(j, col) = s * qi + c * qj;
    }
  }
  return q;
}

CovarianceDraw random_covariance(int n, double varsigma, double ell_k, Rng& rng) {
  if (!(ell_k > 0.0 && ell_k <= 1.0))
    throw std::domain_error("random_covariance: ell_k must lie in (0, 1]");
  if (!(varsigma > 0.0)) throw std::domain_error("random_covariance: varsigma must be positive");
  CovarianceDraw draw;
  const double eps = 1e-6 * varsigma;
  const double hi = varsigma * ell_k;
  draw.eigenvalues.resize(n);
  for (auto& v : draw.eigenvalues) {
    double u = 1.0 - rng.uniform01();  // (0, 1]
    v = eps + u * (hi - eps);
  }
  draw.q = random_orthogonal(n, rng);

  // sigma = Q^T D Q, symmetrized to kill rounding skew.
  Mat dq(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dq(i, j) = draw.eigenvalues[i] * draw.q(i, j);
  draw.sigma = matmul(transpose(draw.q), dq);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double avg = 0.5 * (draw.sigma(i, j) + draw.sigma(j, i));
      draw.sigma(i, j) = avg;
      draw.sigma(j, i) = avg;
    }
  return draw;
}

std::vector<Vec> random_means(int n, int K, double varrho, Rng& rng) {
  const double cap = varrho * std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
  std::vector<Vec> means;
  means.reserve(K);
  for (int k = 0; k < K; ++k) {
    Vec mu(n);
    for (int i = 0; i < n; ++i) {
      double a = rng.uniform(0.0, cap);
      double b = rng.uniform(0.0, cap);
      if (a > b) std::swap(a, b);
      mu[i] = rng.uniform(a, b);
    }
    means.push_back(std::move(mu));
  }
  return means;
}

double compute_rhs(const std::vector<GaussianComponent>& components, const Polyhedron& region,
                   int b_samples, double multiplier, Rng& rng) {
  if (b_samples < 1) throw std::domain_error("compute_rhs: b_samples must be >= 1");
  const int n = static_cast<int>(region.box_lo.size());
  double acc = 0.0;
  Vec x(n);
  for (int s = 0; s < b_samples; ++s) {
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(region.box_lo[i], region.box_hi[i]);
    for (const auto& comp : components) {
      double q = dot(x, matvec(comp.covariance, x));
      acc += dot(x, comp.mean) + multiplier * std::sqrt(std::max(q, 0.0));
    }
  }
  return acc / (static_cast<double>(b_samples) * components.size());
}

Polyhedron random_polyhedron(int n, int rows, double half_width, Rng& rng) {
  if (rows < 0) throw std::domain_error("random_polyhedron: rows must be >= 0");
  Polyhedron region;
  region.A = Mat(rows, n);
  for (auto& v : region.A.a) v = rng.uniform01();
  region.d.resize(rows);
  for (auto& v : region.d) v = rng.uniform(n / 4.0, 3.0 * n / 4.0);
  region.H = Mat(0, n);
  region.box_lo.assign(n, -half_width);
  region.box_hi.assign(n, half_width);
  return region;
}

Vec paper_weights(int K) {
  switch (K) {
    case 5:
      return {0.05, 0.1, 0.2, 0.3, 0.35};
    case 10:
      return {0.001, 0.009, 0.02, 0.05, 0.08, 0.09, 0.1, 0.15, 0.2, 0.3};
    case 15:
      return {0.001, 0.005, 0.009, 0.01, 0.01, 0.015, 0.02, 0.05,
              0.08, 0.09, 0.1, 0.12, 0.13, 0.17, 0.19};
    default:
      throw std::invalid_argument("paper_weights: tables exist only for K in {5, 10, 15}");
  }
}

GmmInstance generate_instance(const GenConfig& cfg) {
  if (cfg.n < 2 || cfg.K < 1) throw std::invalid_argument("generate_instance: need n >= 2, K >= 1");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0))
    throw std::invalid_argument("generate_instance: theta must lie in (0,1)");

  Vec weights = cfg.weight_mode == WeightMode::PaperUnequal
                    ? paper_weights(cfg.K)
                    : Vec(cfg.K, 1.0 / cfg.K);

  Rng rng(cfg.seed);
  GmmInstance inst;
  inst.n = cfg.n;
  inst.theta = cfg.theta;

  // Draw order is fixed: means, covariances, polyhedron, objective, rhs.
  auto means = random_means(cfg.n, cfg.K, cfg.varrho, rng);
  for (int k = 0; k < cfg.K; ++k) {
    GaussianComponent comp;
    comp.weight = weights[k];
    comp.mean = std::move(means[k]);
    comp.covariance = random_covariance(cfg.n, cfg.varsigma, van_der_corput(k + 1), rng).sigma;
    inst.components.push_back(std::move(comp));
  }

  int rows = cfg.ineq_rows;
  if (rows < 0) rows = cfg.n <= 500 ? cfg.n / 10 : cfg.n / 20;
  inst.region = random_polyhedron(cfg.n, rows, cfg.box_half_width, rng);

  inst.c.resize(cfg.n);
  for (auto& v : inst.c) v = rng.uniform(-1.0, 1.0);

  inst.b = compute_rhs(inst.components, inst.region, cfg.b_samples, cfg.b_stddev_multiplier, rng);

  factorize_components(inst);
  return inst;
}

}  // namespace gmmcc
