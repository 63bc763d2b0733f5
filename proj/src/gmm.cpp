#include "gmmcc/gmm.hpp"

#include <cmath>
#include <stdexcept>

#include "gmmcc/special_functions.hpp"

namespace gmmcc {

namespace {

constexpr double kZeroNorm = 1e-12;

bool is_zero_vector(const Vec& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

void require_dim(const GmmInstance& inst, const Vec& x, const char* who) {
  if (static_cast<int>(x.size()) != inst.n)
    throw std::invalid_argument(std::string(who) + ": x has wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite x");
}

}  // namespace

double pd_pivot_tol(const Mat& sym) {
  double trace = 0.0;
  for (int i = 0; i < sym.rows; ++i) trace += sym(i, i);
  return 1e-12 * trace / std::max(1, sym.rows);
}

void factorize_components(GmmInstance& inst) {
  for (auto& comp : inst.components) {
    comp.factor_ok = cholesky(comp.covariance, comp.factor, pd_pivot_tol(comp.covariance));
    if (!comp.factor_ok)
      throw std::runtime_error("factorize_components: covariance not positive definite");
  }
}

std::vector<std::string> validate_instance(const GmmInstance& inst) {
  std::vector<std::string> issues;
  auto flag = [&](const std::string& s) { issues.push_back(s); };

  if (inst.n < 1) flag("n must be >= 1");
  if (inst.components.empty()) flag("need K >= 1 components");
  if (!(inst.theta > 0.0 && inst.theta < 1.0)) flag("theta must lie in (0,1)");
  if (static_cast<int>(inst.c.size()) != inst.n) flag("objective c has wrong dimension");
  if (!std::isfinite(inst.b)) flag("b is not finite");
  for (double v : inst.c)
    if (!std::isfinite(v)) flag("objective c has non-finite entries");

  double wsum = 0.0;
  for (size_t k = 0; k < inst.components.size(); ++k) {
    const auto& comp = inst.components[k];
    const std::string tag = "component " + std::to_string(k);
    if (comp.weight < 0.0) flag(tag + ": negative weight");
    wsum += comp.weight;
    if (static_cast<int>(comp.mean.size()) != inst.n) flag(tag + ": mean has wrong dimension");
    if (comp.covariance.rows != inst.n || comp.covariance.cols != inst.n)
      flag(tag + ": covariance has wrong dimensions");
    for (double v : comp.mean)
      if (!std::isfinite(v)) flag(tag + ": non-finite mean entry");
    bool finite = true;
    for (double v : comp.covariance.a)
      if (!std::isfinite(v)) finite = false;
    if (!finite) {
      flag(tag + ": non-finite covariance entry");
      continue;
    }
    for (int i = 0; i < comp.covariance.rows; ++i)
      for (int j = 0; j < i; ++j)
        if (std::fabs(comp.covariance(i, j) - comp.covariance(j, i)) >
            1e-9 * (1.0 + std::fabs(comp.covariance(i, j))))
          flag(tag + ": covariance not symmetric");
    Mat scratch;
    if (!cholesky(comp.covariance, scratch, pd_pivot_tol(comp.covariance)))
      flag(tag + ": covariance not positive definite");
  }
  if (!inst.components.empty() && std::fabs(wsum - 1.0) > 1e-12)
    flag("weights do not sum to 1");

  const auto& r = inst.region;
  if (static_cast<int>(r.box_lo.size()) != inst.n || static_cast<int>(r.box_hi.size()) != inst.n)
    flag("box bounds have wrong dimension");
  else
    for (int i = 0; i < inst.n; ++i)
      if (!(r.box_lo[i] < r.box_hi[i])) flag("box_lo must be strictly below box_hi");
  if (r.A.rows != static_cast<int>(r.d.size())) flag("A and d row counts differ");
  if (r.A.rows > 0 && r.A.cols != inst.n) flag("A has wrong column count");
  if (r.H.rows != static_cast<int>(r.h.size())) flag("H and h row counts differ");
  if (r.H.rows > 0 && r.H.cols != inst.n) flag("H has wrong column count");

  return issues;
}

double component_probability(const GaussianComponent& comp, const Vec& x, double b) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::domain_error("component_probability: non-finite x");
  if (is_zero_vector(x)) return b >= 0.0 ? 1.0 : 0.0;
  if (!comp.factor_ok) throw std::logic_error("component_probability: factor not prepared");
  double s2 = quad_form_factor(comp.factor, x);
  if (!(s2 > 0.0))
    throw std::runtime_error("component_probability: x'Sx <= 0 for x != 0 (Sigma not PD)");
  double z = (b - dot(comp.mean, x)) / std::sqrt(s2);
  if (z > 40.0) z = 40.0;
  if (z < -40.0) z = -40.0;
  return std_normal_cdf(z);
}

double chance_probability(const GmmInstance& inst, const Vec& x) {
  require_dim(inst, x, "chance_probability");
  double p = 0.0;
  for (const auto& comp : inst.components) p += comp.weight * component_probability(comp, x, inst.b);
  return p;
}

Vec chance_gradient(const GmmInstance& inst, const Vec& x) {
  require_dim(inst, x, "chance_gradient");
  if (norm2(x) < kZeroNorm) {
    if (inst.b > 0.0) return Vec(inst.n, 0.0);
    throw std::domain_error("chance_gradient: undefined at x = 0 with b <= 0");
  }
  Vec grad(inst.n, 0.0);
  for (const auto& comp : inst.components) {
    if (!comp.factor_ok) throw std::logic_error("chance_gradient: factor not prepared");
    double s2 = quad_form_factor(comp.factor, x);
    double s = std::sqrt(s2);
    double num = inst.b - dot(comp.mean, x);
    double g = num / s;
    // exp underflows to +0 for |g| beyond ~38.6, which is the right limit here
    double density = std::isfinite(g) ? std_normal_pdf(g) : 0.0;
    Vec sx = matvec(comp.covariance, x);
    double w_density = comp.weight * density;
    for (int i = 0; i < inst.n; ++i)
      grad[i] += w_density * (-comp.mean[i] / s - num * sx[i] / (s2 * s));
  }
  return grad;
}

Mat sample(const GmmInstance& inst, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  std::vector<double> weights;
  weights.reserve(inst.components.size());
  for (const auto& comp : inst.components) weights.push_back(comp.weight);

  Mat out(count, inst.n);
  Vec g(inst.n);
  for (int r = 0; r < count; ++r) {
    int k = rng.pick_weighted(weights);
    const auto& comp = inst.components[k];
    if (!comp.factor_ok) throw std::logic_error("sample: factor not prepared");
    for (int i = 0; i < inst.n; ++i) g[i] = rng.normal();
    for (int i = 0; i < inst.n; ++i) {
      double s = comp.mean[i];
      for (int j = 0; j <= i; ++j) s += comp.factor(i, j) * g[j];
      out(r, i) = s;
    }
  }
  return out;
}

}  // namespace gmmcc
