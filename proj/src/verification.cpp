#include "gmmcc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmmcc/pwl.hpp"
#include "gmmcc/special_functions.hpp"

namespace gmmcc {

namespace {

constexpr double kRegionTol = 1e-8;
constexpr double kSandwichSlack = 1e-9;

bool lex_less(double obj_a, const Vec& xa, double obj_b, const Vec& xb) {
  if (obj_a != obj_b) return obj_a < obj_b;
  for (size_t i = 0; i < xa.size(); ++i)
    if (xa[i] != xb[i]) return xa[i] < xb[i];
  return false;
}

}  // namespace

VerificationReport verify(const GmmInstance& inst, const Vec& x, double tau_hat) {
  if (static_cast<int>(x.size()) != inst.n)
    throw std::invalid_argument("verify: solution has wrong dimension");
  VerificationReport rep;
  rep.tau_hat = tau_hat;
  rep.objective = dot(inst.c, x);

  double worst = 0.0;
  const auto& r = inst.region;
  for (int row = 0; row < r.A.rows; ++row) {
    double lhs = 0.0;
    for (int i = 0; i < inst.n; ++i) lhs += r.A(row, i) * x[i];
    worst = std::max(worst, r.d[row] - lhs);
  }
  for (int row = 0; row < r.H.rows; ++row) {
    double lhs = 0.0;
    for (int i = 0; i < inst.n; ++i) lhs += r.H(row, i) * x[i];
    worst = std::max(worst, std::fabs(lhs - r.h[row]));
  }
  for (int i = 0; i < inst.n; ++i) {
    worst = std::max(worst, r.box_lo[i] - x[i]);
    worst = std::max(worst, x[i] - r.box_hi[i]);
  }
  rep.worst_violation = std::max(worst, 0.0);
  rep.region_ok = worst <= kRegionTol;

  rep.theta_check = chance_probability(inst, x);
  rep.tau_feasible = rep.region_ok && rep.theta_check >= inst.theta - tau_hat;

  bool zero = true;
  for (double v : x)
    if (v != 0.0) zero = false;
  if (zero) rep.notes.push_back("x = 0: chance probability follows the indicator of b >= 0");
  return rep;
}

ComparisonMetrics compare(const GmmInstance& inst, const Vec& x_inner, const Vec& x_outer) {
  if (static_cast<int>(x_inner.size()) != inst.n || static_cast<int>(x_outer.size()) != inst.n)
    throw std::invalid_argument("compare: solution has wrong dimension");
  double ci = dot(inst.c, x_inner);
  double co = dot(inst.c, x_outer);
  if (ci == 0.0) throw std::domain_error("compare: objective at the inner solution is zero");
  ComparisonMetrics metrics;
  metrics.pct_obj = std::max(ci - co, 0.0) / ci * 100.0;
  double ti = chance_probability(inst, x_inner);
  double to = chance_probability(inst, x_outer);
  metrics.pct_theta = (ti - to) / inst.theta * 100.0;
  if (ci < 0.0)
    metrics.notes.push_back("inner objective is negative; %Obj uses the printed formula verbatim");
  return metrics;
}

DeskSolveResult desk_solve(const GmmInstance& inst, int resolution, int refine_rounds, Exec exec) {
  if (inst.n > 3) throw std::domain_error("desk_solve: grid oracle is limited to n <= 3");
  if (resolution < 16) throw std::domain_error("desk_solve: resolution must be >= 16");
  const int n = inst.n;

  Vec lo = inst.region.box_lo, hi = inst.region.box_hi;
  DeskSolveResult best;

  for (int round = 0; round <= refine_rounds; ++round) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= resolution;
    Vec step(n);
    for (int i = 0; i < n; ++i) step[i] = (hi[i] - lo[i]) / (resolution - 1);

    bool found = false;
    double best_obj = 0.0;
    Vec best_x;

#pragma omp parallel if (exec == Exec::Parallel)
    {
      bool local_found = false;
      double local_obj = 0.0;
      Vec local_x;
      Vec x(n);
#pragma omp for nowait
      for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int i = 0; i < n; ++i) {
          x[i] = lo[i] + step[i] * static_cast<double>(rem % resolution);
          rem /= resolution;
        }
        bool ok = true;
        const auto& r = inst.region;
        for (int row = 0; ok && row < r.A.rows; ++row) {
          double lhs = 0.0;
          for (int i = 0; i < n; ++i) lhs += r.A(row, i) * x[i];
          ok = lhs >= r.d[row] - kRegionTol;
        }
        for (int row = 0; ok && row < r.H.rows; ++row) {
          double lhs = 0.0;
          for (int i = 0; i < n; ++i) lhs += r.H(row, i) * x[i];
          ok = std::fabs(lhs - r.h[row]) <= kRegionTol;
        }
        if (!ok) continue;
        if (chance_probability(inst, x) < inst.theta) continue;
        double obj = dot(inst.c, x);
        if (!local_found || lex_less(obj, x, local_obj, local_x)) {
          local_found = true;
          local_obj = obj;
          local_x = x;
        }
      }
#pragma omp critical
      {
        if (local_found && (!found || lex_less(local_obj, local_x, best_obj, best_x))) {
          found = true;
          best_obj = local_obj;
          best_x = local_x;
        }
      }
    }

    if (!found) break;
    best.found = true;
    best.x = best_x;
    best.objective = best_obj;

    // Refine: one current cell around the incumbent, clipped to the box.
    Vec nlo(n), nhi(n);
    for (int i = 0; i < n; ++i) {
      nlo[i] = std::max(inst.region.box_lo[i], best_x[i] - step[i]);
      nhi[i] = std::min(inst.region.box_hi[i], best_x[i] + step[i]);
    }
    lo = nlo;
    hi = nhi;
  }

  if (best.found) best.theta_check = chance_probability(inst, best.x);
  return best;
}

AuditReport sandwich_audit(const GmmInstance& inst, double tau, int sample_count, uint64_t seed,
                           Exec exec) {
  if (!(tau > 0.0)) throw std::domain_error("sandwich_audit: tau must be positive");
  PwlApprox outer = build_pwl(outer_breakpoints(tau, -6.466, 6.466));
  PwlApprox inner = build_pwl(inner_breakpoints(tau, -6.466, 6.466));

  // Fixed sub-stream seeds make the reduction independent of threading.
  const int chunks = 64;
  std::vector<uint64_t> chunk_seeds(chunks);
  Rng seeder(seed);
  for (auto& s : chunk_seeds) s = seeder.next_u64();

  AuditReport rep;
  rep.samples = sample_count;
  double max_outer = 0.0, max_inner = 0.0;
  int violations = 0;
  Vec first_bad;
  int first_bad_chunk = chunks;

#pragma omp parallel for if (exec == Exec::Parallel) schedule(static)
  for (int c = 0; c < chunks; ++c) {
    int count = sample_count / chunks + (c < sample_count % chunks ? 1 : 0);
    Rng rng(chunk_seeds[c]);
    Vec x(inst.n);
    double lmax_o = 0.0, lmax_i = 0.0;
    int lviol = 0;
    Vec lbad;
    for (int s = 0; s < count; ++s) {
      for (int i = 0; i < inst.n; ++i)
        x[i] = rng.uniform(inst.region.box_lo[i], inst.region.box_hi[i]);
      bool zero = true;
      for (double v : x)
        if (v != 0.0) zero = false;
      if (zero) continue;  // z_k undefined; p(0) is the indicator branch
      double p_in = 0.0, p_ex = 0.0, p_out = 0.0;
      for (const auto& comp : inst.components) {
        double sdev = std::sqrt(quad_form_factor(comp.factor, x));
        double zk = (inst.b - dot(comp.mean, x)) / sdev;
        if (zk > 40.0) zk = 40.0;
        if (zk < -40.0) zk = -40.0;
        p_in += comp.weight * eval_inner(inner, zk);
        p_ex += comp.weight * std_normal_cdf(zk);
        p_out += comp.weight * eval_outer(outer, zk);
      }
      double gap_o = p_out - p_ex;
      double gap_i = p_ex - p_in;
      lmax_o = std::max(lmax_o, gap_o);
      lmax_i = std::max(lmax_i, gap_i);
      if (gap_o < -kSandwichSlack || gap_i < -kSandwichSlack || gap_o > tau + kSandwichSlack ||
          gap_i > tau + kSandwichSlack) {
        if (lviol == 0) lbad = x;
        ++lviol;
      }
    }
#pragma omp critical
    {
      max_outer = std::max(max_outer, lmax_o);
      max_inner = std::max(max_inner, lmax_i);
      violations += lviol;
      if (lviol > 0 && c < first_bad_chunk) {
        first_bad_chunk = c;
        first_bad = lbad;
      }
    }
  }

  rep.max_outer_gap = max_outer;
  rep.max_inner_gap = max_inner;
  rep.violations = violations;
  rep.first_violation_x = first_bad;
  return rep;
}

McEstimate mc_probability(const GmmInstance& inst, const Vec& x, long draws, uint64_t seed,
                          Exec exec) {
  if (draws < 100) throw std::domain_error("mc_probability: need at least 100 draws");
  if (static_cast<int>(x.size()) != inst.n)
    throw std::invalid_argument("mc_probability: x has wrong dimension");

  const int chunks = 64;
  std::vector<uint64_t> chunk_seeds(chunks);
  Rng seeder(seed);
  for (auto& s : chunk_seeds) s = seeder.next_u64();

  std::vector<double> weights;
  for (const auto& comp : inst.components) weights.push_back(comp.weight);

  long hits = 0;
#pragma omp parallel for if (exec == Exec::Parallel) schedule(static) reduction(+ : hits)
  for (int c = 0; c < chunks; ++c) {
    long count = draws / chunks + (c < draws % chunks ? 1 : 0);
    Rng rng(chunk_seeds[c]);
    Vec g(inst.n);
    long local = 0;
    for (long s = 0; s < count; ++s) {
      int k = rng.pick_weighted(weights);
      const auto& comp = inst.components[k];
      for (int i = 0; i < inst.n; ++i) g[i] = rng.normal();
      // xi' x with xi = mean + factor g, accumulated without materializing xi
      double val = 0.0;
      for (int i = 0; i < inst.n; ++i) {
        double xi = comp.mean[i];
        for (int j = 0; j <= i; ++j) xi += comp.factor(i, j) * g[j];
        val += xi * x[i];
      }
      if (inst.b - val >= 0.0) ++local;
    }
    hits += local;
  }

  McEstimate est;
  est.estimate = static_cast<double>(hits) / static_cast<double>(draws);
  est.std_error = std::sqrt(std::max(est.estimate * (1.0 - est.estimate), 0.0) /
                            static_cast<double>(draws));
  return est;
}

}  // namespace gmmcc
