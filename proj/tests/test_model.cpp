#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmmcc/instance_gen.hpp"
#include "gmmcc/model.hpp"
#include "gmmcc/special_functions.hpp"
#include "test_helpers.hpp"

using namespace gmmcc;
using namespace testutil;

namespace {

const double kE = 6.466;

PwlApprox outer_pwl(double tau = 0.005) { return build_pwl(outer_breakpoints(tau, -kE, kE)); }
PwlApprox inner_pwl(double tau = 0.005) { return build_pwl(inner_breakpoints(tau, -kE, kE)); }

int count_binaries(const MiqpModel& m) {
  int c = 0;
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary) ++c;
  return c;
}

}  // namespace

TEST_CASE("skeleton counts and coefficients") {
  auto inst = random_instance(6, 3, 2024);
  MiqpModel m = build_skeleton(inst);
  CHECK(m.variables.size() == 6 + 3 * 3);
  CHECK(m.quad_rows.size() == 2 * 3);
  CHECK(validate_model(m).empty());

  // Mixing row carries the weights exactly.
  REQUIRE(m.rows[0].name == "mix");
  CHECK(m.rows[0].sense == RowSense::Ge);
  CHECK(m.rows[0].rhs == inst.theta);
  for (int k = 0; k < 3; ++k) {
    CHECK(m.variables[m.rows[0].terms[k].var].name == "zeta_" + std::to_string(k));
    CHECK(m.rows[0].terms[k].coeff == inst.components[k].weight);
  }

  // Bilinear row: -mu'x - z_k lam_k >= -b.
  const auto& bilin = m.quad_rows[0];
  CHECK(bilin.rhs == -inst.b);
  CHECK(bilin.quad.size() == 1);
  CHECK(bilin.quad[0].coeff == -1.0);
  CHECK(m.variables[bilin.quad[0].var_i].name == "z_0");
  CHECK(m.variables[bilin.quad[0].var_j].name == "lam_0");

  // Quadratic equality: n diagonal + n(n-1)/2 off-diagonal + lam^2 terms.
  const auto& qeq = m.quad_rows[1];
  CHECK(qeq.sense == RowSense::Eq);
  CHECK(qeq.quad.size() == 6 + 15 + 1);
  double c01 = 0.0;
  for (const auto& q : qeq.quad)
    if (q.var_i == 0 && q.var_j == 1) c01 = q.coeff;
  CHECK(c01 == 2.0 * inst.components[0].covariance(0, 1));

  BuildOptions split;
  split.split_quad_eq = true;
  MiqpModel ms = build_skeleton(inst, split);
  CHECK(ms.quad_rows.size() == 3 * 3);  // bilinear + two inequality halves per k
}

TEST_CASE("outer block tallies") {
  auto inst = random_instance(4, 2, 7);
  auto pwl = outer_pwl();
  const int L = pwl.breakpoints.left_count, R = pwl.breakpoints.right_count;
  BuildOptions opt;
  MiqpModel m = build_skeleton(inst, opt);
  size_t vars0 = m.variables.size(), rows0 = m.rows.size();
  attach_outer_block(m, 0, pwl, opt.bounds);
  CHECK(m.variables.size() - vars0 == static_cast<size_t>(L + 7));
  CHECK(m.rows.size() - rows0 == static_cast<size_t>(R + 10));
  CHECK(m.sos2.size() == 1);
  CHECK(m.sos2[0].vars.size() == static_cast<size_t>(L + 1));
  CHECK(count_binaries(m) == 3);
  CHECK(validate_model(m).empty());
}

TEST_CASE("inner block tallies") {
  auto inst = random_instance(4, 2, 7);
  auto pwl = inner_pwl();
  const int L = pwl.breakpoints.left_count, R = pwl.breakpoints.right_count;
  BuildOptions opt;
  MiqpModel m = build_skeleton(inst, opt);
  size_t vars0 = m.variables.size(), rows0 = m.rows.size();
  attach_inner_block(m, 0, pwl, opt.bounds);
  CHECK(m.variables.size() - vars0 == static_cast<size_t>(2 * L + 8));
  CHECK(m.rows.size() - rows0 == static_cast<size_t>(R + 2 * L + 12));
  CHECK(count_binaries(m) == L + 4);
  CHECK(m.sos2.empty());
  CHECK(validate_model(m).empty());
}

TEST_CASE("full model binary counts") {
  auto inst = random_instance(5, 3, 99);
  double tau = (1.0 - inst.theta) / 10.0;
  MiqpModel mo = build_pwl_outer(inst, tau);
  MiqpModel mi = build_pwl_inner(inst, tau);
  const int K = 3;
  int L = inner_breakpoints(tau, -kE, kE).left_count;
  CHECK(count_binaries(mo) == 3 * K);
  CHECK(count_binaries(mi) == K * (L + 4));
  CHECK(validate_model(mo).empty());
  CHECK(validate_model(mi).empty());
  bool has_gap = false;
  for (const auto& kv : mo.metadata)
    if (kv.first == "suggested_mip_gap") has_gap = true;
  CHECK(has_gap);
}

TEST_CASE("bounds precondition") {
  auto inst = random_instance(3, 1, 5);
  auto pwl = outer_pwl();
  BuildOptions opt;
  opt.bounds.z_lo = -2.0;  // violates z_lo <= z_{-L} = -6.466
  MiqpModel m = build_skeleton(inst, opt);
  CHECK_THROWS_AS(attach_outer_block(m, 0, pwl, opt.bounds), std::invalid_argument);
  auto ipwl = inner_pwl();
  CHECK_THROWS_AS(attach_inner_block(m, 0, ipwl, opt.bounds), std::invalid_argument);
}

TEST_CASE("sos2 binarization fallback") {
  auto inst = random_instance(3, 1, 5);
  auto pwl = outer_pwl();
  const int L = pwl.breakpoints.left_count;
  BuildOptions opt;
  MiqpModel m = build_skeleton(inst, opt);
  size_t rows0 = m.rows.size();
  attach_outer_block(m, 0, pwl, opt.bounds, true);
  CHECK(m.sos2.empty());
  CHECK(count_binaries(m) == 3 + L);
  CHECK(m.rows.size() - rows0 == static_cast<size_t>((pwl.breakpoints.right_count + 10) + 1 + (L + 1)));
  CHECK(validate_model(m).empty());
}

TEST_CASE("saa model structure and defaults") {
  CHECK(default_saa_samples(0.95) == 2000);
  CHECK(default_saa_samples(0.99) == 10000);
  CHECK(default_saa_samples(0.999) == 20000);

  auto inst = random_instance(4, 2, 31);
  inst.theta = 0.95;
  Rng rng(9);
  const int S = 50;
  MiqpModel m = build_saa(inst, S, 1e6, rng);
  CHECK(count_binaries(m) == S);
  CHECK(m.variables.size() == 4u + S);
  // One scenario row per sample plus the cardinality row.
  int scen = 0;
  const LinearRow* card = nullptr;
  for (const auto& r : m.rows) {
    if (r.name.rfind("scen_", 0) == 0) {
      ++scen;
      CHECK(r.sense == RowSense::Le);
      CHECK(r.rhs == inst.b);
      CHECK(r.terms.back().coeff == -1e6);
    }
    if (r.name == "card") card = &r;
  }
  CHECK(scen == S);
  REQUIRE(card != nullptr);
  CHECK(card->rhs == doctest::Approx((1.0 - 0.95) * S));
  CHECK(card->terms.size() == static_cast<size_t>(S));
  CHECK(validate_model(m).empty());
}

TEST_CASE("outer witness cases") {
  auto pwl = outer_pwl();
  ModelBounds mb;
  MiqpModel block = build_outer_block_model(pwl, mb);
  CHECK(validate_model(block).empty());

  // z = 0.5, zeta = 0.5: t3 branch, all tangent rows hold.
  auto w = witness_outer(0.5, 0.5, pwl, mb);
  REQUIRE(w.feasible);
  double t3 = -1, y3 = -1;
  for (const auto& kv : w.assignment) {
    if (kv.first == "t_0_3") t3 = kv.second;
    if (kv.first == "y_0_3") y3 = kv.second;
  }
  CHECK(t3 == 1.0);
  CHECK(y3 == 0.5);
  CHECK(max_violation(block, w.assignment) <= 1e-9);

  // Interior negative z: exactly two adjacent nonzero alphas interpolating z.
  double z = -1.7;
  auto w2 = witness_outer(z, eval_outer(pwl, z) - 1e-6, pwl, mb);
  REQUIRE(w2.feasible);
  double alpha_sum = 0.0, y2 = 0.0;
  int nonzero = 0;
  for (const auto& kv : w2.assignment) {
    if (kv.first.rfind("alpha_0_", 0) == 0 && kv.second != 0.0) {
      ++nonzero;
      alpha_sum += kv.second;
    }
    if (kv.first == "y_0_2") y2 = kv.second;
  }
  CHECK(nonzero == 2);
  CHECK(alpha_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(y2 == z);
  CHECK(max_violation(block, w2.assignment) <= 1e-9);

  // Below z_{-L} with zeta above the floor: infeasible.
  double floor = std_normal_cdf(pwl.breakpoints.points.front());
  CHECK_FALSE(witness_outer(-8.0, floor + 1e-6, pwl, mb).feasible);
  CHECK(witness_outer(-8.0, floor, pwl, mb).feasible);
  CHECK(max_violation(block, witness_outer(-8.0, floor, pwl, mb).assignment) <= 1e-9);

  CHECK_THROWS_AS(witness_outer(1e9, 0.5, pwl, mb), std::domain_error);
}

TEST_CASE("inner witness cases") {
  auto pwl = inner_pwl();
  ModelBounds mb;
  MiqpModel block = build_inner_block_model(pwl, mb);
  CHECK(validate_model(block).empty());
  double cap = pwl.right_cap;

  // z >= z_R with zeta <= Phi(z_R): t4 branch.
  auto w = witness_inner(8.0, cap - 1e-12, pwl, mb);
  REQUIRE(w.feasible);
  double t4 = -1;
  for (const auto& kv : w.assignment)
    if (kv.first == "t_0_4") t4 = kv.second;
  CHECK(t4 == 1.0);
  CHECK(max_violation(block, w.assignment) <= 1e-9);
  CHECK_FALSE(witness_inner(8.0, cap + 1e-9, pwl, mb).feasible);

  // zeta above the cap is infeasible for any z >= 0.
  CHECK_FALSE(witness_inner(1.0, cap + 1e-6, pwl, mb).feasible);

  // Interior negative z: one alpha set with frakz carrying z.
  double z = -0.8;
  auto w2 = witness_inner(z, eval_inner(pwl, z) - 1e-6, pwl, mb);
  REQUIRE(w2.feasible);
  int ones = 0;
  double fz = 0.0;
  for (const auto& kv : w2.assignment) {
    if (kv.first.rfind("alpha_0_", 0) == 0 && kv.second != 0.0) ++ones;
    if (kv.first.rfind("frakz_0_", 0) == 0 && kv.second != 0.0) fz = kv.second;
  }
  CHECK(ones == 1);
  CHECK(fz == z);
  CHECK(max_violation(block, w2.assignment) <= 1e-9);
  CHECK(validate_model(block).empty());
}

TEST_CASE("witness feasibility matches the evaluator threshold") {
  ModelBounds mb;
  auto opwl = outer_pwl(0.01);
  auto ipwl = inner_pwl(0.01);
  MiqpModel oblock = build_outer_block_model(opwl, mb);
  MiqpModel iblock = build_inner_block_model(ipwl, mb);
  Rng rng(4242);
  int feasible_outer = 0, feasible_inner = 0;
  for (int t = 0; t < 2000; ++t) {
    double z = rng.uniform(-10.0, 10.0);
    double zeta = rng.uniform(0.0, 1.05);

    auto wo = witness_outer(z, zeta, opwl, mb);
    CHECK(wo.feasible == (eval_outer(opwl, z) >= zeta));
    if (wo.feasible) {
      ++feasible_outer;
      CHECK(max_violation(oblock, wo.assignment) <= 1e-9);
    }

    auto wi = witness_inner(z, zeta, ipwl, mb);
    CHECK(wi.feasible == (eval_inner(ipwl, z) >= zeta));
    if (wi.feasible) {
      ++feasible_inner;
      CHECK(max_violation(iblock, wi.assignment) <= 1e-9);
    }
  }
  // Both branches genuinely exercised.
  CHECK(feasible_outer > 200);
  CHECK(feasible_inner > 200);
  CHECK(feasible_outer >= feasible_inner);
}

TEST_CASE("scalar containment: inner implies exact implies outer") {
  auto inst = section1_instance();
  double tau = 0.005;
  auto opwl = outer_pwl(tau);
  auto ipwl = inner_pwl(tau);
  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    Vec x = random_point(inst, rng);
    double inner = 0.0, exact = 0.0, outer = 0.0;
    bool zero = true;
    for (double v : x)
      if (v != 0.0) zero = false;
    if (zero) continue;
    for (const auto& comp : inst.components) {
      double s = std::sqrt(quad_form_factor(comp.factor, x));
      double zk = (inst.b - dot(comp.mean, x)) / s;
      inner += comp.weight * eval_inner(ipwl, zk);
      exact += comp.weight * std_normal_cdf(zk);
      outer += comp.weight * eval_outer(opwl, zk);
    }
    if (inner >= inst.theta) CHECK(exact >= inst.theta - 1e-12);
    if (exact >= inst.theta) CHECK(outer >= inst.theta - 1e-12);
  }
}

TEST_CASE("paper-scale outer model builds quickly") {
  GenConfig cfg;
  cfg.n = 100;
  cfg.K = 5;
  cfg.theta = 0.999;
  cfg.seed = 3;
  auto inst = generate_instance(cfg);
  MiqpModel m = build_pwl_outer(inst, (1.0 - 0.999) / 10.0);
  CHECK(validate_model(m).empty());
  CHECK(m.variables.size() > 100);
}
