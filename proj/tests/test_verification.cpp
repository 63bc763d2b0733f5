#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmmcc/verification.hpp"
#include "test_helpers.hpp"

using namespace gmmcc;
using namespace testutil;

TEST_CASE("verify at the origin and the definition boundary") {
  auto inst = section1_instance();  // b = 6.7 >= 0, box contains 0
  auto rep = verify(inst, {0.0, 0.0}, 0.0);
  CHECK(rep.theta_check == 1.0);
  CHECK(rep.region_ok);
  CHECK(rep.tau_feasible);
  CHECK(verify(inst, {0.0, 0.0}, 0.3).tau_feasible);

  // theta_check = theta - 2 tau_hat is not tau_hat-feasible.
  Rng rng(3);
  Vec x;
  double found_theta = -1.0;
  for (int t = 0; t < 20000; ++t) {
    Vec cand = random_point(inst, rng);
    double p = chance_probability(inst, cand);
    if (p > 0.3 && p < 0.95) {
      x = cand;
      found_theta = p;
      break;
    }
  }
  REQUIRE(found_theta > 0.0);
  auto tight = inst;
  double tau_hat = 0.01;
  tight.theta = found_theta + 2 * tau_hat;
  CHECK_FALSE(verify(tight, x, tau_hat).tau_feasible);
  tight.theta = found_theta + 0.5 * tau_hat;
  CHECK(verify(tight, x, tau_hat).tau_feasible);

  CHECK_THROWS_AS(verify(inst, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("verify flags region violations") {
  auto inst = section1_instance();
  auto rep = verify(inst, {20.0, 0.0}, 1.0);  // outside the box
  CHECK_FALSE(rep.region_ok);
  CHECK(rep.worst_violation == doctest::Approx(5.0));
  CHECK_FALSE(rep.tau_feasible);
}

TEST_CASE("theta_check is invariant under joint rescaling") {
  auto inst = random_instance(3, 2, 8);
  Rng rng(4);
  Vec x = random_point(inst, rng);
  double t0 = verify(inst, x, 0.0).theta_check;
  auto scaled = inst;
  const double alpha = 3.75;
  scaled.b *= alpha;
  for (auto& comp : scaled.components) {
    for (auto& m : comp.mean) m *= alpha;
    for (auto& v : comp.covariance.a) v *= alpha * alpha;
  }
  factorize_components(scaled);
  CHECK(verify(scaled, x, 0.0).theta_check == doctest::Approx(t0).epsilon(1e-12));
}

TEST_CASE("compare metrics") {
  auto inst = section1_instance();
  Vec x{1.0, 2.0};
  auto same = compare(inst, x, x);
  CHECK(same.pct_obj == 0.0);
  CHECK(same.pct_theta == 0.0);

  // (thetaI - thetaO)/theta * 100 for a 0.001 spread at theta = 0.95.
  auto inst95 = section1_instance(0.95);
  Rng rng(17);
  Vec xi, xo;
  double ti = 0.0;
  for (int t = 0; t < 50000 && xi.empty(); ++t) {
    Vec cand = random_point(inst95, rng);
    double p = chance_probability(inst95, cand);
    if (p > 0.6 && p < 0.99) {
      xi = cand;
      ti = p;
    }
  }
  REQUIRE_FALSE(xi.empty());
  for (int t = 0; t < 200000 && xo.empty(); ++t) {
    Vec cand = random_point(inst95, rng);
    double p = chance_probability(inst95, cand);
    if (std::fabs(ti - p - 0.001) < 1e-5) xo = cand;
  }
  if (!xo.empty()) {
    auto metrics = compare(inst95, xi, xo);
    CHECK(metrics.pct_theta == doctest::Approx((ti - chance_probability(inst95, xo)) / 0.95 * 100.0));
    CHECK(metrics.pct_theta == doctest::Approx(0.105).epsilon(0.02));
  }

  auto zero_obj = inst;
  zero_obj.c = {0.0, 0.0};
  CHECK_THROWS_AS(compare(zero_obj, x, x), std::domain_error);

  // Negative inner objective: formula applied verbatim, note recorded.
  auto neg = inst;
  neg.c = {-1.0, -1.0};
  auto m2 = compare(neg, Vec{1.0, 1.0}, Vec{2.0, 2.0});
  CHECK(m2.pct_obj == doctest::Approx(std::max(-2.0 - (-4.0), 0.0) / -2.0 * 100.0));
  CHECK_FALSE(m2.notes.empty());
}

TEST_CASE("desk_solve finds the corner of a box-only instance") {
  // Chance constraint inactive (huge b): minimize c'x over the box.
  GmmInstance inst;
  inst.n = 2;
  inst.c = {1.0, 1.0};
  inst.b = 1e9;
  inst.theta = 0.9;
  GaussianComponent comp;
  comp.weight = 1.0;
  comp.mean = {0.0, 0.0};
  comp.covariance = Mat::identity(2);
  inst.components = {comp};
  inst.region.box_lo = {-3.0, -2.0};
  inst.region.box_hi = {4.0, 5.0};
  factorize_components(inst);

  auto res = desk_solve(inst, 32, 2);
  REQUIRE(res.found);
  CHECK(res.x == Vec{-3.0, -2.0});
  CHECK(res.objective == -5.0);
  CHECK(res.theta_check == 1.0);

  // Non-increasing objective across 64 -> 128 -> 256.
  double o64 = desk_solve(inst, 64, 0).objective;
  double o128 = desk_solve(inst, 128, 0).objective;
  double o256 = desk_solve(inst, 256, 0).objective;
  CHECK(o128 <= o64 + 1e-12);
  CHECK(o256 <= o128 + 1e-12);
}

TEST_CASE("desk_solve serial matches parallel bitwise") {
  auto inst = section1_instance(0.9);
  inst.c = {1.0, -0.5};
  auto p = desk_solve(inst, 64, 2, Exec::Parallel);
  auto s = desk_solve(inst, 64, 2, Exec::Serial);
  REQUIRE(p.found == s.found);
  CHECK(p.x == s.x);
  CHECK(p.objective == s.objective);
}

TEST_CASE("desk_solve guards and infeasible outcome") {
  auto inst = random_instance(4, 1, 2);
  CHECK_THROWS_AS(desk_solve(inst, 64, 0), std::domain_error);

  auto tiny = section1_instance(0.9999999999);  // nothing on the grid reaches theta except x ~ 0
  tiny.region.box_lo = {5.0, 5.0};              // keep 0 outside the region
  tiny.region.box_hi = {15.0, 15.0};
  tiny.theta = 1.0 - 1e-15;
  auto res = desk_solve(tiny, 16, 0);
  CHECK_FALSE(res.found);
}

TEST_CASE("desk_solve is a lower-bound oracle for verified points") {
  auto inst = section1_instance(0.9);
  inst.c = {0.7, 0.3};
  auto res = desk_solve(inst, 128, 2);
  REQUIRE(res.found);
  CHECK(verify(inst, res.x, 0.0).tau_feasible);

  // Any feasible point scores no better than the oracle minus grid slack.
  Rng rng(6);
  double cell = 30.0 / 127.0;
  double slack = (std::fabs(inst.c[0]) + std::fabs(inst.c[1])) * cell;
  for (int t = 0; t < 3000; ++t) {
    Vec x = random_point(inst, rng);
    if (chance_probability(inst, x) < inst.theta) continue;
    CHECK(dot(inst.c, x) >= res.objective - slack);
  }
}

TEST_CASE("sandwich audit on the printed instance") {
  auto inst = section1_instance();
  double tau = 0.005;
  auto rep = sandwich_audit(inst, tau, 10000, 99);
  CHECK(rep.samples == 10000);
  CHECK(rep.violations == 0);
  CHECK(rep.max_outer_gap >= 0.0);
  CHECK(rep.max_outer_gap <= tau);
  CHECK(rep.max_inner_gap <= tau);

  // Halving tau shrinks both gaps.
  auto rep2 = sandwich_audit(inst, tau / 2, 10000, 99);
  CHECK(rep2.violations == 0);
  CHECK(rep2.max_outer_gap <= rep.max_outer_gap);
  CHECK(rep2.max_inner_gap <= rep.max_inner_gap);

  // Serial reference agrees exactly.
  auto seq = sandwich_audit(inst, tau, 10000, 99, Exec::Serial);
  CHECK(seq.max_outer_gap == rep.max_outer_gap);
  CHECK(seq.max_inner_gap == rep.max_inner_gap);
  CHECK(seq.violations == 0);
}

TEST_CASE("mc_probability behavior") {
  auto inst = section1_instance();
  inst.b = 1e12;
  factorize_components(inst);
  auto sure = mc_probability(inst, {1.0, 1.0}, 1000, 1);
  CHECK(sure.estimate == 1.0);
  CHECK(sure.std_error == 0.0);

  // K = 1 standard normal toy against the closed form.
  GmmInstance toy;
  toy.n = 2;
  toy.c = {1, 1};
  toy.b = 0.7;
  toy.theta = 0.5;
  GaussianComponent comp;
  comp.weight = 1.0;
  comp.mean = {0.0, 0.0};
  comp.covariance = Mat::identity(2);
  toy.components = {comp};
  toy.region.box_lo = {-5, -5};
  toy.region.box_hi = {5, 5};
  factorize_components(toy);
  Vec x{0.6, -0.8};  // unit norm: P = Phi(0.7)
  auto est = mc_probability(toy, x, 200000, 7);
  double exact = std_normal_cdf(0.7);
  CHECK(std::fabs(est.estimate - exact) <= 3.0 * est.std_error);

  // Determinism and the serial reference.
  auto rep1 = mc_probability(toy, x, 50000, 11);
  auto rep2 = mc_probability(toy, x, 50000, 11);
  auto rep3 = mc_probability(toy, x, 50000, 11, Exec::Serial);
  CHECK(rep1.estimate == rep2.estimate);
  CHECK(rep1.estimate == rep3.estimate);

  CHECK_THROWS_AS(mc_probability(toy, x, 50, 1), std::domain_error);
}
