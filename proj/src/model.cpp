#include "gmmcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "gmmcc/json_io.hpp"
#include "gmmcc/special_functions.hpp"

namespace gmmcc {

namespace {

std::string idx2(const std::string& stem, int a, int b) {
  return stem + "_" + std::to_string(a) + "_" + std::to_string(b);
}

std::string idx1(const std::string& stem, int a) { return stem + "_" + std::to_string(a); }

void check_bounds(const PwlApprox& pwl, const ModelBounds& bounds) {
  double zL = pwl.breakpoints.points.front();
  double zR = pwl.breakpoints.points.back();
  if (!(bounds.z_lo <= zL && zL < zR && zR <= bounds.z_hi))
    throw std::invalid_argument("model bounds must satisfy z_lo <= z_{-L} < z_R <= z_hi");
}

}  // namespace

int MiqpModel::add_var(const std::string& name, VarKind kind, double lower, double upper) {
  variables.push_back({name, kind, lower, upper});
  return static_cast<int>(variables.size()) - 1;
}

int MiqpModel::find_var(const std::string& name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

void MiqpModel::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

MiqpModel build_skeleton(const GmmInstance& inst, const BuildOptions& opt) {
  auto issues = validate_instance(inst);
  if (!issues.empty())
    throw std::invalid_argument("build_skeleton: invalid instance: " + issues.front());

  const int n = inst.n;
  const int K = static_cast<int>(inst.components.size());
  MiqpModel m;

  for (int i = 0; i < n; ++i)
    m.add_var(idx1("x", i), VarKind::Continuous, inst.region.box_lo[i], inst.region.box_hi[i]);
  for (int k = 0; k < K; ++k)
    m.add_var(idx1("z", k), VarKind::Continuous, opt.bounds.z_lo, opt.bounds.z_hi);
  for (int k = 0; k < K; ++k) m.add_var(idx1("zeta", k), VarKind::Continuous, 0.0, 1.0);
  for (int k = 0; k < K; ++k) m.add_var(idx1("lam", k), VarKind::Continuous, 0.0, kInf);

  m.objective.reserve(n);
  for (int i = 0; i < n; ++i) m.objective.push_back({i, inst.c[i]});

  // Mixing row sum_k w_k zeta_k >= theta.
  LinearRow mix{"mix", {}, RowSense::Ge, inst.theta};
  for (int k = 0; k < K; ++k) mix.terms.push_back({n + K + k, inst.components[k].weight});
  m.rows.push_back(std::move(mix));

  for (int r = 0; r < inst.region.A.rows; ++r) {
    LinearRow row{idx1("reg", r), {}, RowSense::Ge, inst.region.d[r]};
    for (int i = 0; i < n; ++i)
      if (inst.region.A(r, i) != 0.0) row.terms.push_back({i, inst.region.A(r, i)});
    m.rows.push_back(std::move(row));
  }
  for (int r = 0; r < inst.region.H.rows; ++r) {
    LinearRow row{idx1("regeq", r), {}, RowSense::Eq, inst.region.h[r]};
    for (int i = 0; i < n; ++i)
      if (inst.region.H(r, i) != 0.0) row.terms.push_back({i, inst.region.H(r, i)});
    m.rows.push_back(std::move(row));
  }

  for (int k = 0; k < K; ++k) {
    const auto& comp = inst.components[k];
    // b - x'mu_k >= z_k lam_k, written as -mu'x - z_k lam_k >= -b.
    QuadRow bilin{idx1("bilin", k), {}, {}, RowSense::Ge, -inst.b};
    for (int i = 0; i < n; ++i)
      if (comp.mean[i] != 0.0) bilin.linear.push_back({i, -comp.mean[i]});
    bilin.quad.push_back({n + k, n + 2 * K + k, -1.0});
    m.quad_rows.push_back(std::move(bilin));

    // x'Sigma_k x = lam_k^2.
    QuadRow qeq{idx1("qeq", k), {}, {}, RowSense::Eq, 0.0};
    qeq.quad.reserve(static_cast<size_t>(n) * (n + 1) / 2 + 1);
    for (int i = 0; i < n; ++i) {
      if (comp.covariance(i, i) != 0.0) qeq.quad.push_back({i, i, comp.covariance(i, i)});
      for (int j = i + 1; j < n; ++j) {
        double v = comp.covariance(i, j);
        if (v != 0.0) qeq.quad.push_back({i, j, 2.0 * v});
      }
    }
    qeq.quad.push_back({n + 2 * K + k, n + 2 * K + k, -1.0});
    if (opt.split_quad_eq) {
      QuadRow le = qeq;
      le.name = idx1("qeq_ub", k);
      le.sense = RowSense::Le;
      QuadRow ge = std::move(qeq);
      ge.name = idx1("qeq_lb", k);
      ge.sense = RowSense::Ge;
      m.quad_rows.push_back(std::move(le));
      m.quad_rows.push_back(std::move(ge));
    } else {
      m.quad_rows.push_back(std::move(qeq));
    }
  }

  m.set_meta("n", std::to_string(n));
  m.set_meta("K", std::to_string(K));
  m.set_meta("theta", format_double17(inst.theta));
  return m;
}

void attach_outer_block(MiqpModel& m, int k, const PwlApprox& pwl, const ModelBounds& bounds,
                        bool sos2_as_binary) {
  if (pwl.kind != Side::Outer) throw std::logic_error("attach_outer_block: PWL kind mismatch");
  check_bounds(pwl, bounds);
  const auto& bp = pwl.breakpoints;
  const int L = bp.left_count, R = bp.right_count;
  const int zv = m.find_var(idx1("z", k));
  const int zetav = m.find_var(idx1("zeta", k));
  if (zv < 0 || zetav < 0) throw std::logic_error("attach_outer_block: skeleton variables missing");
  const double phi_zL = pwl.left_floor;

  std::vector<int> alpha(L + 1);
  for (int i = 0; i <= L; ++i) alpha[i] = m.add_var(idx2("alpha", k, i), VarKind::Continuous, 0.0, 1.0);
  int t1 = m.add_var(idx2("t", k, 1), VarKind::Binary, 0.0, 1.0);
  int t2 = m.add_var(idx2("t", k, 2), VarKind::Binary, 0.0, 1.0);
  int t3 = m.add_var(idx2("t", k, 3), VarKind::Binary, 0.0, 1.0);
  int y1 = m.add_var(idx2("y", k, 1), VarKind::Continuous, -kInf, kInf);
  int y2 = m.add_var(idx2("y", k, 2), VarKind::Continuous, -kInf, kInf);
  int y3 = m.add_var(idx2("y", k, 3), VarKind::Continuous, -kInf, kInf);

  // Tangent rows: Phi(z_{-L}) t1 + t2 + g_i y3 + g_i^0 t3 >= zeta, i in [R]_0.
  for (int i = 0; i <= R; ++i) {
    LinearRow row{idx2("tan", k, i), {}, RowSense::Ge, 0.0};
    row.terms.push_back({t1, phi_zL});
    row.terms.push_back({t2, 1.0});
    row.terms.push_back({y3, pwl.right_slope[i]});
    row.terms.push_back({t3, pwl.right_icept[i]});
    row.terms.push_back({zetav, -1.0});
    m.rows.push_back(std::move(row));
  }

  // Secant aggregation: Phi(z_{-L}) t1 + sum_i alpha_i Phi(z_{-i}) + t3 >= zeta.
  {
    LinearRow row{idx1("secagg", k), {}, RowSense::Ge, 0.0};
    row.terms.push_back({t1, phi_zL});
    for (int i = 0; i <= L; ++i) row.terms.push_back({alpha[i], std_normal_cdf(bp.at_neg(i))});
    row.terms.push_back({t3, 1.0});
    row.terms.push_back({zetav, -1.0});
    m.rows.push_back(std::move(row));
  }

  m.rows.push_back({idx1("tsum", k), {{t1, 1.0}, {t2, 1.0}, {t3, 1.0}}, RowSense::Eq, 1.0});
  m.rows.push_back(
      {idx1("zsum", k), {{y1, 1.0}, {y2, 1.0}, {y3, 1.0}, {zv, -1.0}}, RowSense::Eq, 0.0});
  m.rows.push_back({idx1("y1lo", k), {{y1, 1.0}, {t1, -bounds.z_lo}}, RowSense::Ge, 0.0});
  m.rows.push_back({idx1("y1hi", k), {{y1, 1.0}, {t1, -bp.at_neg(L)}}, RowSense::Le, 0.0});
  m.rows.push_back({idx1("y3lo", k), {{y3, 1.0}}, RowSense::Ge, 0.0});
  m.rows.push_back({idx1("y3hi", k), {{y3, 1.0}, {t3, -bounds.z_hi}}, RowSense::Le, 0.0});

  {
    LinearRow row{idx1("y2def", k), {{y2, 1.0}}, RowSense::Eq, 0.0};
    for (int i = 0; i <= L; ++i)
      if (bp.at_neg(i) != 0.0) row.terms.push_back({alpha[i], -bp.at_neg(i)});
    m.rows.push_back(std::move(row));
  }
  {
    LinearRow row{idx1("t2def", k), {{t2, 1.0}}, RowSense::Eq, 0.0};
    for (int i = 0; i <= L; ++i) row.terms.push_back({alpha[i], -1.0});
    m.rows.push_back(std::move(row));
  }

  if (!sos2_as_binary) {
    m.sos2.push_back({idx1("sos", k), alpha});
  } else {
    // Adjacency binarization: segment indicators delta_1..delta_L.
    std::vector<int> delta(L);
    for (int j = 1; j <= L; ++j)
      delta[j - 1] = m.add_var(idx2("sosbin", k, j), VarKind::Binary, 0.0, 1.0);
    LinearRow sum{idx1("sossum", k), {}, RowSense::Le, 1.0};
    for (int j = 0; j < L; ++j) sum.terms.push_back({delta[j], 1.0});
    m.rows.push_back(std::move(sum));
    for (int i = 0; i <= L; ++i) {
      LinearRow adj{idx2("sosadj", k, i), {{alpha[i], 1.0}}, RowSense::Le, 0.0};
      if (i >= 1) adj.terms.push_back({delta[i - 1], -1.0});
      if (i <= L - 1) adj.terms.push_back({delta[i], -1.0});
      m.rows.push_back(std::move(adj));
    }
  }
}

void attach_inner_block(MiqpModel& m, int k, const PwlApprox& pwl, const ModelBounds& bounds) {
  if (pwl.kind != Side::Inner) throw std::logic_error("attach_inner_block: PWL kind mismatch");
  check_bounds(pwl, bounds);
  const auto& bp = pwl.breakpoints;
  const int L = bp.left_count, R = bp.right_count;
  const int zv = m.find_var(idx1("z", k));
  const int zetav = m.find_var(idx1("zeta", k));
  if (zv < 0 || zetav < 0) throw std::logic_error("attach_inner_block: skeleton variables missing");
  const double phi_zR = pwl.right_cap;
  const double hL = pwl.left_slope[L], hL0 = pwl.left_icept[L];

  std::vector<int> alpha(L);
  for (int i = 0; i < L; ++i) alpha[i] = m.add_var(idx2("alpha", k, i), VarKind::Binary, 0.0, 1.0);
  int t1 = m.add_var(idx2("t", k, 1), VarKind::Binary, 0.0, 1.0);
  int t2 = m.add_var(idx2("t", k, 2), VarKind::Binary, 0.0, 1.0);
  int t3 = m.add_var(idx2("t", k, 3), VarKind::Binary, 0.0, 1.0);
  int t4 = m.add_var(idx2("t", k, 4), VarKind::Binary, 0.0, 1.0);
  int y1 = m.add_var(idx2("y", k, 1), VarKind::Continuous, -kInf, kInf);
  int y2 = m.add_var(idx2("y", k, 2), VarKind::Continuous, -kInf, kInf);
  int y3 = m.add_var(idx2("y", k, 3), VarKind::Continuous, -kInf, kInf);
  int y4 = m.add_var(idx2("y", k, 4), VarKind::Continuous, -kInf, kInf);
  std::vector<int> frakz(L);
  for (int i = 0; i < L; ++i) frakz[i] = m.add_var(idx2("frakz", k, i), VarKind::Continuous, -kInf, kInf);

  // Secant rows: t1 + t2 + g_i y3 + g_i^0 t3 + Phi(z_R) t4 >= zeta, i in [R].
  for (int i = 1; i <= R; ++i) {
    LinearRow row{idx2("sec", k, i), {}, RowSense::Ge, 0.0};
    row.terms.push_back({t1, 1.0});
    row.terms.push_back({t2, 1.0});
    row.terms.push_back({y3, pwl.right_slope[i - 1]});
    row.terms.push_back({t3, pwl.right_icept[i - 1]});
    row.terms.push_back({t4, phi_zR});
    row.terms.push_back({zetav, -1.0});
    m.rows.push_back(std::move(row));
  }

  // Tangent aggregation:
  // h_L y1 + h_L^0 t1 + sum_{i<L} (h_i frakz_i + h_i^0 alpha_i) + t3 + Phi(z_R) t4 >= zeta.
  {
    LinearRow row{idx1("tanagg", k), {}, RowSense::Ge, 0.0};
    row.terms.push_back({y1, hL});
    row.terms.push_back({t1, hL0});
    for (int i = 0; i < L; ++i) {
      row.terms.push_back({frakz[i], pwl.left_slope[i]});
      row.terms.push_back({alpha[i], pwl.left_icept[i]});
    }
    row.terms.push_back({t3, 1.0});
    row.terms.push_back({t4, phi_zR});
    row.terms.push_back({zetav, -1.0});
    m.rows.push_back(std::move(row));
  }

  m.rows.push_back({idx1("tanL", k), {{y1, hL}, {t1, hL0}}, RowSense::Ge, 0.0});
  m.rows.push_back(
      {idx1("tsum", k), {{t1, 1.0}, {t2, 1.0}, {t3, 1.0}, {t4, 1.0}}, RowSense::Eq, 1.0});
  m.rows.push_back(
      {idx1("zsum", k), {{y1, 1.0}, {y2, 1.0}, {y3, 1.0}, {y4, 1.0}, {zv, -1.0}}, RowSense::Eq, 0.0});
  m.rows.push_back({idx1("y1lo", k), {{y1, 1.0}, {t1, -bounds.z_lo}}, RowSense::Ge, 0.0});
  m.rows.push_back({idx1("y1hi", k), {{y1, 1.0}, {t1, -bp.at_neg(L)}}, RowSense::Le, 0.0});

  {
    LinearRow row{idx1("t2def", k), {{t2, 1.0}}, RowSense::Eq, 0.0};
    for (int i = 0; i < L; ++i) row.terms.push_back({alpha[i], -1.0});
    m.rows.push_back(std::move(row));
  }
  for (int i = 0; i < L; ++i) {
    m.rows.push_back(
        {idx2("fzlo", k, i), {{frakz[i], 1.0}, {alpha[i], -bp.at_neg(i + 1)}}, RowSense::Ge, 0.0});
    m.rows.push_back({idx2("fzhi", k, i), {{frakz[i], 1.0}}, RowSense::Le, 0.0});
  }
  {
    LinearRow row{idx1("y2def", k), {{y2, 1.0}}, RowSense::Eq, 0.0};
    for (int i = 0; i < L; ++i) row.terms.push_back({frakz[i], -1.0});
    m.rows.push_back(std::move(row));
  }
  m.rows.push_back({idx1("y3lo", k), {{y3, 1.0}}, RowSense::Ge, 0.0});
  m.rows.push_back({idx1("y3hi", k), {{y3, 1.0}, {t3, -bp.at_pos(R)}}, RowSense::Le, 0.0});
  m.rows.push_back({idx1("y4lo", k), {{y4, 1.0}, {t4, -bp.at_pos(R)}}, RowSense::Ge, 0.0});
  m.rows.push_back({idx1("y4hi", k), {{y4, 1.0}, {t4, -bounds.z_hi}}, RowSense::Le, 0.0});
}

MiqpModel build_pwl_outer(const GmmInstance& inst, double tau, const BuildOptions& opt) {
  BreakpointArray bp = outer_breakpoints(tau, -opt.endpoint, opt.endpoint);
  PwlApprox pwl = build_pwl(bp);
  MiqpModel m = build_skeleton(inst, opt);
  const int K = static_cast<int>(inst.components.size());
  for (int k = 0; k < K; ++k) attach_outer_block(m, k, pwl, opt.bounds, opt.sos2_as_binary);
  m.set_meta("model_kind", "pwl-o");
  m.set_meta("tau", format_double17(tau));
  m.set_meta("suggested_mip_gap", format_double17((1.0 - inst.theta) / 10.0));
  m.set_meta("L", std::to_string(bp.left_count));
  m.set_meta("R", std::to_string(bp.right_count));
  return m;
}

MiqpModel build_pwl_inner(const GmmInstance& inst, double tau, const BuildOptions& opt) {
  BreakpointArray bp = inner_breakpoints(tau, -opt.endpoint, opt.endpoint);
  PwlApprox pwl = build_pwl(bp);
  MiqpModel m = build_skeleton(inst, opt);
  const int K = static_cast<int>(inst.components.size());
  for (int k = 0; k < K; ++k) attach_inner_block(m, k, pwl, opt.bounds);
  m.set_meta("model_kind", "pwl-i");
  m.set_meta("tau", format_double17(tau));
  m.set_meta("suggested_mip_gap", format_double17((1.0 - inst.theta) / 10.0));
  m.set_meta("L", std::to_string(bp.left_count));
  m.set_meta("R", std::to_string(bp.right_count));
  return m;
}

int default_saa_samples(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("default_saa_samples: theta outside (0,1)");
  double factor = theta >= 0.999 - 1e-12 ? 20.0 : 100.0;
  return static_cast<int>(std::lround(factor / (1.0 - theta)));
}

MiqpModel build_saa(const GmmInstance& inst, int sample_count, double big_m, Rng& rng) {
  if (sample_count < 1) throw std::invalid_argument("build_saa: sample_count must be >= 1");
  auto issues = validate_instance(inst);
  if (!issues.empty()) throw std::invalid_argument("build_saa: invalid instance: " + issues.front());

  const int n = inst.n;
  MiqpModel m;
  for (int i = 0; i < n; ++i)
    m.add_var(idx1("x", i), VarKind::Continuous, inst.region.box_lo[i], inst.region.box_hi[i]);
  for (int s = 0; s < sample_count; ++s) m.add_var(idx1("saa_y", s), VarKind::Binary, 0.0, 1.0);

  m.objective.reserve(n);
  for (int i = 0; i < n; ++i) m.objective.push_back({i, inst.c[i]});

  Mat draws = sample(inst, sample_count, rng);
  for (int s = 0; s < sample_count; ++s) {
    LinearRow row{idx1("scen", s), {}, RowSense::Le, inst.b};
    row.terms.reserve(n + 1);
    for (int i = 0; i < n; ++i) row.terms.push_back({i, draws(s, i)});
    row.terms.push_back({n + s, -big_m});
    m.rows.push_back(std::move(row));
  }
  {
    LinearRow card{"card", {}, RowSense::Le, (1.0 - inst.theta) * sample_count};
    for (int s = 0; s < sample_count; ++s) card.terms.push_back({n + s, 1.0});
    m.rows.push_back(std::move(card));
  }
  for (int r = 0; r < inst.region.A.rows; ++r) {
    LinearRow row{idx1("reg", r), {}, RowSense::Ge, inst.region.d[r]};
    for (int i = 0; i < n; ++i)
      if (inst.region.A(r, i) != 0.0) row.terms.push_back({i, inst.region.A(r, i)});
    m.rows.push_back(std::move(row));
  }
  for (int r = 0; r < inst.region.H.rows; ++r) {
    LinearRow row{idx1("regeq", r), {}, RowSense::Eq, inst.region.h[r]};
    for (int i = 0; i < n; ++i)
      if (inst.region.H(r, i) != 0.0) row.terms.push_back({i, inst.region.H(r, i)});
    m.rows.push_back(std::move(row));
  }

  m.set_meta("n", std::to_string(n));
  m.set_meta("K", std::to_string(static_cast<int>(inst.components.size())));
  m.set_meta("theta", format_double17(inst.theta));
  m.set_meta("model_kind", "saa");
  m.set_meta("S", std::to_string(sample_count));
  m.set_meta("big_m", format_double17(big_m));
  m.set_meta("suggested_mip_gap", format_double17((1.0 - inst.theta) / 10.0));
  return m;
}

std::vector<std::string> validate_model(const MiqpModel& m) {
  std::vector<std::string> issues;
  const int nv = static_cast<int>(m.variables.size());
  auto check_ref = [&](int v, const std::string& where) {
    if (v < 0 || v >= nv) issues.push_back(where + ": reference to undeclared variable");
  };
  for (const auto& row : m.rows)
    for (const auto& t : row.terms) check_ref(t.var, "row " + row.name);
  for (const auto& row : m.quad_rows) {
    for (const auto& t : row.linear) check_ref(t.var, "quad row " + row.name);
    for (const auto& q : row.quad) {
      check_ref(q.var_i, "quad row " + row.name);
      check_ref(q.var_j, "quad row " + row.name);
    }
  }
  for (const auto& t : m.objective) check_ref(t.var, "objective");
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary && (v.lower != 0.0 || v.upper != 1.0))
      issues.push_back("binary variable " + v.name + " must have bounds [0,1]");
  for (const auto& g : m.sos2) {
    std::vector<int> seen = g.vars;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      issues.push_back("SOS2 group " + g.name + " has duplicate members");
    for (int v : g.vars) {
      check_ref(v, "SOS2 group " + g.name);
      if (v >= 0 && v < nv) {
        if (m.variables[v].kind != VarKind::Continuous)
          issues.push_back("SOS2 group " + g.name + " must reference continuous variables");
        if (m.variables[v].lower < 0.0)
          issues.push_back("SOS2 group " + g.name + " must reference nonnegative variables");
      }
    }
  }
  return issues;
}

MiqpModel build_outer_block_model(const PwlApprox& pwl, const ModelBounds& bounds) {
  MiqpModel m;
  m.add_var("z_0", VarKind::Continuous, bounds.z_lo, bounds.z_hi);
  m.add_var("zeta_0", VarKind::Continuous, -kInf, kInf);
  attach_outer_block(m, 0, pwl, bounds);
  return m;
}

MiqpModel build_inner_block_model(const PwlApprox& pwl, const ModelBounds& bounds) {
  MiqpModel m;
  m.add_var("z_0", VarKind::Continuous, bounds.z_lo, bounds.z_hi);
  m.add_var("zeta_0", VarKind::Continuous, -kInf, kInf);
  attach_inner_block(m, 0, pwl, bounds);
  return m;
}

namespace {

struct Assignment {
  std::vector<std::pair<std::string, double>> kv;
  void set(const std::string& name, double v) { kv.emplace_back(name, v); }
};

// Zeroed variables for one outer/inner block (k = 0).
Assignment zero_block(const PwlApprox& pwl, double z, double zeta) {
  const int L = pwl.breakpoints.left_count;
  Assignment a;
  a.set("z_0", z);
  a.set("zeta_0", zeta);
  const bool outer = pwl.kind == Side::Outer;
  const int alphas = outer ? L + 1 : L;
  for (int i = 0; i < alphas; ++i) a.set(idx2("alpha", 0, i), 0.0);
  const int ts = outer ? 3 : 4;
  for (int j = 1; j <= ts; ++j) a.set(idx2("t", 0, j), 0.0);
  for (int j = 1; j <= ts; ++j) a.set(idx2("y", 0, j), 0.0);
  if (!outer)
    for (int i = 0; i < L; ++i) a.set(idx2("frakz", 0, i), 0.0);
  return a;
}

void assign(Assignment& a, const std::string& name, double v) {
  for (auto& kv : a.kv)
    if (kv.first == name) {
      kv.second = v;
      return;
    }
  a.kv.emplace_back(name, v);
}

}  // namespace

WitnessResult witness_outer(double z, double zeta, const PwlApprox& pwl, const ModelBounds& bounds) {
  if (pwl.kind != Side::Outer) throw std::logic_error("witness_outer: PWL kind mismatch");
  if (!(z >= bounds.z_lo && z <= bounds.z_hi))
    throw std::domain_error("witness_outer: z outside [z_lo, z_hi]");
  const auto& bp = pwl.breakpoints;
  const int L = bp.left_count;

  WitnessResult res;
  if (!(eval_outer(pwl, z) >= zeta)) return res;
  res.feasible = true;
  Assignment a = zero_block(pwl, z, zeta);

  if (z >= 0.0) {
    assign(a, idx2("t", 0, 3), 1.0);
    assign(a, idx2("y", 0, 3), z);
  } else if (z >= bp.at_neg(L)) {
    // Bracketing interval [z_{-i}, z_{-i+1}]; adjacent interpolation weights.
    int i = 1;
    while (i < L && z < bp.at_neg(i)) ++i;
    double lo = bp.at_neg(i), hi = bp.at_neg(i - 1);
    double w_lo = (hi - z) / (hi - lo);
    assign(a, idx2("t", 0, 2), 1.0);
    assign(a, idx2("y", 0, 2), z);
    assign(a, idx2("alpha", 0, i), w_lo);
    assign(a, idx2("alpha", 0, i - 1), 1.0 - w_lo);
  } else {
    assign(a, idx2("t", 0, 1), 1.0);
    assign(a, idx2("y", 0, 1), z);
  }
  res.assignment = std::move(a.kv);
  return res;
}

WitnessResult witness_inner(double z, double zeta, const PwlApprox& pwl, const ModelBounds& bounds) {
  if (pwl.kind != Side::Inner) throw std::logic_error("witness_inner: PWL kind mismatch");
  if (!(z >= bounds.z_lo && z <= bounds.z_hi))
    throw std::domain_error("witness_inner: z outside [z_lo, z_hi]");
  const auto& bp = pwl.breakpoints;
  const int L = bp.left_count, R = bp.right_count;

  WitnessResult res;
  Assignment a = zero_block(pwl, z, zeta);

  if (z >= bp.at_pos(R)) {
    if (!(pwl.right_cap >= zeta)) return res;
    assign(a, idx2("t", 0, 4), 1.0);
    assign(a, idx2("y", 0, 4), z);
  } else if (z >= 0.0) {
    if (!(eval_inner(pwl, z) >= zeta)) return res;
    assign(a, idx2("t", 0, 3), 1.0);
    assign(a, idx2("y", 0, 3), z);
  } else if (z >= bp.at_neg(L)) {
    // Pick the best tangent whose interval admits z; the tangent at z_{-L}
    // itself is reachable only through the t1 branch.
    int best = -1;
    double best_val = 0.0;
    for (int i = 0; i < L; ++i) {
      if (z < bp.at_neg(i + 1)) continue;
      double v = pwl.left_slope[i] * z + pwl.left_icept[i];
      if (best < 0 || v > best_val) {
        best = i;
        best_val = v;
      }
    }
    if (best < 0 || !(best_val >= zeta)) return res;
    assign(a, idx2("t", 0, 2), 1.0);
    assign(a, idx2("alpha", 0, best), 1.0);
    assign(a, idx2("frakz", 0, best), z);
    assign(a, idx2("y", 0, 2), z);
  } else {
    double v = pwl.left_slope[L] * z + pwl.left_icept[L];
    if (!(v >= 0.0) || !(v >= zeta)) return res;
    assign(a, idx2("t", 0, 1), 1.0);
    assign(a, idx2("y", 0, 1), z);
  }
  res.feasible = true;
  res.assignment = std::move(a.kv);
  return res;
}

double max_violation(const MiqpModel& m,
                     const std::vector<std::pair<std::string, double>>& assignment) {
  std::unordered_map<std::string, double> values;
  for (const auto& kv : assignment) values[kv.first] = kv.second;
  auto value_of = [&](int v) {
    auto it = values.find(m.variables[v].name);
    return it == values.end() ? 0.0 : it->second;
  };
  double worst = 0.0;
  auto sense_violation = [&](double lhs, RowSense sense, double rhs) {
    switch (sense) {
      case RowSense::Ge: return rhs - lhs;
      case RowSense::Le: return lhs - rhs;
      default: return std::fabs(lhs - rhs);
    }
  };
  for (const auto& row : m.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coeff * value_of(t.var);
    worst = std::max(worst, sense_violation(lhs, row.sense, row.rhs));
  }
  for (const auto& row : m.quad_rows) {
    double lhs = 0.0;
    for (const auto& t : row.linear) lhs += t.coeff * value_of(t.var);
    for (const auto& q : row.quad) lhs += q.coeff * value_of(q.var_i) * value_of(q.var_j);
    worst = std::max(worst, sense_violation(lhs, row.sense, row.rhs));
  }
  for (size_t v = 0; v < m.variables.size(); ++v) {
    double x = value_of(static_cast<int>(v));
    const auto& var = m.variables[v];
    if (var.lower > -kInf) worst = std::max(worst, var.lower - x);
    if (var.upper < kInf) worst = std::max(worst, x - var.upper);
  }
  return worst;
}

}  // namespace gmmcc
