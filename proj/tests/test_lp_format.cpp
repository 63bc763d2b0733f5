#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmmcc/instance_gen.hpp"
#include "gmmcc/lp_format.hpp"
#include "gmmcc/model.hpp"
#include "test_helpers.hpp"

#include <json.hpp>

using namespace gmmcc;
using namespace testutil;

namespace {

MiqpModel tiny_model() {
  MiqpModel m;
  int x0 = m.add_var("x_0", VarKind::Continuous, -15.0, 15.0);
  int x1 = m.add_var("x_1", VarKind::Continuous, -15.0, 15.0);
  int y = m.add_var("t_0_1", VarKind::Binary, 0.0, 1.0);
  int a0 = m.add_var("alpha_0_0", VarKind::Continuous, 0.0, 1.0);
  int a1 = m.add_var("alpha_0_1", VarKind::Continuous, 0.0, 1.0);
  int lam = m.add_var("lam_0", VarKind::Continuous, 0.0, kInf);
  int z = m.add_var("z_0", VarKind::Continuous, -kInf, kInf);
  m.objective = {{x0, 1.0}, {x1, -0.5}};
  m.rows.push_back({"r0", {{x0, 2.0}, {x1, -3.0}, {y, 1.0}}, RowSense::Ge, -6.7});
  m.rows.push_back({"r1", {{a0, 1.0}, {a1, 1.0}}, RowSense::Eq, 1.0});
  QuadRow q{"q0", {{x0, -0.875}}, {{x0, x0, 1.25}, {x0, x1, -0.5}, {lam, lam, -1.0}}, RowSense::Le, 0.25};
  m.quad_rows.push_back(q);
  m.sos2.push_back({"sos_0", {a0, a1}});
  m.set_meta("model_kind", "unit-test");
  m.metadata.emplace_back("theta", "0.95");
  (void)z;
  return m;
}

}  // namespace

TEST_CASE("LP writer emits the expected dialect") {
  std::string lp = write_lp(tiny_model());
  CHECK(lp.find("Minimize\n obj: 1 x_0 - 0.5 x_1\n") != std::string::npos);
  CHECK(lp.find("r0: 2 x_0 - 3 x_1 + 1 t_0_1 >= -6.7000000000000002\n") != std::string::npos);
  CHECK(lp.find("q0: - 0.875 x_0 + [ 1.25 x_0 ^2 - 0.5 x_0 * x_1 - 1 lam_0 ^2 ] <= 0.25\n") !=
        std::string::npos);
  CHECK(lp.find("Bounds\n") != std::string::npos);
  CHECK(lp.find(" -15 <= x_0 <= 15\n") != std::string::npos);
  CHECK(lp.find(" lam_0 >= 0\n") != std::string::npos);
  CHECK(lp.find(" z_0 free\n") != std::string::npos);
  CHECK(lp.find("Binaries\n t_0_1\n") != std::string::npos);
  CHECK(lp.find("SOS\n sos_0: S2:: alpha_0_0:1 alpha_0_1:2\n") != std::string::npos);
  CHECK(lp.find("End\n") != std::string::npos);
  CHECK(lp.find("\\ model_kind: unit-test\n") != std::string::npos);
}

TEST_CASE("LP round trip is byte identical") {
  MiqpModel m = tiny_model();
  std::string lp = write_lp(m);
  MiqpModel back = parse_lp(lp);
  CHECK(write_lp(back) == lp);

  CHECK(back.variables.size() == m.variables.size());
  CHECK(back.rows.size() == m.rows.size());
  CHECK(back.quad_rows.size() == m.quad_rows.size());
  CHECK(back.sos2.size() == 1);
  CHECK(back.sos2[0].vars == m.sos2[0].vars);
  CHECK(back.variables[2].kind == VarKind::Binary);
  CHECK(back.metadata == m.metadata);
}

TEST_CASE("LP round trip on generated models") {
  GenConfig cfg;
  cfg.n = 12;
  cfg.K = 5;
  cfg.theta = 0.95;
  cfg.seed = 11;
  auto inst = generate_instance(cfg);
  double tau = 0.005;
  for (int which = 0; which < 3; ++which) {
    MiqpModel m;
    if (which == 0) m = build_pwl_outer(inst, tau);
    if (which == 1) m = build_pwl_inner(inst, tau);
    if (which == 2) {
      Rng rng(5);
      m = build_saa(inst, 40, 1e6, rng);
    }
    std::string lp = write_lp(m);
    MiqpModel back = parse_lp(lp);
    CHECK(write_lp(back) == lp);
    CHECK(validate_model(back).empty());
  }
}

TEST_CASE("exported variable names follow the convention") {
  auto inst = random_instance(3, 2, 6);
  MiqpModel mo = build_pwl_outer(inst, 0.01);
  std::string lp = write_lp(mo);
  for (const char* name : {"x_0", "x_2", "z_0", "z_1", "zeta_1", "lam_0", "alpha_1_0", "t_1_3",
                           "y_0_1", "sos_1"})
    CHECK(lp.find(name) != std::string::npos);

  MiqpModel mi = build_pwl_inner(inst, 0.01);
  std::string ilp = write_lp(mi);
  CHECK(ilp.find("frakz_0_0") != std::string::npos);
  CHECK(ilp.find("t_0_4") != std::string::npos);

  Rng rng(5);
  MiqpModel ms = build_saa(inst, 10, 1e6, rng);
  CHECK(write_lp(ms).find("saa_y_9") != std::string::npos);
}

TEST_CASE("IR JSON export parses and matches counts") {
  auto inst = random_instance(4, 2, 8);
  MiqpModel m = build_pwl_outer(inst, 0.01);
  std::string text = write_ir_json(m);
  auto j = nlohmann::json::parse(text);
  CHECK(j["schema"] == "gmmcc-ir-v1");
  CHECK(j["variables"].size() == m.variables.size());
  CHECK(j["rows"].size() == m.rows.size());
  CHECK(j["quad_rows"].size() == m.quad_rows.size());
  CHECK(j["sos2"].size() == m.sos2.size());
  CHECK(j["metadata"]["model_kind"] == "pwl-o");
  // Doubles survive the round trip exactly.
  CHECK(j["rows"][0]["rhs"].get<double>() == m.rows[0].rhs);
}

TEST_CASE("parse_lp rejects malformed input") {
  CHECK_THROWS(parse_lp("Minimize\n obj: 1 x_0\nEnd\n"));  // no Bounds
  MiqpModel m = tiny_model();
  std::string lp = write_lp(m);
  CHECK_THROWS(parse_lp(lp.substr(0, lp.size() - 5)));  // truncated End
}
