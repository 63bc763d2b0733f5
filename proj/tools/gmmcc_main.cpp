#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmmcc/instance_gen.hpp"
#include "gmmcc/json_io.hpp"
#include "gmmcc/lp_format.hpp"
#include "gmmcc/model.hpp"
#include "gmmcc/verification.hpp"

#define GMMCC_VERSION "1.0.0"

namespace {

using namespace gmmcc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCertification = 4;
constexpr int kExitInfeasible = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// Every command emits a manifest next to its primary output: the echoed
// command line, seed, version, input/output hashes and wall time. Identical
// inputs and seed give identical output hashes.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, hash
  std::vector<std::pair<std::string, std::string>> outputs;  // path, hash
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void add_input(const std::string& path, const std::string& bytes) {
    inputs.emplace_back(path, hash_hex(fnv1a_hash(bytes)));
  }
  void write_output(const std::string& path, const std::string& bytes) {
    write_file_atomic(path, bytes);
    outputs.emplace_back(path, hash_hex(fnv1a_hash(bytes)));
  }
  void finish(const std::string& primary_output) {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("gmmcc-manifest-v1");
    w.key("version").value(GMMCC_VERSION);
    w.key("command").value(command);
    w.key("args").begin_array();
    for (const auto& a : args) w.value(a);
    w.end_array();
    if (has_seed) w.key("seed").value(seed);
    w.key("inputs").begin_object();
    for (const auto& kv : inputs) w.key(kv.first).value(kv.second);
    w.end_object();
    w.key("outputs").begin_object();
    for (const auto& kv : outputs) w.key(kv.first).value(kv.second);
    w.end_object();
    w.key("wall_time_ms").value(ms);
    w.end_object();
    write_file_atomic(primary_output + ".manifest.json", w.str() + "\n");
  }
};

uint64_t effective_seed(uint64_t flag_seed) {
  if (const char* env = std::getenv("GMMCC_SEED")) return std::strtoull(env, nullptr, 10);
  return flag_seed;
}

GmmInstance load_instance(const std::string& path, Manifest& mf) {
  std::string text = read_file(path);
  mf.add_input(path, text);
  GmmInstance inst = parse_instance_json(text);
  auto issues = validate_instance(inst);
  if (!issues.empty()) throw std::runtime_error("invalid instance: " + issues.front());
  factorize_components(inst);
  return inst;
}

std::vector<std::string> collect_args(int argc, char** argv) {
  std::vector<std::string> v;
  for (int i = 1; i < argc; ++i) v.emplace_back(argv[i]);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-mixture chance-constrained model toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic instance");
  GenConfig cfg;
  std::string weights_mode = "paper";
  std::string gen_out = "instance.json";
  gen->add_option("--n", cfg.n, "dimension")->required();
  gen->add_option("--k", cfg.K, "mixture components")->required();
  gen->add_option("--theta", cfg.theta, "chance threshold")->required();
  gen->add_option("--varrho", cfg.varrho, "mean control");
  gen->add_option("--varsigma", cfg.varsigma, "variance control");
  gen->add_option("--weights", weights_mode, "equal|paper");
  gen->add_option("--seed", cfg.seed, "rng seed");
  gen->add_option("--box-half-width", cfg.box_half_width, "box half width");
  gen->add_option("--rows", cfg.ineq_rows, "inequality row count (default n/10 or n/20)");
  gen->add_option("--b-samples", cfg.b_samples, "samples for the rhs average");
  gen->add_option("--b-multiplier", cfg.b_stddev_multiplier, "stddev multiplier in the rhs");
  gen->add_option("--out", gen_out, "output instance file");

  // breakpoints
  auto* bpc = app.add_subcommand("breakpoints", "Print a certified breakpoint array");
  double bp_theta = 0.95, bp_tau = -1.0, bp_left = -6.466, bp_right = 6.466;
  std::string bp_kind = "outer", bp_out;
  bpc->add_option("--theta", bp_theta, "chance threshold (tau defaults to (1-theta)/10)");
  bpc->add_option("--tau", bp_tau, "accuracy (overrides the theta default)");
  bpc->add_option("--kind", bp_kind, "outer|inner");
  bpc->add_option("--z-left", bp_left, "left endpoint");
  bpc->add_option("--z-right", bp_right, "right endpoint");
  bpc->add_option("--out", bp_out, "write JSON here instead of stdout");

  // build
  auto* bld = app.add_subcommand("build", "Build a model and export LP + IR");
  std::string bld_instance, bld_kind = "pwl-o", bld_out = "model.lp";
  double bld_tau = -1.0, bld_big_m = 1e6;
  int bld_samples = -1;
  uint64_t bld_seed = 0;
  BuildOptions bopt;
  bld->add_option("--instance", bld_instance, "instance JSON")->required();
  bld->add_option("--kind", bld_kind, "pwl-o|pwl-i|saa")->required();
  bld->add_option("--out", bld_out, "output LP path (IR JSON written alongside)");
  bld->add_option("--tau", bld_tau, "PWL accuracy (default (1-theta)/10)");
  bld->add_option("--z-lo", bopt.bounds.z_lo, "auxiliary z lower bound");
  bld->add_option("--z-hi", bopt.bounds.z_hi, "auxiliary z upper bound");
  bld->add_option("--endpoint", bopt.endpoint, "breakpoint endpoint magnitude");
  bld->add_flag("--sos2-as-binary", bopt.sos2_as_binary, "binarize SOS2 groups");
  bld->add_flag("--split-quad-eq", bopt.split_quad_eq, "split x'Sx = lam^2 into inequalities");
  bld->add_option("--samples", bld_samples, "SAA sample count (default 100/(1-theta), 20/(1-theta) at 0.999)");
  bld->add_option("--big-m", bld_big_m, "SAA big-M");
  bld->add_option("--seed", bld_seed, "SAA sampling seed");

  // verify
  auto* ver = app.add_subcommand("verify", "Verify a candidate solution");
  std::string ver_instance, ver_solution, ver_out;
  double tau_hat = 0.0;
  ver->add_option("--instance", ver_instance, "instance JSON")->required();
  ver->add_option("--solution", ver_solution, "solution file (JSON or name-value lines)")->required();
  ver->add_option("--tau-hat", tau_hat, "feasibility slack");
  ver->add_option("--out", ver_out, "write the report here (default stdout)");

  // desk-solve
  auto* desk = app.add_subcommand("desk-solve", "Grid-search oracle for n <= 3");
  std::string desk_instance, desk_out;
  int resolution = 64, refine = 2;
  desk->add_option("--instance", desk_instance, "instance JSON")->required();
  desk->add_option("--resolution", resolution, "grid points per axis");
  desk->add_option("--refine", refine, "refinement rounds");
  desk->add_option("--out", desk_out, "write the result here (default stdout)");

  // audit
  auto* aud = app.add_subcommand("audit", "Sandwich audit of the PWL surrogates");
  std::string aud_instance, aud_out;
  double aud_tau = 0.005;
  int aud_samples = 10000;
  uint64_t aud_seed = 0;
  aud->add_option("--instance", aud_instance, "instance JSON")->required();
  aud->add_option("--tau", aud_tau, "PWL accuracy");
  aud->add_option("--samples", aud_samples, "box samples");
  aud->add_option("--seed", aud_seed, "rng seed");
  aud->add_option("--out", aud_out, "write the report here (default stdout)");

  // probe
  auto* prb = app.add_subcommand("probe", "Breakpoint-count scaling probe (CSV)");
  std::string prb_taus = "1e-2,1e-3,1e-4,1e-5,1e-6", prb_kind = "outer", prb_out;
  prb->add_option("--taus", prb_taus, "comma-separated accuracies");
  prb->add_option("--kind", prb_kind, "outer|inner");
  prb->add_option("--out", prb_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
    return app.exit(e);  // --help
  }

  Manifest mf;
  mf.args = collect_args(argc, argv);

  try {
    if (*gen) {
      mf.command = "generate";
      cfg.seed = effective_seed(cfg.seed);
      mf.seed = cfg.seed;
      mf.has_seed = true;
      if (weights_mode == "equal")
        cfg.weight_mode = WeightMode::Equal;
      else if (weights_mode == "paper")
        cfg.weight_mode = WeightMode::PaperUnequal;
      else
        throw std::runtime_error("--weights must be equal or paper");
      GmmInstance inst = generate_instance(cfg);
      mf.write_output(gen_out, write_instance_json(inst));
      mf.finish(gen_out);
      return kExitOk;
    }

    if (*bpc) {
      mf.command = "breakpoints";
      if (bp_tau <= 0.0) bp_tau = (1.0 - bp_theta) / 10.0;
      Side kind = bp_kind == "inner" ? Side::Inner : Side::Outer;
      if (bp_kind != "inner" && bp_kind != "outer")
        throw std::runtime_error("--kind must be outer or inner");
      BreakpointArray bp = kind == Side::Outer ? outer_breakpoints(bp_tau, bp_left, bp_right)
                                               : inner_breakpoints(bp_tau, bp_left, bp_right);
      auto issues = check_breakpoints(bp);
      if (!issues.empty()) throw CertificationError(issues.front(), 0.0);
      std::string doc = write_breakpoints_json(bp);
      std::cerr << "tau = " << format_double17(bp_tau) << ", endpoints = ["
                << format_double17(bp.points.front()) << ", " << format_double17(bp.points.back())
                << "], count = " << bp.points.size() << "\n";
      if (bp_out.empty()) {
        std::cout << doc;
      } else {
        mf.write_output(bp_out, doc);
        mf.finish(bp_out);
      }
      return kExitOk;
    }

    if (*bld) {
      mf.command = "build";
      GmmInstance inst = load_instance(bld_instance, mf);
      MiqpModel model;
      if (bld_kind == "pwl-o" || bld_kind == "pwl-i") {
        double tau = bld_tau > 0.0 ? bld_tau : (1.0 - inst.theta) / 10.0;
        model = bld_kind == "pwl-o" ? build_pwl_outer(inst, tau, bopt)
                                    : build_pwl_inner(inst, tau, bopt);
      } else if (bld_kind == "saa") {
        bld_seed = effective_seed(bld_seed);
        mf.seed = bld_seed;
        mf.has_seed = true;
        int samples = bld_samples > 0 ? bld_samples : default_saa_samples(inst.theta);
        Rng rng(bld_seed);
        model = build_saa(inst, samples, bld_big_m, rng);
      } else {
        throw std::runtime_error("--kind must be pwl-o, pwl-i, or saa");
      }
      auto issues = validate_model(model);
      if (!issues.empty()) throw std::runtime_error("model validation failed: " + issues.front());
      mf.write_output(bld_out, write_lp(model));
      std::string ir_path = bld_out;
      if (ir_path.size() > 3 && ir_path.substr(ir_path.size() - 3) == ".lp")
        ir_path = ir_path.substr(0, ir_path.size() - 3);
      ir_path += ".ir.json";
      mf.write_output(ir_path, write_ir_json(model));
      mf.finish(bld_out);
      return kExitOk;
    }

    if (*ver) {
      mf.command = "verify";
      GmmInstance inst = load_instance(ver_instance, mf);
      std::string sol_text = read_file(ver_solution);
      mf.add_input(ver_solution, sol_text);
      Vec x = parse_solution(sol_text, inst.n);
      VerificationReport rep = verify(inst, x, tau_hat);
      JsonWriter w;
      w.begin_object();
      w.key("schema").value("gmmcc-verify-report-v1");
      w.key("objective").value(rep.objective);
      w.key("theta_check").value(rep.theta_check);
      w.key("theta_target").value(inst.theta);
      w.key("region_ok").value(rep.region_ok);
      w.key("worst_violation").value(rep.worst_violation);
      w.key("tau_hat").value(rep.tau_hat);
      w.key("tau_feasible").value(rep.tau_feasible);
      w.key("notes").begin_array();
      for (const auto& s : rep.notes) w.value(s);
      w.end_array();
      w.end_object();
      std::string doc = w.str() + "\n";
      if (ver_out.empty()) {
        std::cout << doc;
      } else {
        mf.write_output(ver_out, doc);
        mf.finish(ver_out);
      }
      return rep.tau_feasible ? kExitOk : kExitValidation;
    }

    if (*desk) {
      mf.command = "desk-solve";
      GmmInstance inst = load_instance(desk_instance, mf);
      DeskSolveResult res = desk_solve(inst, resolution, refine);
      JsonWriter w;
      w.begin_object();
      w.key("schema").value("gmmcc-desk-solve-v1");
      w.key("found").value(res.found);
      w.key("resolution").value(resolution);
      w.key("refine_rounds").value(refine);
      if (res.found) {
        w.key("x").value(res.x);
        w.key("objective").value(res.objective);
        w.key("theta_check").value(res.theta_check);
      }
      w.end_object();
      std::string doc = w.str() + "\n";
      if (desk_out.empty()) {
        std::cout << doc;
      } else {
        mf.write_output(desk_out, doc);
        mf.finish(desk_out);
      }
      return res.found ? kExitOk : kExitInfeasible;
    }

    if (*aud) {
      mf.command = "audit";
      aud_seed = effective_seed(aud_seed);
      mf.seed = aud_seed;
      mf.has_seed = true;
      GmmInstance inst = load_instance(aud_instance, mf);
      AuditReport rep = sandwich_audit(inst, aud_tau, aud_samples, aud_seed);
      JsonWriter w;
      w.begin_object();
      w.key("schema").value("gmmcc-audit-report-v1");
      w.key("samples").value(rep.samples);
      w.key("tau").value(aud_tau);
      w.key("max_outer_gap").value(rep.max_outer_gap);
      w.key("max_inner_gap").value(rep.max_inner_gap);
      w.key("violations").value(rep.violations);
      w.key("first_violation_x").value(rep.first_violation_x);
      w.end_object();
      std::string doc = w.str() + "\n";
      if (aud_out.empty()) {
        std::cout << doc;
      } else {
        mf.write_output(aud_out, doc);
        mf.finish(aud_out);
      }
      return rep.violations == 0 ? kExitOk : kExitCertification;
    }

    if (*prb) {
      mf.command = "probe";
      std::vector<double> taus;
      std::stringstream ss(prb_taus);
      std::string tok;
      while (std::getline(ss, tok, ',')) taus.push_back(std::stod(tok));
      Side kind = prb_kind == "inner" ? Side::Inner : Side::Outer;
      if (prb_kind != "inner" && prb_kind != "outer")
        throw std::runtime_error("--kind must be outer or inner");
      auto points = count_scaling_probe(taus, kind);
      std::string csv = "tau,count,bound_ratio\n";
      for (const auto& p : points)
        csv += format_double17(p.tau) + "," + std::to_string(p.count) + "," +
               format_double17(p.bound_ratio) + "\n";
      if (prb_out.empty()) {
        std::cout << csv;
      } else {
        mf.write_output(prb_out, csv);
        mf.finish(prb_out);
      }
      return kExitOk;
    }
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
