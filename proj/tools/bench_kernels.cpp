// Timing comparison of the OpenMP kernels against their serial reference
// paths. The results must match bitwise; only the wall time differs.
#include <chrono>
#include <cstdio>

#include "gmmcc/instance_gen.hpp"
#include "gmmcc/pwl.hpp"
#include "gmmcc/verification.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gmmcc;

namespace {

template <typename F>
double time_ms(F&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-18s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx   results %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, identical ? "identical" : "DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both paths run serially\n");
#endif

  GenConfig cfg;
  cfg.n = 3;
  cfg.K = 5;
  cfg.theta = 0.9;
  cfg.varrho = 2.0;
  cfg.varsigma = 2.0;
  cfg.seed = 7;
  cfg.box_half_width = 5.0;
  cfg.ineq_rows = 0;
  GmmInstance inst = generate_instance(cfg);

  {
    auto pwl = build_pwl(outer_breakpoints(1e-4, -6.466, 6.466));
    double es = 0.0, ep = 0.0;
    double ts = time_ms([&] { es = certify_error(pwl, 1e-5, Exec::Serial); });
    double tp = time_ms([&] { ep = certify_error(pwl, 1e-5, Exec::Parallel); });
    report("certify_error", ts, tp, es == ep);
  }
  {
    DeskSolveResult rs, rp;
    double ts = time_ms([&] { rs = desk_solve(inst, 96, 1, Exec::Serial); });
    double tp = time_ms([&] { rp = desk_solve(inst, 96, 1, Exec::Parallel); });
    report("desk_solve", ts, tp,
           rs.found == rp.found && rs.x == rp.x && rs.objective == rp.objective);
  }
  {
    Vec x(inst.n, 0.5);
    McEstimate es, ep;
    double ts = time_ms([&] { es = mc_probability(inst, x, 2000000, 11, Exec::Serial); });
    double tp = time_ms([&] { ep = mc_probability(inst, x, 2000000, 11, Exec::Parallel); });
    report("mc_probability", ts, tp, es.estimate == ep.estimate);
  }
  {
    AuditReport rs, rp;
    double ts = time_ms([&] { rs = sandwich_audit(inst, 0.005, 200000, 3, Exec::Serial); });
    double tp = time_ms([&] { rp = sandwich_audit(inst, 0.005, 200000, 3, Exec::Parallel); });
    report("sandwich_audit", ts, tp,
           rs.max_outer_gap == rp.max_outer_gap && rs.max_inner_gap == rp.max_inner_gap &&
               rs.violations == rp.violations);
  }
  return 0;
}
