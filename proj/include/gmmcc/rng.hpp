#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gmmcc/special_functions.hpp"

namespace gmmcc {

// Deterministic seeded generator: mt19937_64 with explicit uniform and normal
// mappings, so streams do not depend on the standard library's distribution
// implementations. The sequence for a fixed seed is documented in the README.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1): top 53 bits of one draw.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller with the second value cached; the log argument is kept in
  // (0, 1].
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Index draw proportional to nonnegative weights.
  int pick_weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    double u = uniform01() * total;
    double acc = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
      acc += w[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(w.size()) - 1;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmmcc
