#include "gmmcc/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace gmmcc {

namespace {

void require_finite(double z, const char* who) {
  if (!std::isfinite(z)) throw std::domain_error(std::string(who) + ": non-finite argument");
}

}  // namespace

double std_normal_pdf(double z) {
  require_finite(z, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double z) {
  require_finite(z, "std_normal_cdf");
  if (z <= -40.0) return 0.0;
  if (z >= 40.0) return 1.0;
  return 0.5 * std::erfc(-z / kSqrt2);
}

double std_normal_upper_tail(double z) {
  require_finite(z, "std_normal_upper_tail");
  if (z <= -40.0) return 1.0;
  if (z >= 40.0) return 0.0;
  return 0.5 * std::erfc(z / kSqrt2);
}

double std_normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("std_normal_inv_cdf: p outside (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std_normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double phi_second(double z) {
  require_finite(z, "phi_second");
  return -z * std_normal_pdf(z);
}

double tail_endpoint(double tail_mass) {
  if (!(tail_mass > 0.0 && tail_mass < 0.5))
    throw std::domain_error("tail_endpoint: mass outside (0, 0.5)");
  double root = std_normal_inv_cdf(1.0 - tail_mass);
  // Snap to the 1e-6 grid: smallest grid point whose tail is still small enough.
  long long k = static_cast<long long>(std::floor(root * 1e6)) - 1;
  for (;; ++k) {
    double cand = static_cast<double>(k) * 1e-6;
    if (std_normal_upper_tail(cand) <= tail_mass) return cand;
  }
}

}  // namespace gmmcc
