#pragma once

namespace gmmcc {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438186847586;
inline constexpr double kSqrt2 = 1.4142135623730950488016887242096980785697;
inline constexpr double kTwoPi = 6.2831853071795864769252867665590057683943;

// Standard normal density. Throws std::domain_error for non-finite input.
double std_normal_pdf(double z);

// Standard normal CDF, absolute error below 1e-12 on [-8, 8].
// Inputs outside [-40, 40] clamp to exactly 0 or 1.
double std_normal_cdf(double z);

// Upper tail 1 - Phi(z), computed without cancellation.
double std_normal_upper_tail(double z);

// Inverse CDF by bisection on std_normal_cdf (200 iteration cap).
// Not on any hot path; correctness over speed.
double std_normal_inv_cdf(double p);

// Second derivative of the CDF: -z * pdf(z).
// Extrema at z = -1 and z = +1 with magnitude e^{-1/2}/sqrt(2 pi).
double phi_second(double z);

// Smallest endpoint on a 1e-6 grid with 1 - Phi(z_R) <= tail_mass.
// The matching left endpoint is -z_R by symmetry.
double tail_endpoint(double tail_mass);

}
