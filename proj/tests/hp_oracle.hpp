#pragma once

// Slow high-precision standard normal reference used only in tests.
// Independent of the library implementation: Maclaurin series around 0 plus
// the Laplace continued fraction for the tails, in extended precision.
namespace hp {

long double normal_pdf(long double z);
long double normal_cdf(long double z);

}
