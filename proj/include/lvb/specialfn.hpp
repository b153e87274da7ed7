#pragma once

// Special functions used by the model kernels and the Laplace solver.
// All routines are pure and thread-safe.

namespace lvb::specialfn {

double erf(double x);
double erfc(double x);

double norm_pdf(double x);
double norm_cdf(double x);

// Phi(hi) - Phi(lo) for lo <= hi, evaluated on whichever tail avoids cancellation.
double norm_cdf_between(double lo, double hi);

// Modified Bessel function of the first kind I_order(z), order in (-1, 10], z >= 0.
// Throws Overflow for z beyond the double range of the unscaled value.
double bessel_i(double order, double z);

// exp(-z) * I_order(z); finite for every z >= 0.
double bessel_i_scaled(double order, double z);

// log I_order(z) for z > 0.
double log_bessel_i(double order, double z);

} // namespace lvb::specialfn
