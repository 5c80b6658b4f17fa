#pragma once

namespace catinfo {

// Upper-tail probability P[X >= x] for a chi-square variable with df degrees
// of freedom, via the regularized incomplete gamma function Q(df/2, x/2).
// Absolute error is well below 1e-10 over the df range used here (<= 64).
double chi_square_sf(double x, long df);

} // namespace catinfo
