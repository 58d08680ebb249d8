#pragma once

#include "hypsob/params.hpp"

namespace hypsob {

enum class Summation { plain, compensated };

/// Gamma function for x > 0 via a Lanczos approximation (g = 7, 9 terms).
/// Relative error stays below 1e-13 on (0, 170]. `compensated` re-sums the
/// Lanczos series with Neumaier summation; it exists for cross-checks.
double gamma(double x, Summation summation = Summation::plain);

/// Volume of the Euclidean unit ball, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// Sharp Euclidean L^p Sobolev constant S(n,p), 1 < p < n.
double sobolev_constant(const Params& params);

/// S(n,1) = n * sigma_n^{1/n}, the isoperimetric constant (the p -> 1 limit of
/// sobolev_constant).
double isoperimetric_constant(int n);

/// Interpolation exponent theta of the sharp Gagliardo–Nirenberg inequality.
double gn_theta(const Params& params, GnBranch branch);
double gn_theta(const Params& params);

/// Sharp Gagliardo–Nirenberg constant for either branch (Del Pino–Dolbeault).
double gn_constant(const Params& params, GnBranch branch);
double gn_constant(const Params& params);

/// Sharp Morrey–Sobolev constant b_{n,p}, p > n.
double morrey_constant(const Params& params);

/// Sharp constant C(n,p) of sup|u| <= C ||grad_g u||_p on H^n, p > n.
double linfty_constant(const Params& params);

/// Constant of the Poincaré–Sobolev logarithmic inequality on H^n as
/// displayed for n >= 4, 2n/(n-1) <= p < n (carries pi^{+p/2}).
double log_sobolev_constant(const Params& params);

/// Sharp Euclidean L^p log-Sobolev constant (carries pi^{-p/2}); equality on
/// exp(-|x|^{p/(p-1)}). Admits any 1 < p < n.
double euclidean_log_sobolev_constant(const Params& params);

}  // namespace hypsob
