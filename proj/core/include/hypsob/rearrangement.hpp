#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hypsob/deficit_report.hpp"
#include "hypsob/profile.hpp"
#include "hypsob/quadrature.hpp"

namespace hypsob {

/// One monotone piece of |u| as a function of geodesic radius, on
/// [begin, end). `end` may be +inf for the last piece.
struct MonotonePiece {
  double begin = 0.0;
  double end = 0.0;
  RealFn f;
  RealFn derivative;  ///< optional; enables exact slopes of u*
};

/// Radial function on H^n given by finitely many monotone pieces in rho.
/// Values are taken in absolute value. Pieces must tile [0, end) in order.
class RadialFunction {
 public:
  RadialFunction(int n, std::vector<MonotonePiece> pieces);

  /// Single non-increasing piece on [0, support).
  static RadialFunction symmetric(int n, RealFn f, RealFn derivative = {},
                                  double support = std::numeric_limits<double>::infinity());
  /// height on the geodesic ball of radius R.
  static RadialFunction indicator(int n, double radius, double height = 1.0);

  int n() const { return n_; }
  const std::vector<MonotonePiece>& pieces() const { return pieces_; }
  double value(double rho) const;
  double sup() const;
  bool derivatives_known() const;

  /// Volume of {|u| > t}; `or_equal` switches to {|u| >= t}.
  double distribution(double t, bool or_equal = false) const;
  /// Volume of {|u| > t} together with the density sum_i V'(r_i) / |f'(r_i)|
  /// over the level-t crossings (needs derivatives).
  std::pair<double, double> distribution_with_density(double t) const;
  /// Volume of {|u| > 0}; +inf when the last piece is unbounded.
  double support_volume() const;

  /// int |u|^q dV by radial quadrature.
  Measured lq_integral(double q, const QuadratureConfig& cfg) const;
  /// int |u|^q dV = int_0^sup q t^{q-1} mu(t) dt.
  Measured lq_integral_layer_cake(double q, const QuadratureConfig& cfg) const;
  /// int |grad_g u|^p dV = n sigma_n int |f'|^p sinh^{n-1}; +inf if u jumps.
  Measured gradient_integral(double p, const QuadratureConfig& cfg) const;

 private:
  int n_;
  std::vector<MonotonePiece> pieces_;
  std::vector<int> direction_;  // +1 increasing, -1 decreasing, 0 constant
};

double distribution_function(const RadialFunction& f, double t);

/// u* sampled on the grid (in multiples of sigma_n), split into continuous
/// segments at the volumes of the pieces' end values; gaps in the range of
/// |u| become jumps.
RadialProfile decreasing_rearrangement(const RadialFunction& f, const GridSpec& grid = {});

/// int_0^inf v^q ds (the q-th power of the L^q norm of either symmetrization).
Measured lp_integral(const RadialProfile& v, double q, const QuadratureConfig& cfg = profile_quadrature());
/// (int v^q)^{1/q}
Measured lp_norm(const RadialProfile& v, double q, const QuadratureConfig& cfg = profile_quadrature());
/// p-th power of the Euclidean gradient norm of u#_e; +inf for step profiles.
Measured grad_norm_euclidean(const RadialProfile& v, int n, double p,
                             const QuadratureConfig& cfg = profile_quadrature());
/// p-th power of the hyperbolic gradient norm of u#_g; +inf for step profiles.
Measured grad_norm_hyperbolic(const RadialProfile& v, int n, double p,
                              const QuadratureConfig& cfg = profile_quadrature());
/// (n sigma_n)^p int |v'|^p k_{n,p}(s / sigma_n) ds, the gap between the two.
Measured grad_norm_correction(const RadialProfile& v, int n, double p,
                              const QuadratureConfig& cfg = profile_quadrature());

struct HardyBound {
  double lhs = 0.0;  ///< int |v'|^p s^p
  double rhs = 0.0;  ///< int |s v' + v/p|^p + p^{-p} int v^p - p^{1-p} [w^p]
  double error = 0.0;
  double boundary_term = 0.0;  ///< p^{1-p} [w^p]_lo^hi, 0 on the full line
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Full-line bound for a profile; requires p >= 2.
HardyBound hardy_term_bound(const RadialProfile& v, double p, const QuadratureConfig& cfg = profile_quadrature());
/// Same bound on [lo, hi] for closures that need not be profiles (e.g.
/// c s^{-1/p}, which is unbounded at 0).
HardyBound hardy_term_bound(const RealFn& value, const RealFn& slope, double p, double lo, double hi,
                            const QuadratureConfig& cfg = profile_quadrature());

/// Relative L^2(ds/s) distance of w = v s^{1/p} from its mean on [lo, hi].
double rigidity_distance(const RadialProfile& v, double p, double lo, double hi);

/// Hyperbolic minus Poincaré term versus Euclidean gradient, p-th powers.
/// Range: n = 2, p >= 2 or n >= 3, p >= 2n/(n-1).
DeficitReport key_comparison(const RadialProfile& v, const Params& params,
                             const QuadratureConfig& cfg = profile_quadrature(), double constant_scale = 1.0);

}  // namespace hypsob
