#pragma once

#include <string>
#include <vector>

#include "hypsob/quadrature.hpp"

namespace hypsob {

/// x * exp(log_scale), for quantities that overflow double at large radius.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const;
  int sign() const { return (mantissa > 0.0) - (mantissa < 0.0); }
  /// log|x|; -inf for zero.
  double log_abs() const;
};

/// Decimal rendering with 17 significant digits that never overflows, e.g.
/// "-1.2345678901234567e+412".
std::string format_scaled(const ScaledValue& v);

enum class ClosedForm { n2, n3, none };

/// Normalized geodesic-ball volume Phi(t) = n * int_0^t sinh^{n-1}.
///
/// Small radii use the power series t^n h(t^2); above t = 1 a scaled form of
/// the reduction I_m = (sinh^{m-1} cosh - (m-1) I_{m-2}) / m keeps everything
/// O(1) and never overflows in log space. Both pieces are exact up to
/// rounding, so no interpolation table is needed. Construction builds the
/// series coefficients; afterwards the object is immutable.
class VolumeMap {
 public:
  /// `use_closed_form = false` forces the general series/reduction path even
  /// for n = 2, 3 (used to cross-check the closed forms).
  explicit VolumeMap(int n, bool use_closed_form = true);

  int n() const { return n_; }
  ClosedForm closed_form() const { return closed_form_; }

  double phi(double t) const;
  double log_phi(double t) const;
  double phi_inv(double s) const;
  /// Phi'(t) = n sinh^{n-1}(t).
  double phi_derivative(double t) const;

  /// h(x) - 1 where Phi(t) = t^n h(t^2); used for t < 1.
  double h_minus_one(double x) const;
  /// (1/n) log Phi(t) - log sinh(t), accurate near 0.
  double log_ratio(double t) const;
  /// R with log Phi(t) = log(n/m) - m log 2 + m t + log1p(R), m = n-1, t >= 1.
  double scaled_remainder(double t) const;

 private:

  int n_;
  ClosedForm closed_form_;
  std::vector<double> h_coefficients_;  // h(x) = sum_k h_k x^k, h_0 = 1
};

/// Shared per-dimension map, built once and then read concurrently.
const VolumeMap& volume_map(int n);

double log_sinh(double t);
/// sinh(t)/t - 1 without cancellation.
double sinhc_minus_one(double t);

double phi(int n, double t);
double phi_inv(int n, double s);
/// Phi by adaptive Gauss–Kronrod on the defining integral (oracle path).
double phi_quadrature(int n, double t, const QuadratureConfig& cfg = {});
/// Hyperbolic volume sigma_n Phi(rho) of a geodesic ball.
double ball_volume(int n, double rho);

/// k_{n,p}(s) = sinh(Phi^{-1}(s))^{p(n-1)} - s^{p(n-1)/n}.
double kernel_k(int n, double p, double s);

struct MarginValue {
  ScaledValue value;
  /// Magnitude of the largest cancelled term divided by |result|.
  double cancellation = 1.0;
  bool cancellation_warning = false;
};

/// Lemma margin F_{n,p}(t) = k_{n,p}(Phi(t)) - ((n-1)/n)^p Phi(t)^p.
MarginValue pointwise_margin(int n, double p, double t);
/// Inner factor G with F'(t) = p(n-1) sinh^{n-1}(t) G(t).
MarginValue margin_derivative_factor(int n, double p, double t);
double F(int n, double p, double t);
double G(int n, double p, double t);

/// l(s) = sinh(Phi^{-1}(s / sigma_n))^{n-1}.
double l_function(int n, double s);
double log_l_function(int n, double s);

/// Leading large-t behaviour of F_{n,p}, n >= 3.
ScaledValue asymptotic_F_scaled(int n, double p, double t);
double asymptotic_F(int n, double p, double t);

/// Radius beyond which the leading expansion changes sign, or +inf when it
/// keeps the sign of its constant term.
double asymptotic_crossing(int n, double p);

}  // namespace hypsob
