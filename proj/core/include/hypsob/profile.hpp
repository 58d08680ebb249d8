#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hypsob/quadrature.hpp"

namespace hypsob {

enum class TailKind { compact, power, exponential };

/// Behaviour of a profile past its last sample.
///   compact:S      v = v(s_M) on [s_M, S), 0 from S on
///   power:gamma    v = v(s_M) (s/s_M)^{-gamma}
///   exponential:r  v = v(s_M) exp(-r (s - s_M))
struct Tail {
  TailKind kind = TailKind::compact;
  double parameter = 0.0;

  std::string describe() const;  ///< "compact:1", "power:3", ...
};

std::string to_string(TailKind kind);
TailKind tail_kind_from_string(const std::string& text);

/// Downward jump of a right-continuous profile: v(s-) - v(s) = drop > 0.
struct Jump {
  double s = 0.0;
  double drop = 0.0;
};

/// Log-spaced nodes on the measure line, in multiples of a scale (sigma_n by
/// default): `lo`..`hi` with `per_decade` nodes per decade, plus s = 0.
struct GridSpec {
  double lo = 1e-6;
  double hi = 1e6;
  int per_decade = 200;

  std::vector<double> nodes(double scale) const;
};

/// Value with an absolute error estimate; arithmetic propagates first order.
struct Measured {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Non-increasing, non-negative v on [0, inf): the decreasing rearrangement
/// u* of a function on H^n, shared by both symmetrizations.
///
/// Either a grid (monotone cubic Hermite per continuous segment, so v' is
/// exact for the interpolant and never positive) or closed-form value/slope
/// closures. Immutable; copies share state.
class RadialProfile {
 public:
  using Fn = std::function<double(double)>;

  struct Segment {
    std::vector<double> s;
    std::vector<double> v;
    std::vector<double> slope;
  };

  struct Analytic {
    Fn value;
    Fn slope;
    Tail tail;  ///< compact support end, or the decay law used to check integrability
    std::vector<double> breakpoints;  ///< kinks in v'
    std::vector<Jump> jumps;
    std::vector<double> scale_hints;  ///< where v changes on a log scale
    std::string name;
  };

  RadialProfile();  ///< identically zero

  static RadialProfile zero();
  /// Grid profile; first node must be 0. `slopes` are used as node
  /// derivatives when given, otherwise three-point differences are clamped
  /// to be non-positive.
  static RadialProfile from_samples(std::vector<double> s, std::vector<double> v, Tail tail,
                                    std::string name = {}, std::vector<double> slopes = {});
  /// Several continuous segments separated by jumps (segment k+1 starts where
  /// segment k ends). The tail continues the last segment.
  static RadialProfile from_segments(std::vector<Segment> segments, Tail tail, std::string name = {});
  static RadialProfile analytic(Analytic spec);
  /// Height c on [0, A), zero afterwards.
  static RadialProfile step(double height, double width, std::string name = {});

  double value(double s) const;
  /// v'(s) away from jumps; 0 beyond the support.
  double slope(double s) const;
  double value_at_zero() const { return value(0.0); }

  bool is_zero() const;
  bool has_closure() const;
  bool has_jumps() const { return !jumps().empty(); }
  const std::vector<Jump>& jumps() const;
  const Tail& tail() const;
  /// End of the support: S for compact tails, +inf otherwise.
  double support_end() const;
  /// Sorted interior points where the integrand may lose smoothness, with
  /// the support end (if finite) last. Excludes 0.
  const std::vector<double>& knots() const;
  const std::vector<double>& scale_hints() const;
  /// Clamped positive slope mass from grid differentiation.
  double clamped_mass() const;
  const std::vector<Segment>& segments() const;
  const std::string& name() const;
  double scale_factor() const;

  RadialProfile scaled(double c) const;
  RadialProfile renamed(std::string name) const;
  /// Grid version of this profile on the given nodes (which must start at 0);
  /// slopes come from the closure when present.
  RadialProfile sampled(const std::vector<double>& nodes) const;

 private:
  struct Impl;
  explicit RadialProfile(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Integral of g over [0, inf) split at the profile's knots and scale hints.
/// Pieces spanning more than a factor 4 are integrated in log s; the pieces
/// touching 0 and infinity use log-variable panels that stop once two in a row
/// contribute below 0.1 * rel_tol of the running total.
Measured integrate_measure_line(const RadialProfile::Fn& g, const RadialProfile& profile,
                                const QuadratureConfig& cfg);

/// Default configuration for profile integrals: the absolute tolerance is
/// negligible so the relative tolerance governs.
QuadratureConfig profile_quadrature(double rel_tol = 1e-10);

}  // namespace hypsob
