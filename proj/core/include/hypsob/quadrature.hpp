#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace hypsob {

using RealFn = std::function<double(double)>;

enum class TailStrategy {
  exponential_substitution,  ///< s = a - ln(1-x)/kappa, kappa = tail_parameter
  hard_cutoff,               ///< integrate [a, a + tail_parameter] and drop the rest
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_depth = 50;
  TailStrategy tail_strategy = TailStrategy::exponential_substitution;
  double tail_parameter = 1.0;
  int max_intervals = 20000;

  /// Throws DomainError unless rel_tol > 0, abs_tol > 0, max_depth >= 1.
  void validate() const;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Adaptive Gauss–Kronrod 7-15 on [a, b], b may be +infinity. Never throws on
/// non-convergence; inspect `converged`.
IntegrationResult integrate_adaptive(const RealFn& f, double a, double b,
                                     const QuadratureConfig& cfg = {});

/// Same as integrate_adaptive but throws ConvergenceError (carrying the
/// partial value) when the tolerance is not met.
IntegrationResult integrate(const RealFn& f, double a, double b, const QuadratureConfig& cfg = {});

/// Single 15-point Kronrod rule on [a, b] with the QUADPACK error estimate.
IntegrationResult gauss_kronrod15(const RealFn& f, double a, double b);

struct RootOptions {
  double x_tol = 4.0 * std::numeric_limits<double>::epsilon();  ///< relative bracket width
  double f_tol = 0.0;  ///< |f - target| <= f_tol * max(1, |target|) also stops
  int max_iterations = 200;
  RealFn derivative;  ///< optional; enables safeguarded Newton
};

/// Solve f(t) = target for increasing f on [lo, hi]. Newton steps when a
/// derivative is supplied, Illinois false position otherwise; any step that
/// leaves the bracket falls back to bisection.
double find_root_increasing(const RealFn& f, double target, double lo, double hi,
                            const RootOptions& options = {});

enum class SignConstraint { none, non_positive, non_negative };

struct GridDerivative {
  std::vector<double> slopes;
  int clamped_nodes = 0;
  /// Sum of |clamped slope| times the node's trapezoid weight.
  double clamped_mass = 0.0;
};

/// Three-point derivative on a strictly increasing, possibly non-uniform grid.
/// Exact for quadratics at every node.
GridDerivative differentiate_grid(const std::vector<double>& x, const std::vector<double>& y,
                                  SignConstraint constraint = SignConstraint::none);

/// Evenly spaced nodes in log10 between lo and hi (inclusive), `per_decade`
/// nodes per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade);

}  // namespace hypsob
