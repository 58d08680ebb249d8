#pragma once

#include <string>

#include "hypsob/deficit_report.hpp"
#include "hypsob/params.hpp"
#include "hypsob/profile.hpp"
#include "hypsob/rearrangement.hpp"

namespace hypsob {

/// Coefficient of the L^p term subtracted in the logarithmic inequality:
/// ((n-1)/p)^p as in every other Poincaré term, or ((n-1)/n)^p.
enum class PoincareWeight { over_p, over_n };
/// Constant of the logarithmic inequality: the displayed one (pi^{p/2}) or the
/// sharp Euclidean one (pi^{-p/2}).
enum class LogConstant { displayed, sharp };

std::string to_string(PoincareWeight weight);
PoincareWeight poincare_weight_from_string(const std::string& text);
std::string to_string(LogConstant constant);
LogConstant log_constant_from_string(const std::string& text);

struct VerifierOptions {
  QuadratureConfig quadrature = profile_quadrature();
  /// Multiplies the sharp constant in the direction that strengthens the
  /// inequality (S -> c S, GN -> GN / c, b -> b / c, ...). 1 is the theorem;
  /// anything above 1 must eventually fail.
  double constant_scale = 1.0;
  PoincareWeight log_weight = PoincareWeight::over_p;
  LogConstant log_constant = LogConstant::displayed;
};

/// grad_norm_hyperbolic - (w (n-1)/p)^p int v^p.
Measured poincare_deficit(const RadialProfile& v, int n, double p, const QuadratureConfig& cfg,
                          double weight_scale = 1.0);

bool in_range(InequalityId id, const Params& params);
/// Human-readable admissible range, e.g. "n >= 4, 2n/(n-1) <= p < n".
std::string range_description(InequalityId id);

DeficitReport poincare_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
/// p-th power form divided by GN^p: lhs = PD^theta * secondary^{p(1-theta)},
/// rhs = GN^{-p} * main^p. At alpha = n/(n-p) this is poincare_sobolev.
DeficitReport gagliardo_nirenberg(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
/// Needs compact support.
DeficitReport morrey_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
/// Evaluated on v / ||v||_p; the factor is kept as the "normalization"
/// diagnostic.
DeficitReport log_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
/// Oriented as grad^{n/p} >= sum, so the deficit is non-negative like every
/// other report. p = 1 needs a profile with an analytic closure.
DeficitReport mugelli_talenti_sum(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
DeficitReport linfty_inequality(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
/// Flat checks on the Euclidean symmetrization.
DeficitReport euclidean_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});
DeficitReport euclidean_morrey(const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});

DeficitReport evaluate(InequalityId id, const RadialProfile& v, const Params& params,
                       const VerifierOptions& opts = {});
/// As evaluate, but divergent or inadmissible profiles give a skipped report
/// instead of an exception. Out-of-range parameters still throw.
DeficitReport evaluate_guarded(InequalityId id, const RadialProfile& v, const Params& params,
                               const VerifierOptions& opts = {});

/// v(r) = int_r^inf l(s)^{-p/(p-1)} ds on the grid, with the exact slope as
/// closure and the power tail 1/(p-1). Requires p > n.
RadialProfile extremal_linfty_profile(int n, double p, const GridSpec& grid = {});
/// (1 + (s / (sigma_n lambda^n))^{p/((p-1)n)})^{-(n-p)/p}, the Euclidean
/// Sobolev extremal at scale lambda. Requires 1 < p < n.
RadialProfile aubin_talenti_profile(int n, double p, double lambda = 1.0);
/// 1 - (s / sigma_n)^{(p-n)/((p-1)n)} on [0, sigma_n], the Euclidean Morrey
/// extremal. Requires p > n.
RadialProfile morrey_extremal_profile(int n, double p);

}  // namespace hypsob
