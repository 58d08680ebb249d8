#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypsob/deficit_report.hpp"
#include "hypsob/inequality_verifier.hpp"
#include "hypsob/params.hpp"
#include "hypsob/profile.hpp"

namespace hypsob {

enum class FamilyId { truncated_bubble, tent, exponential, custom };

std::string to_string(FamilyId id);
FamilyId family_from_string(const std::string& text);

/// Aubin–Talenti bubble at scale lambda times a C^1 cutoff: 1 on [0, T/2],
/// 1 - 3y^2 + 2y^3 with y = 2s/T - 1 on [T/2, T], 0 afterwards.
RadialProfile truncated_bubble(int n, double p, double lambda, double truncation);
/// max(1 - s/A, 0)
RadialProfile tent_profile(double width);
/// exp(-s/A)
RadialProfile exponential_profile(double width);

/// Positive parameters searched in log coordinates within [lower, upper].
struct TestFamily {
  FamilyId id = FamilyId::custom;
  std::vector<std::string> parameter_names;
  std::vector<double> start;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<RadialProfile(const std::vector<double>&)> generate;

  /// (lambda, T), start (1, 1), lambda in [1e-6, 10], T in [0.1, 10].
  static TestFamily truncated_bubble(int n, double p);
  /// (A), start 1, A in [1e-6, 1e3].
  static TestFamily tent();
  static TestFamily exponential();
  static TestFamily custom(std::vector<std::string> names, std::vector<double> start, std::vector<double> lower,
                           std::vector<double> upper, std::function<RadialProfile(const std::vector<double>&)> generate);

  std::size_t dimension() const { return parameter_names.size(); }
  void validate() const;
};

struct SearchSpec {
  std::vector<double> start;  ///< overrides the family start when non-empty
  int max_evaluations = 200;
  double x_tol = 1e-3;   ///< simplex diameter in log coordinates
  double f_tol = 1e-10;  ///< relative spread of the simplex values
  double initial_step = 1.0;
  std::uint64_t seed = 0;
  VerifierOptions verifier;
};

struct TracePoint {
  int iteration = 0;
  std::vector<double> parameters;
  double ratio = 0.0;
  double gap = 0.0;
};

/// Ratios at a decreasing geometric sequence of lambdas with T fixed.
struct TrendResult {
  std::vector<double> lambdas;
  std::size_t requested = 0;  ///< leading lambdas that were asked for
  bool extended = false;      ///< the sequence was continued to reach gap_max
  std::vector<double> ratios;
  double target = 0.0;
  double truncation = 1.0;
  bool monotone = false;
  bool above_target = false;
  double final_relative_gap = 0.0;
  double gap_max = 0.05;
  bool passed = false;
};

struct SharpnessResult {
  InequalityId inequality_id = InequalityId::poincare_sobolev;
  FamilyId family_id = FamilyId::truncated_bubble;
  Params params;
  std::vector<std::string> parameter_names;
  std::vector<double> best_parameters;
  double best_ratio = 0.0;
  double target = 0.0;
  double gap = 0.0;  ///< best_ratio - target
  double relative_gap() const { return target == 0.0 ? gap : gap / target; }
  std::vector<TracePoint> trace;
  int evaluations = 0;
  bool converged = false;
  std::optional<TrendResult> trend;
};

/// The value the ratio tends to at the sharp constant: S(n,p)^p for the
/// Sobolev forms (scaled like the verifier's constant), 1 otherwise.
double target_constant(InequalityId id, const Params& params, const VerifierOptions& opts = {});
/// (lhs / rhs) * target, so that for Poincaré–Sobolev this is
/// PD / ||v||_{p*}^p. Logarithmic form is rejected.
double deficit_ratio(InequalityId id, const RadialProfile& v, const Params& params, const VerifierOptions& opts = {});

/// Deterministic Nelder–Mead over the family's log-parameters.
SharpnessResult minimize_ratio(InequalityId id, const Params& params, const TestFamily& family,
                               const SearchSpec& spec = {});

/// Passes when there are at least 4 lambdas, ratios strictly decrease, none
/// is below target (1 - 1e-6) and the last relative gap is <= gap_max.
/// While the gap is still above gap_max, up to `extra_steps` further lambdas
/// continue the sequence with its last ratio.
TrendResult concentration_trend(InequalityId id, const Params& params, const std::vector<double>& lambdas,
                                double truncation = 1.0, const VerifierOptions& opts = {}, double gap_max = 0.05,
                                int extra_steps = 0);

struct NonAttainmentReport {
  std::vector<DeficitReport> reports;
  double min_deficit = 0.0;
  double min_relative_margin = 0.0;
  std::string min_profile;
  std::vector<std::string> failures;  ///< profiles with deficit <= 10 * quadrature error
  std::size_t skipped = 0;
  bool passed() const { return failures.empty(); }
};

/// Every non-zero admissible profile must have deficit > 10 * quadrature
/// error. Zero profiles are excluded; divergent ones are skipped.
NonAttainmentReport non_attainment_scan(InequalityId id, const Params& params,
                                        const std::vector<RadialProfile>& corpus, const VerifierOptions& opts = {});

/// iteration,<parameter names>,ratio,gap
std::string trace_to_csv(const SharpnessResult& result);
std::string to_json(const SharpnessResult& result);
std::string to_json(const TrendResult& trend);

}  // namespace hypsob
