#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hypsob/params.hpp"

namespace hypsob {

enum class InequalityId {
  key_comparison,       ///< hyperbolic vs Euclidean gradient of the two symmetrizations
  poincare_sobolev,     ///< L^p Poincaré–Sobolev with the Euclidean constant
  gagliardo_nirenberg,  ///< both branches, p-th power form
  morrey_sobolev,
  log_sobolev,
  mugelli_talenti_sum,  ///< sum form, including the p = 1 limit
  linfty_inequality,
  euclidean_sobolev,  ///< flat sanity check, Aubin–Talenti
  euclidean_morrey,   ///< flat sanity check
};

std::string to_string(InequalityId id);
InequalityId inequality_from_string(const std::string& text);
const std::vector<InequalityId>& all_inequalities();

enum class ReportFlag {
  divergent,       ///< a norm of the profile is infinite; nothing evaluated
  outside_range,   ///< profile not admissible for this inequality (e.g. non-compact support)
  step_profile,    ///< profile has jumps; gradient norms are +inf
  cancellation,    ///< deficit is a small difference of large terms
  not_converged,   ///< some quadrature missed its tolerance
};

std::string to_string(ReportFlag flag);

/// One inequality evaluated on one profile. Orientation is always
/// lhs >= rhs, so deficit = lhs - rhs must be non-negative up to tolerance.
struct DeficitReport {
  InequalityId inequality_id = InequalityId::poincare_sobolev;
  Params params;
  std::string profile;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
  double relative_margin = 0.0;
  double quadrature_error = 0.0;
  std::vector<ReportFlag> flags;
  /// Homogeneity degree of lhs and rhs in the profile (p for the p-th power
  /// forms, 0 for the normalized logarithmic form).
  double power = 1.0;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::string note;  ///< why a report was skipped

  static DeficitReport make(InequalityId id, const Params& params, double lhs, double rhs, double quadrature_error,
                            double power);
  /// Report for a profile that could not be evaluated.
  static DeficitReport skipped(InequalityId id, const Params& params, ReportFlag why, const std::string& detail);

  void add_flag(ReportFlag flag);
  bool has_flag(ReportFlag flag) const;
  void add_diagnostic(std::string name, double value);
  double diagnostic(const std::string& name) const;  ///< NaN when absent

  double scale() const;
  /// max(rel * scale, 10 * quadrature_error)
  double tolerance(double rel = 1e-8) const;
  bool evaluated() const;
  /// Skipped reports and vacuous step-profile reports count as passing.
  bool passed(double rel = 1e-8) const;
};

std::string to_json(const DeficitReport& report, double rel = 1e-8);
/// {"reports": [...], "passed": bool, "count": n}
std::string reports_to_json(const std::vector<DeficitReport>& reports, double rel = 1e-8);
std::string reports_to_csv(const std::vector<DeficitReport>& reports, double rel = 1e-8);

}  // namespace hypsob
