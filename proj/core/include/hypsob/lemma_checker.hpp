#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypsob/hyperbolic_geometry.hpp"

namespace hypsob {

enum class LemmaMode { verify, find_violation };

std::string to_string(LemmaMode mode);

/// Geometric t grid on [t_min, t_max], plus t = 0.
struct LemmaGrid {
  double t_min = 1e-4;
  double t_max = 25.0;
  int per_decade = 50;
  unsigned threads = 1;

  std::vector<double> nodes() const;
};

struct MarginRow {
  double t = 0.0;
  ScaledValue F;
  /// F / (1 + Phi(t)^p): F relative to the size of the terms it balances.
  double margin = 0.0;
  double cancellation = 1.0;
  /// Sign-normalized G (F' = p(n-1) sinh^{n-1} G), relative to its own terms.
  double derivative = 0.0;
};

struct Violation {
  double t = 0.0;
  ScaledValue F;
  /// Where the leading large-t expansion changes sign (n >= 3), else NaN.
  double asymptotic_crossing = 0.0;
  /// Expansion evaluated at t (n >= 3).
  std::optional<ScaledValue> asymptotic_F;
};

struct MarginTable {
  int n = 2;
  double p = 2.0;
  LemmaMode mode = LemmaMode::verify;
  double tolerance = 1e-9;
  std::vector<MarginRow> rows;
  double min_margin = 0.0;
  double min_margin_t = 0.0;
  bool monotone_ok = true;
  bool derivative_ok = true;
  std::optional<Violation> violation;
  double scan_limit = 0.0;      ///< largest t examined
  bool extended_range = false;  ///< violation found only past the default range
  bool inconclusive = false;

  /// verify: margins, monotonicity and G all within tolerance.
  /// find_violation: a violation was located.
  bool passed() const;
};

/// Evaluates F on the grid; checks min margin >= -tol, F non-decreasing and
/// G >= -tol. Requires p >= 2 (n = 2) or p >= 2n/(n-1) (n >= 3).
MarginTable verify_lemma(int n, double p, const LemmaGrid& grid = {}, double tolerance = 1e-9);

/// Scans [1e-2, t_max] geometrically and bisects to the first t with F < 0.
/// When nothing is found and the expansion predicts a crossing, the scan
/// continues to min(cap, 2 crossing + 10) and marks extended_range; otherwise
/// the table is inconclusive. Requires p below the lemma boundary.
MarginTable find_violation(int n, double p, double t_max = 40.0, double cap = 400.0);

/// t,F,margin
std::string margins_to_csv(const MarginTable& table);
std::string to_json(const MarginTable& table);

}  // namespace hypsob
