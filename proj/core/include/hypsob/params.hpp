#pragma once

#include <optional>
#include <string>

namespace hypsob {

/// Dimension/exponent pair shared by every inequality, plus the optional
/// Gagliardo–Nirenberg interpolation parameter.
///
/// Construction only enforces the global invariants (n >= 2, p >= 1, alpha in
/// (0, n/(n-p)] and != 1 when present). Each operation checks its own
/// sub-range through the predicates below. p == 1 is admitted solely for the
/// total-variation limit of the Mugelli–Talenti sum.
struct Params {
  int n = 2;
  double p = 2.0;
  std::optional<double> alpha;

  Params() = default;
  Params(int n_, double p_, std::optional<double> alpha_ = std::nullopt);

  /// 2n/(n-1) for n >= 3, 2 for n == 2: the smallest p for which the
  /// pointwise gradient-weight bound holds.
  static double lemma_boundary(int n);

  double critical_exponent() const;  ///< p* = np/(n-p), requires p < n
  double alpha_max() const;          ///< n/(n-p), requires p < n

  bool sobolev_range() const { return p > 1.0 && p < n; }
  bool lemma_range() const { return p >= lemma_boundary(n); }
  /// n >= 4, 2n/(n-1) <= p < n.
  bool poincare_sobolev_range() const { return n >= 4 && lemma_range() && p < n; }
  bool morrey_range() const { return p > n; }

  std::string describe() const;
};

enum class GnBranch { alpha_above_one, alpha_below_one };

/// Branch implied by alpha; throws DomainError when alpha is absent or 1.
GnBranch gn_branch_for(const Params& params);

}  // namespace hypsob
