#include "hypsob/params.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hypsob/error.hpp"

namespace hypsob {

Params::Params(int n_, double p_, std::optional<double> alpha_) : n(n_), p(p_), alpha(alpha_) {
  if (n < 2) throw DomainError("Params: n must be >= 2");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("Params: p must be finite and >= 1");
  if (alpha) {
    if (!(p < n)) throw DomainError("Params: alpha requires p < n");
    const double a = *alpha;
    if (!(a > 0.0) || a > alpha_max() * (1.0 + 1e-14) || a == 1.0) {
      throw DomainError(fmt::format("Params: alpha must lie in (0, n/(n-p)] = (0, {:.17g}] and differ from 1",
                                    alpha_max()));
    }
  }
}

double Params::lemma_boundary(int n) { return n == 2 ? 2.0 : 2.0 * n / (n - 1.0); }

double Params::critical_exponent() const {
  if (!(p < n)) throw DomainError("critical exponent requires p < n");
  return n * p / (n - p);
}

double Params::alpha_max() const {
  if (!(p < n)) throw DomainError("alpha_max requires p < n");
  return n / (n - p);
}

std::string Params::describe() const {
  if (alpha) return fmt::format("n={} p={:.17g} alpha={:.17g}", n, p, *alpha);
  return fmt::format("n={} p={:.17g}", n, p);
}

GnBranch gn_branch_for(const Params& params) {
  if (!params.alpha) throw DomainError("Gagliardo–Nirenberg inequality needs alpha");
  if (*params.alpha > 1.0) return GnBranch::alpha_above_one;
  if (*params.alpha < 1.0) return GnBranch::alpha_below_one;
  throw DomainError("alpha = 1 has no Gagliardo–Nirenberg branch");
}

}  // namespace hypsob
