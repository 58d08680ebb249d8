#include "hypsob/special_constants.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "hypsob/error.hpp"

namespace hypsob {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double z, Summation summation) {
  // z = x - 1
  if (summation == Summation::plain) {
    double sum = kLanczosCoefficients[0];
    for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
      sum += kLanczosCoefficients[i] / (z + static_cast<double>(i));
    }
    return sum;
  }
  double sum = kLanczosCoefficients[0];
  double carry = 0.0;
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    const double term = kLanczosCoefficients[i] / (z + static_cast<double>(i));
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double lanczos_gamma(double x, Summation summation) {
  if (x < 0.5) {
    // Reflection keeps the series in its accurate half-plane.
    return std::numbers::pi /
           (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x, summation));
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  const double series = lanczos_series(z, summation);
  // t^{z+1/2} e^{-t}, split in two halves so large x does not overflow early.
  const double half_power = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_power * (half_power * std::exp(-t)) * series;
}

void require(bool condition, const char* message) {
  if (!condition) throw DomainError(message);
}

}  // namespace

double gamma(double x, Summation summation) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
  if (x == std::floor(x) && x <= 21.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  return lanczos_gamma(x, summation);
}

double unit_ball_volume(int n) {
  require(n >= 1, "unit_ball_volume: n must be >= 1");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / gamma(half + 1.0);
}

double sobolev_constant(const Params& params) {
  const double n = params.n;
  const double p = params.p;
  require(p > 1.0 && p < n, "sobolev_constant: requires 1 < p < n");
  const double ratio = gamma(n) / (gamma(n / p) * gamma(n + 1.0 - n / p) * unit_ball_volume(params.n));
  const double inverse =
      (1.0 / n) * std::pow(n * (p - 1.0) / (n - p), 1.0 - 1.0 / p) * std::pow(ratio, 1.0 / n);
  return 1.0 / inverse;
}

double isoperimetric_constant(int n) {
  require(n >= 2, "isoperimetric_constant: n must be >= 2");
  return n * std::pow(unit_ball_volume(n), 1.0 / n);
}

double gn_theta(const Params& params, GnBranch branch) {
  require(params.alpha.has_value(), "gn_theta: alpha is required");
  require(params.p > 1.0 && params.p < params.n, "gn_theta: requires 1 < p < n");
  const double n = params.n;
  const double p = params.p;
  const double a = *params.alpha;
  if (branch == GnBranch::alpha_above_one) {
    require(a > 1.0, "gn_theta: branch alpha>1 needs alpha > 1");
    return n * (a - 1.0) / (a * (n * p - (a * p + 1.0 - a) * (n - p)));
  }
  require(a > 0.0 && a < 1.0, "gn_theta: branch alpha<1 needs 0 < alpha < 1");
  return n * (1.0 - a) / ((a * p + 1.0 - a) * (n - a * (n - p)));
}

double gn_theta(const Params& params) { return gn_theta(params, gn_branch_for(params)); }

double gn_constant(const Params& params, GnBranch branch) {
  const double theta = gn_theta(params, branch);
  const double n = params.n;
  const double p = params.p;
  const double a = *params.alpha;
  const double q = a * (p - 1.0) + 1.0;
  const double delta = n * p - (n - p) * q;
  require(delta > 0.0, "gn_constant: requires delta = np - (n-p)q > 0");
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double n_half = gamma(0.5 * n + 1.0);
  const double n_term = gamma(n * (p - 1.0) / p + 1.0);
  if (branch == GnBranch::alpha_above_one) {
    const double gammas = gamma(q * (p - 1.0) / (q - p)) * n_half /
                          (gamma((p - 1.0) / p * delta / (q - p)) * n_term);
    return std::pow((q - p) / (p * sqrt_pi), theta) *
           std::pow(p * q / (n * (q - p)), theta / p) * std::pow(delta / (p * q), 1.0 / (a * p)) *
           std::pow(gammas, theta / n);
  }
  const double gammas = gamma((p - 1.0) / p * delta / (p - q) + 1.0) * n_half /
                        (gamma(q * (p - 1.0) / (p - q) + 1.0) * n_term);
  return std::pow((p - q) / (p * sqrt_pi), theta) * std::pow(p * q / (n * (p - q)), theta / p) *
         std::pow(p * q / delta, (1.0 - theta) / (a * p)) * std::pow(gammas, theta / n);
}

double gn_constant(const Params& params) { return gn_constant(params, gn_branch_for(params)); }

double morrey_constant(const Params& params) {
  const double n = params.n;
  const double p = params.p;
  require(p > n, "morrey_constant: requires p > n");
  return std::pow(n, -1.0 / p) * std::pow(unit_ball_volume(params.n), -1.0 / n) *
         std::pow((p - 1.0) / (p - n), (p - 1.0) / p);
}

double linfty_constant(const Params& params) {
  const double n = params.n;
  const double p = params.p;
  require(p > n, "linfty_constant: requires p > n");
  const double gammas = gamma((p - n) / (2.0 * (p - 1.0))) * gamma((n - 1.0) / (p - 1.0)) /
                        gamma((p + n - 2.0) / (2.0 * (p - 1.0)));
  return std::pow(std::pow(2.0, n - 1.0) * n * unit_ball_volume(params.n), -1.0 / p) *
         std::pow(gammas, (p - 1.0) / p);
}

namespace {

double log_sobolev_core(const Params& params, double pi_exponent_sign) {
  const double n = params.n;
  const double p = params.p;
  return (p / n) * std::pow((p - 1.0) / std::numbers::e, p - 1.0) *
         std::pow(std::numbers::pi, pi_exponent_sign * 0.5 * p) *
         std::pow(gamma(0.5 * n + 1.0) / gamma(n * (p - 1.0) / p + 1.0), p / n);
}

}  // namespace

double log_sobolev_constant(const Params& params) {
  require(params.poincare_sobolev_range(),
          "log_sobolev_constant: requires n >= 4 and 2n/(n-1) <= p < n");
  return log_sobolev_core(params, +1.0);
}

double euclidean_log_sobolev_constant(const Params& params) {
  require(params.sobolev_range(), "euclidean_log_sobolev_constant: requires 1 < p < n");
  return log_sobolev_core(params, -1.0);
}

}  // namespace hypsob
