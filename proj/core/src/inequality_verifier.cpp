#include "hypsob/inequality_verifier.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/hyperbolic_geometry.hpp"
#include "hypsob/special_constants.hpp"

namespace hypsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_range(InequalityId id, const Params& params) {
  if (!in_range(id, params)) {
    throw DomainError(fmt::format("{}: requires {} (got {})", to_string(id), range_description(id), params.describe()));
  }
}

// x^a with first-order error propagation.
Measured power_of(const Measured& x, double a) {
  if (x.value == 0.0) return {0.0, 0.0, x.converged};
  const double y = std::pow(x.value, a);
  return {y, std::abs(a * y / x.value) * x.error, x.converged};
}

DeficitReport finish(DeficitReport report, const RadialProfile& v, bool converged) {
  report.profile = v.name();
  if (v.has_jumps()) report.add_flag(ReportFlag::step_profile);
  if (!converged) report.add_flag(ReportFlag::not_converged);
  if (report.deficit != 0.0 && std::abs(report.deficit) < 1e-6 * report.scale()) {
    report.add_flag(ReportFlag::cancellation);
  }
  if (report.power > 0.0 && std::isfinite(report.lhs) && std::isfinite(report.rhs) && report.lhs >= 0.0 &&
      report.rhs >= 0.0) {
    report.add_diagnostic("lhs_root", std::pow(report.lhs, 1.0 / report.power));
    report.add_diagnostic("rhs_root", std::pow(report.rhs, 1.0 / report.power));
  }
  return report;
}

DeficitReport zero_report(InequalityId id, const Params& params, const RadialProfile& v, double power) {
  auto report = DeficitReport::make(id, params, 0.0, 0.0, 0.0, power);
  report.profile = v.name();
  return report;
}

// End of the support of v: the first grid node with value 0, or the compact
// tail end. Infinite support is not admissible.
double support_volume(const RadialProfile& v, InequalityId id) {
  double end = v.support_end();
  for (const auto& seg : v.segments()) {
    for (std::size_t i = 0; i < seg.s.size(); ++i) {
      if (seg.v[i] == 0.0) {
        end = std::min(end, seg.s[i]);
        break;
      }
    }
  }
  if (!std::isfinite(end)) {
    throw AdmissibilityError(fmt::format("{}: profile {} does not have compact support (tail {})", to_string(id),
                                         v.name().empty() ? "<unnamed>" : v.name(), v.tail().describe()));
  }
  return end;
}

}  // namespace

std::string to_string(PoincareWeight weight) { return weight == PoincareWeight::over_p ? "over_p" : "over_n"; }

PoincareWeight poincare_weight_from_string(const std::string& text) {
  if (text == "over_p") return PoincareWeight::over_p;
  if (text == "over_n") return PoincareWeight::over_n;
  throw DomainError("unknown Poincaré weight '" + text + "' (expected over_p or over_n)");
}

std::string to_string(LogConstant constant) { return constant == LogConstant::displayed ? "displayed" : "sharp"; }

LogConstant log_constant_from_string(const std::string& text) {
  if (text == "displayed") return LogConstant::displayed;
  if (text == "sharp") return LogConstant::sharp;
  throw DomainError("unknown log-Sobolev constant '" + text + "' (expected displayed or sharp)");
}

Measured poincare_deficit(const RadialProfile& v, int n, double p, const QuadratureConfig& cfg, double weight_scale) {
  const auto grad = grad_norm_hyperbolic(v, n, p, cfg);
  const auto vp = lp_integral(v, p, cfg);
  const double c = std::pow(weight_scale * (n - 1) / p, p);
  return {grad.value - c * vp.value, grad.error + c * vp.error, grad.converged && vp.converged};
}

bool in_range(InequalityId id, const Params& params) {
  const int n = params.n;
  const double p = params.p;
  switch (id) {
    case InequalityId::key_comparison:
      return n == 2 ? p >= 2.0 : p >= Params::lemma_boundary(n);
    case InequalityId::poincare_sobolev:
    case InequalityId::log_sobolev:
      return params.poincare_sobolev_range();
    case InequalityId::gagliardo_nirenberg:
      return params.poincare_sobolev_range() && params.alpha.has_value();
    case InequalityId::morrey_sobolev:
    case InequalityId::linfty_inequality:
    case InequalityId::euclidean_morrey:
      return params.morrey_range();
    case InequalityId::mugelli_talenti_sum:
      return p >= 1.0 && p < n;
    case InequalityId::euclidean_sobolev:
      return params.sobolev_range();
  }
  return false;
}

std::string range_description(InequalityId id) {
  switch (id) {
    case InequalityId::key_comparison:
      return "p >= 2 if n = 2, p >= 2n/(n-1) if n >= 3";
    case InequalityId::poincare_sobolev:
    case InequalityId::log_sobolev:
      return "n >= 4, 2n/(n-1) <= p < n";
    case InequalityId::gagliardo_nirenberg:
      return "n >= 4, 2n/(n-1) <= p < n and alpha in (0, n/(n-p)], alpha != 1";
    case InequalityId::morrey_sobolev:
    case InequalityId::linfty_inequality:
    case InequalityId::euclidean_morrey:
      return "n >= 2, p > n";
    case InequalityId::mugelli_talenti_sum:
      return "n >= 2, 1 <= p < n";
    case InequalityId::euclidean_sobolev:
      return "1 < p < n";
  }
  return {};
}

DeficitReport poincare_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::poincare_sobolev;
  require_range(id, params);
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, p);
  const auto pd = poincare_deficit(v, params.n, p, opts.quadrature);
  const auto crit = power_of(lp_integral(v, params.critical_exponent(), opts.quadrature), p / params.critical_exponent());
  const double c = std::pow(opts.constant_scale * sobolev_constant(params), p);
  auto report = DeficitReport::make(id, params, pd.value, c * crit.value, pd.error + c * crit.error, p);
  return finish(std::move(report), v, pd.converged && crit.converged);
}

DeficitReport gagliardo_nirenberg(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::gagliardo_nirenberg;
  require_range(id, params);
  const double p = params.p;
  const double alpha = *params.alpha;
  const auto branch = gn_branch_for(params);
  if (v.is_zero()) return zero_report(id, params, v, p);
  const double theta = gn_theta(params, branch);
  const double q_main = branch == GnBranch::alpha_above_one ? alpha * p : alpha * (p - 1.0) + 1.0;
  const double q_sec = branch == GnBranch::alpha_above_one ? alpha * (p - 1.0) + 1.0 : alpha * p;
  const auto pd = poincare_deficit(v, params.n, p, opts.quadrature);
  const auto main = power_of(lp_integral(v, q_main, opts.quadrature), p / q_main);
  Measured lhs = power_of(pd, theta);
  bool converged = pd.converged && main.converged;
  if (theta != 1.0) {
    const auto sec = power_of(lp_integral(v, q_sec, opts.quadrature), p * (1.0 - theta) / q_sec);
    converged = converged && sec.converged;
    lhs = {lhs.value * sec.value, lhs.error * sec.value + lhs.value * sec.error, converged};
  }
  const double c = std::pow(opts.constant_scale / gn_constant(params, branch), p);
  auto report = DeficitReport::make(id, params, lhs.value, c * main.value, lhs.error + c * main.error, p);
  report.add_diagnostic("theta", theta);
  return finish(std::move(report), v, converged);
}

DeficitReport morrey_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::morrey_sobolev;
  require_range(id, params);
  const int n = params.n;
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, p);
  const double support = support_volume(v, id);
  const auto pd = poincare_deficit(v, n, p, opts.quadrature);
  const double c = std::pow(morrey_constant(params) / opts.constant_scale, p) * std::pow(support, (p - n) / n);
  auto report = DeficitReport::make(id, params, c * pd.value, std::pow(v.value_at_zero(), p), c * pd.error, p);
  report.add_diagnostic("support_volume", support);
  return finish(std::move(report), v, pd.converged);
}

DeficitReport log_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::log_sobolev;
  require_range(id, params);
  const int n = params.n;
  const double p = params.p;
  if (v.is_zero()) throw AdmissibilityError("log_sobolev: the zero profile cannot be normalized");
  const auto vp = lp_integral(v, p, opts.quadrature);
  const double weight = opts.log_weight == PoincareWeight::over_p ? 1.0 : p / n;
  const auto pd = poincare_deficit(v, n, p, opts.quadrature, weight);
  if (!(pd.value > 0.0)) {
    throw EvaluationError(fmt::format("log_sobolev: non-positive Poincaré term {:.17g} for profile {}", pd.value,
                                      v.name()));
  }
  const auto entropy = integrate_measure_line(
      [&](double s) {
        const double x = v.value(s);
        if (x == 0.0) return 0.0;
        return p * std::pow(x, p) * std::log(x);
      },
      v, opts.quadrature);
  const double mass = vp.value;
  const double constant = opts.log_constant == LogConstant::displayed ? log_sobolev_constant(params)
                                                                       : euclidean_log_sobolev_constant(params);
  // Normalized: PD(v / ||v||_p) = PD / mass, entropy = E / mass - ln(mass).
  const double lhs = (n / p) * std::log(constant / opts.constant_scale * pd.value / mass);
  const double rhs = entropy.value / mass - std::log(mass);
  const double err = (n / p) * (pd.error / pd.value + vp.error / mass) + entropy.error / mass +
                     (std::abs(entropy.value) / mass + 1.0) * vp.error / mass;
  auto report = DeficitReport::make(id, params, lhs, rhs, err, 0.0);
  report.add_diagnostic("normalization", std::pow(mass, 1.0 / p));
  return finish(std::move(report), v, pd.converged && vp.converged && entropy.converged);
}

DeficitReport mugelli_talenti_sum(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::mugelli_talenti_sum;
  require_range(id, params);
  const int n = params.n;
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, n);
  if (p == 1.0 && !v.has_closure()) {
    throw AdmissibilityError("mugelli_talenti_sum: p = 1 needs a profile with an analytic closure");
  }
  const double crit_exp = n * p / (n - p);
  const double sharp = p == 1.0 ? isoperimetric_constant(n) : sobolev_constant(params);
  const auto grad = power_of(grad_norm_hyperbolic(v, n, p, opts.quadrature), n / p);
  const auto vp = power_of(lp_integral(v, p, opts.quadrature), n / p);
  const auto crit = power_of(lp_integral(v, crit_exp, opts.quadrature), (n - p) / p);
  const double a = std::pow((n - 1) / p, n);
  const double b = std::pow(opts.constant_scale * sharp, n);
  const double rhs = a * vp.value + b * crit.value;
  auto report = DeficitReport::make(id, params, grad.value, rhs, grad.error + a * vp.error + b * crit.error, n);
  return finish(std::move(report), v, grad.converged && vp.converged && crit.converged);
}

DeficitReport linfty_inequality(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::linfty_inequality;
  require_range(id, params);
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, p);
  const auto grad = grad_norm_hyperbolic(v, params.n, p, opts.quadrature);
  const double c = std::pow(linfty_constant(params) / opts.constant_scale, p);
  auto report = DeficitReport::make(id, params, c * grad.value, std::pow(v.value_at_zero(), p), c * grad.error, p);
  return finish(std::move(report), v, grad.converged);
}

DeficitReport euclidean_sobolev(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::euclidean_sobolev;
  require_range(id, params);
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, p);
  const auto grad = grad_norm_euclidean(v, params.n, p, opts.quadrature);
  const auto crit = power_of(lp_integral(v, params.critical_exponent(), opts.quadrature), p / params.critical_exponent());
  const double c = std::pow(opts.constant_scale * sobolev_constant(params), p);
  auto report = DeficitReport::make(id, params, grad.value, c * crit.value, grad.error + c * crit.error, p);
  return finish(std::move(report), v, grad.converged && crit.converged);
}

DeficitReport euclidean_morrey(const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const auto id = InequalityId::euclidean_morrey;
  require_range(id, params);
  const int n = params.n;
  const double p = params.p;
  if (v.is_zero()) return zero_report(id, params, v, p);
  const double support = support_volume(v, id);
  const auto grad = grad_norm_euclidean(v, n, p, opts.quadrature);
  const double c = std::pow(morrey_constant(params) / opts.constant_scale, p) * std::pow(support, (p - n) / n);
  auto report = DeficitReport::make(id, params, c * grad.value, std::pow(v.value_at_zero(), p), c * grad.error, p);
  report.add_diagnostic("support_volume", support);
  return finish(std::move(report), v, grad.converged);
}

DeficitReport evaluate(InequalityId id, const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  switch (id) {
    case InequalityId::key_comparison:
      return key_comparison(v, params, opts.quadrature, opts.constant_scale);
    case InequalityId::poincare_sobolev:
      return poincare_sobolev(v, params, opts);
    case InequalityId::gagliardo_nirenberg:
      return gagliardo_nirenberg(v, params, opts);
    case InequalityId::morrey_sobolev:
      return morrey_sobolev(v, params, opts);
    case InequalityId::log_sobolev:
      return log_sobolev(v, params, opts);
    case InequalityId::mugelli_talenti_sum:
      return mugelli_talenti_sum(v, params, opts);
    case InequalityId::linfty_inequality:
      return linfty_inequality(v, params, opts);
    case InequalityId::euclidean_sobolev:
      return euclidean_sobolev(v, params, opts);
    case InequalityId::euclidean_morrey:
      return euclidean_morrey(v, params, opts);
  }
  throw DomainError("evaluate: unknown inequality");
}

DeficitReport evaluate_guarded(InequalityId id, const RadialProfile& v, const Params& params,
                               const VerifierOptions& opts) {
  require_range(id, params);
  try {
    return evaluate(id, v, params, opts);
  } catch (const DivergenceError& e) {
    auto report = DeficitReport::skipped(id, params, ReportFlag::divergent, e.what());
    report.profile = v.name();
    return report;
  } catch (const AdmissibilityError& e) {
    auto report = DeficitReport::skipped(id, params, ReportFlag::outside_range, e.what());
    report.profile = v.name();
    return report;
  }
}

RadialProfile extremal_linfty_profile(int n, double p, const GridSpec& grid) {
  if (n < 2 || !(p > n)) throw DomainError("extremal_linfty_profile: requires p > n (the defining integral diverges)");
  const double sigma = unit_ball_volume(n);
  const auto& map = volume_map(n);
  const double a = static_cast<double>(n - 1) / (p - 1.0);
  const std::vector<double> s = grid.nodes(sigma);
  const std::size_t count = s.size();

  QuadratureConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-300;
  auto direct = [a](double x) { return std::exp(-a * log_sinh(x)); };
  // With y = x^{1-a} the integrand x^{-a} (x / sinh x)^a dx loses its singularity.
  auto substituted = [a](double y) {
    if (y == 0.0) return 1.0 / (1.0 - a);
    const double x = std::pow(y, 1.0 / (1.0 - a));
    return std::exp(a * (std::log(x) - log_sinh(x))) / (1.0 - a);
  };
  auto piece = [&](double lo, double hi) {
    double total = 0.0;
    if (lo < 1.0) {
      const double top = std::min(hi, 1.0);
      total += integrate(substituted, std::pow(lo, 1.0 - a), std::pow(top, 1.0 - a), cfg).value;
    }
    if (hi > 1.0) total += integrate(direct, std::max(lo, 1.0), hi, cfg).value;
    return total;
  };

  std::vector<double> rho(count);
  for (std::size_t i = 0; i < count; ++i) rho[i] = map.phi_inv(s[i] / sigma);
  std::vector<double> v(count);
  // Panels of doubling width in units of the decay length 1/a.
  double tail = 0.0;
  for (double x0 = std::max(rho.back(), 1.0), w = 1.0 / a; x0 < 1e4; x0 += w, w *= 2.0) {
    const double part = integrate(direct, x0, x0 + w, cfg).value;
    tail += part;
    if (part <= 1e-17 * tail) break;
  }
  if (rho.back() < 1.0) tail += piece(rho.back(), 1.0);
  double acc = tail;
  v[count - 1] = n * sigma * acc;
  for (std::size_t i = count - 1; i-- > 0;) {
    acc += piece(rho[i], rho[i + 1]);
    v[i] = n * sigma * acc;
  }
  const double exponent = p / (p - 1.0);
  auto slope = [n, exponent](double x) { return x <= 0.0 ? -kInf : -std::exp(-exponent * log_l_function(n, x)); };
  std::vector<double> slopes(count);
  for (std::size_t i = 1; i < count; ++i) slopes[i] = slope(s[i]);
  slopes[0] = (v[1] - v[0]) / s[1];
  const Tail decay{TailKind::power, 1.0 / (p - 1.0)};
  const auto sampled = RadialProfile::from_samples(s, v, decay, "linfty_extremal", slopes);

  RadialProfile::Analytic spec;
  spec.value = [sampled](double x) { return sampled.value(x); };
  spec.slope = slope;
  spec.tail = decay;
  spec.scale_hints = {sigma};
  spec.name = "linfty_extremal";
  return RadialProfile::analytic(std::move(spec));
}

RadialProfile aubin_talenti_profile(int n, double p, double lambda) {
  if (!(p > 1.0 && p < n)) throw DomainError("aubin_talenti_profile: requires 1 < p < n");
  if (!(lambda > 0.0)) throw DomainError("aubin_talenti_profile: lambda must be > 0");
  const double scale = unit_ball_volume(n) * std::pow(lambda, n);
  const double beta = p / ((p - 1.0) * n);
  const double e = (n - p) / p;
  RadialProfile::Analytic spec;
  spec.value = [=](double s) { return std::exp(-e * std::log1p(std::pow(s / scale, beta))); };
  spec.slope = [=](double s) {
    if (s <= 0.0) return beta < 1.0 ? -kInf : (beta == 1.0 ? -e / scale : 0.0);
    const double ly = std::log(s / scale);
    return -std::exp(std::log(e * beta / scale) + (beta - 1.0) * ly - (e + 1.0) * std::log1p(std::exp(beta * ly)));
  };
  spec.tail = Tail{TailKind::power, beta * e};
  spec.scale_hints = {scale};
  spec.name = fmt::format("aubin_talenti_{}", lambda);
  return RadialProfile::analytic(std::move(spec));
}

RadialProfile morrey_extremal_profile(int n, double p) {
  if (!(p > n)) throw DomainError("morrey_extremal_profile: requires p > n");
  const double sigma = unit_ball_volume(n);
  const double kappa = (p - n) / ((p - 1.0) * n);
  RadialProfile::Analytic spec;
  spec.value = [=](double s) { return s >= sigma ? 0.0 : 1.0 - std::pow(s / sigma, kappa); };
  spec.slope = [=](double s) {
    if (s >= sigma) return 0.0;
    if (s <= 0.0) return -kInf;
    return -kappa * std::pow(s / sigma, kappa - 1.0) / sigma;
  };
  spec.tail = Tail{TailKind::compact, sigma};
  spec.name = "morrey_extremal";
  return RadialProfile::analytic(std::move(spec));
}

}  // namespace hypsob
