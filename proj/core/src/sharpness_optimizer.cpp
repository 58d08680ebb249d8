#include "hypsob/sharpness_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/output.hpp"
#include "hypsob/special_constants.hpp"

namespace hypsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cutoff(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  const double y = 2.0 * x - 1.0;
  return 1.0 - y * y * (3.0 - 2.0 * y);
}

// d/dx cutoff(x)
double cutoff_slope(double x) {
  if (x <= 0.5 || x >= 1.0) return 0.0;
  const double y = 2.0 * x - 1.0;
  return 12.0 * y * (y - 1.0);
}

}  // namespace

std::string to_string(FamilyId id) {
  switch (id) {
    case FamilyId::truncated_bubble:
      return "truncated_bubble";
    case FamilyId::tent:
      return "tent";
    case FamilyId::exponential:
      return "exponential";
    case FamilyId::custom:
      return "custom";
  }
  return "unknown";
}

FamilyId family_from_string(const std::string& text) {
  for (auto id : {FamilyId::truncated_bubble, FamilyId::tent, FamilyId::exponential, FamilyId::custom}) {
    if (to_string(id) == text) return id;
  }
  throw DomainError("unknown family '" + text + "' (expected truncated_bubble, tent, exponential or custom)");
}

RadialProfile truncated_bubble(int n, double p, double lambda, double truncation) {
  if (!(lambda > 0.0) || !(truncation > 0.0)) throw DomainError("truncated_bubble: lambda and T must be > 0");
  const auto bubble = aubin_talenti_profile(n, p, lambda);
  const double scale = unit_ball_volume(n) * std::pow(lambda, n);
  const double t = truncation;
  RadialProfile::Analytic spec;
  spec.value = [bubble, t](double s) { return s >= t ? 0.0 : bubble.value(s) * cutoff(s / t); };
  spec.slope = [bubble, t](double s) {
    if (s >= t) return 0.0;
    const double c = cutoff(s / t);
    const double d = bubble.slope(s) * c;
    const double dc = cutoff_slope(s / t);
    return dc == 0.0 ? d : d + bubble.value(s) * dc / t;
  };
  spec.tail = Tail{TailKind::compact, t};
  spec.breakpoints = {0.5 * t};
  if (scale < t) spec.scale_hints = {scale};
  spec.name = fmt::format("truncated_bubble_{}_{}", lambda, truncation);
  return RadialProfile::analytic(std::move(spec));
}

RadialProfile tent_profile(double width) {
  if (!(width > 0.0)) throw DomainError("tent_profile: width must be > 0");
  RadialProfile::Analytic spec;
  spec.value = [width](double s) { return s >= width ? 0.0 : 1.0 - s / width; };
  spec.slope = [width](double s) { return s >= width ? 0.0 : -1.0 / width; };
  spec.tail = Tail{TailKind::compact, width};
  spec.name = fmt::format("tent_{}", width);
  return RadialProfile::analytic(std::move(spec));
}

RadialProfile exponential_profile(double width) {
  if (!(width > 0.0)) throw DomainError("exponential_profile: width must be > 0");
  RadialProfile::Analytic spec;
  spec.value = [width](double s) { return std::exp(-s / width); };
  spec.slope = [width](double s) { return -std::exp(-s / width) / width; };
  spec.tail = Tail{TailKind::exponential, 1.0 / width};
  spec.scale_hints = {width};
  spec.name = fmt::format("exponential_{}", width);
  return RadialProfile::analytic(std::move(spec));
}

TestFamily TestFamily::truncated_bubble(int n, double p) {
  TestFamily f;
  f.id = FamilyId::truncated_bubble;
  f.parameter_names = {"lambda", "T"};
  f.start = {1.0, 1.0};
  f.lower = {1e-6, 0.1};
  f.upper = {10.0, 10.0};
  f.generate = [n, p](const std::vector<double>& x) { return hypsob::truncated_bubble(n, p, x[0], x[1]); };
  return f;
}

TestFamily TestFamily::tent() {
  TestFamily f;
  f.id = FamilyId::tent;
  f.parameter_names = {"A"};
  f.start = {1.0};
  f.lower = {1e-6};
  f.upper = {1e3};
  f.generate = [](const std::vector<double>& x) { return tent_profile(x[0]); };
  return f;
}

TestFamily TestFamily::exponential() {
  TestFamily f = tent();
  f.id = FamilyId::exponential;
  f.generate = [](const std::vector<double>& x) { return exponential_profile(x[0]); };
  return f;
}

TestFamily TestFamily::custom(std::vector<std::string> names, std::vector<double> start, std::vector<double> lower,
                              std::vector<double> upper,
                              std::function<RadialProfile(const std::vector<double>&)> generate) {
  TestFamily f;
  f.id = FamilyId::custom;
  f.parameter_names = std::move(names);
  f.start = std::move(start);
  f.lower = std::move(lower);
  f.upper = std::move(upper);
  f.generate = std::move(generate);
  f.validate();
  return f;
}

void TestFamily::validate() const {
  const std::size_t d = parameter_names.size();
  if (d == 0) throw DomainError("TestFamily: needs at least one parameter");
  if (start.size() != d || lower.size() != d || upper.size() != d) {
    throw DomainError("TestFamily: start, lower and upper must match the parameter count");
  }
  if (!generate) throw DomainError("TestFamily: missing generator");
  for (std::size_t i = 0; i < d; ++i) {
    if (!(lower[i] > 0.0) || !(upper[i] >= lower[i]) || !(start[i] >= lower[i] && start[i] <= upper[i])) {
      throw DomainError(fmt::format("TestFamily: parameter {} needs 0 < lower <= start <= upper", parameter_names[i]));
    }
  }
}

double target_constant(InequalityId id, const Params& params, const VerifierOptions& opts) {
  switch (id) {
    case InequalityId::poincare_sobolev:
    case InequalityId::euclidean_sobolev:
      return std::pow(opts.constant_scale * sobolev_constant(params), params.p);
    case InequalityId::log_sobolev:
      throw DomainError("the logarithmic inequality has no ratio form");
    default:
      return 1.0;
  }
}

double deficit_ratio(InequalityId id, const RadialProfile& v, const Params& params, const VerifierOptions& opts) {
  const double target = target_constant(id, params, opts);
  if (v.is_zero()) throw DomainError("deficit_ratio: zero profile");
  const auto report = evaluate(id, v, params, opts);
  return report.lhs / report.rhs * target;
}

SharpnessResult minimize_ratio(InequalityId id, const Params& params, const TestFamily& family,
                               const SearchSpec& spec) {
  family.validate();
  if (id == InequalityId::log_sobolev) throw DomainError("minimize_ratio: the logarithmic inequality has no ratio form");
  if (family.id == FamilyId::truncated_bubble && !params.sobolev_range()) {
    throw DomainError("minimize_ratio: the truncated bubble needs 1 < p < n");
  }
  if (!in_range(id, params)) {
    throw DomainError(fmt::format("minimize_ratio: {} requires {}", to_string(id), range_description(id)));
  }
  const std::size_t d = family.dimension();
  std::vector<double> start = spec.start.empty() ? family.start : spec.start;
  if (start.size() != d) throw DomainError("minimize_ratio: start has the wrong dimension");

  SharpnessResult result;
  result.inequality_id = id;
  result.family_id = family.id;
  result.params = params;
  result.parameter_names = family.parameter_names;
  result.target = target_constant(id, params, spec.verifier);

  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::log(family.lower[i]);
    hi[i] = std::log(family.upper[i]);
    start[i] = std::clamp(std::log(start[i]), lo[i], hi[i]);
  }
  auto clamp = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  };
  auto to_params = [&](const std::vector<double>& x) {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
      // exp(log(b)) can miss b by an ulp; keep bounds exact
      out[i] = x[i] <= lo[i] ? family.lower[i] : x[i] >= hi[i] ? family.upper[i] : std::exp(x[i]);
    }
    return out;
  };
  auto objective = [&](const std::vector<double>& x) {
    ++result.evaluations;
    try {
      const double r = deficit_ratio(id, family.generate(to_params(x)), params, spec.verifier);
      return std::isnan(r) ? kInf : r;
    } catch (const DivergenceError&) {
      return kInf;
    } catch (const AdmissibilityError&) {
      return kInf;
    }
  };

  // Initial simplex: coordinate steps, lengths jittered by the seed.
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<double>> simplex{start};
  for (std::size_t i = 0; i < d; ++i) {
    auto x = start;
    const double jitter = 1.0 + 0.1 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    double step = spec.initial_step * jitter;
    if (x[i] + step > hi[i]) step = -step;
    x[i] = std::clamp(x[i] + step, lo[i], hi[i]);
    simplex.push_back(x);
  }
  std::vector<double> values;
  for (const auto& x : simplex) values.push_back(objective(x));

  auto order = [&]() {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s;
    std::vector<double> v;
    for (auto k : idx) {
      s.push_back(simplex[k]);
      v.push_back(values[k]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  auto record = [&](int iteration) {
    result.trace.push_back({iteration, to_params(simplex[0]), values[0], values[0] - result.target});
  };

  order();
  record(0);
  int iteration = 0;
  while (result.evaluations < spec.max_evaluations) {
    double diameter = 0.0;
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[0][i]));
    }
    const double spread = values.back() - values.front();
    if (diameter <= spec.x_tol || (std::isfinite(spread) && spread <= spec.f_tol * std::abs(values.front()))) {
      result.converged = true;
      break;
    }
    ++iteration;
    std::vector<double> centroid(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[k][i] / d;
    }
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = centroid[i] + t * (simplex[d][i] - centroid[i]);
      return clamp(x);
    };
    const auto xr = along(-1.0);
    const double fr = objective(xr);
    if (fr < values[0]) {
      const auto xe = along(-2.0);
      const double fe = objective(xe);
      if (fe < fr) {
        simplex[d] = xe;
        values[d] = fe;
      } else {
        simplex[d] = xr;
        values[d] = fr;
      }
    } else if (fr < values[d - 1]) {
      simplex[d] = xr;
      values[d] = fr;
    } else {
      const bool outside = fr < values[d];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = objective(xc);
      if (fc < (outside ? fr : values[d])) {
        simplex[d] = xc;
        values[d] = fc;
      } else {
        for (std::size_t k = 1; k <= d; ++k) {
          for (std::size_t i = 0; i < d; ++i) simplex[k][i] = simplex[0][i] + 0.5 * (simplex[k][i] - simplex[0][i]);
          values[k] = objective(simplex[k]);
        }
      }
    }
    order();
    record(iteration);
  }
  result.best_parameters = to_params(simplex[0]);
  result.best_ratio = values[0];
  result.gap = result.best_ratio - result.target;
  return result;
}

TrendResult concentration_trend(InequalityId id, const Params& params, const std::vector<double>& lambdas,
                                double truncation, const VerifierOptions& opts, double gap_max, int extra_steps) {
  if (!params.sobolev_range()) throw DomainError("concentration_trend: the truncated bubble needs 1 < p < n");
  if (lambdas.empty()) throw DomainError("concentration_trend: no lambdas");
  TrendResult trend;
  trend.lambdas = lambdas;
  trend.requested = lambdas.size();
  trend.truncation = truncation;
  trend.gap_max = gap_max;
  trend.target = target_constant(id, params, opts);
  auto ratio_at = [&](double lambda) {
    return deficit_ratio(id, truncated_bubble(params.n, params.p, lambda, truncation), params, opts);
  };
  for (double lambda : lambdas) trend.ratios.push_back(ratio_at(lambda));
  auto gap = [&]() { return (trend.ratios.back() - trend.target) / trend.target; };
  if (lambdas.size() >= 2) {
    const double factor = lambdas[lambdas.size() - 1] / lambdas[lambdas.size() - 2];
    for (int k = 0; k < extra_steps && gap() > gap_max && factor < 1.0; ++k) {
      trend.lambdas.push_back(trend.lambdas.back() * factor);
      trend.ratios.push_back(ratio_at(trend.lambdas.back()));
      trend.extended = true;
    }
  }
  bool descending = trend.lambdas.size() >= 4;
  for (std::size_t i = 1; i < trend.lambdas.size(); ++i) {
    descending = descending && trend.lambdas[i] < trend.lambdas[i - 1];
  }
  trend.monotone = descending;
  for (std::size_t i = 1; i < trend.ratios.size(); ++i) {
    trend.monotone = trend.monotone && trend.ratios[i] < trend.ratios[i - 1];
  }
  trend.above_target = std::all_of(trend.ratios.begin(), trend.ratios.end(),
                                   [&](double r) { return r >= trend.target * (1.0 - 1e-6); });
  trend.final_relative_gap = gap();
  trend.passed = trend.monotone && trend.above_target && trend.final_relative_gap <= gap_max;
  return trend;
}

NonAttainmentReport non_attainment_scan(InequalityId id, const Params& params,
                                        const std::vector<RadialProfile>& corpus, const VerifierOptions& opts) {
  NonAttainmentReport out;
  out.min_deficit = kInf;
  out.min_relative_margin = kInf;
  for (const auto& v : corpus) {
    if (v.is_zero()) {
      ++out.skipped;
      continue;
    }
    auto report = evaluate_guarded(id, v, params, opts);
    if (!report.evaluated()) {
      ++out.skipped;
      out.reports.push_back(std::move(report));
      continue;
    }
    if (!(report.deficit > 10.0 * report.quadrature_error) || !(report.deficit > 0.0)) {
      out.failures.push_back(v.name());
    }
    if (report.deficit < out.min_deficit) {
      out.min_deficit = report.deficit;
      out.min_profile = v.name();
    }
    out.min_relative_margin = std::min(out.min_relative_margin, report.relative_margin);
    out.reports.push_back(std::move(report));
  }
  return out;
}

std::string trace_to_csv(const SharpnessResult& result) {
  std::string out = "iteration";
  for (const auto& name : result.parameter_names) out += "," + csv_cell(name);
  out += ",ratio,gap\n";
  for (const auto& point : result.trace) {
    out += std::to_string(point.iteration);
    for (double x : point.parameters) out += "," + format_number(x);
    out += "," + format_number(point.ratio) + "," + format_number(point.gap) + "\n";
  }
  return out;
}

namespace {

void write_trend(JsonWriter& w, const TrendResult& t) {
  w.begin_object();
  w.field("truncation", t.truncation);
  w.field("requested", static_cast<int>(t.requested));
  w.field("extended", t.extended);
  w.key("lambdas").begin_array();
  for (double x : t.lambdas) w.value(x);
  w.end_array();
  w.key("ratios").begin_array();
  for (double x : t.ratios) w.value(x);
  w.end_array();
  w.field("target", t.target);
  w.field("monotone", t.monotone);
  w.field("above_target", t.above_target);
  w.field("final_relative_gap", t.final_relative_gap);
  w.field("gap_max", t.gap_max);
  w.field("passed", t.passed);
  w.end_object();
}

}  // namespace

std::string to_json(const TrendResult& trend) {
  JsonWriter w;
  write_trend(w, trend);
  return w.str();
}

std::string to_json(const SharpnessResult& r) {
  JsonWriter w;
  w.begin_object();
  w.field("inequality_id", to_string(r.inequality_id));
  w.field("family_id", to_string(r.family_id));
  w.key("params").begin_object();
  w.field("n", r.params.n);
  w.field("p", r.params.p);
  w.key("alpha");
  if (r.params.alpha) {
    w.value(*r.params.alpha);
  } else {
    w.null();
  }
  w.end_object();
  w.key("best_parameters").begin_object();
  for (std::size_t i = 0; i < r.parameter_names.size() && i < r.best_parameters.size(); ++i) {
    w.field(r.parameter_names[i], r.best_parameters[i]);
  }
  w.end_object();
  w.field("best_ratio", r.best_ratio);
  w.field("target_constant", r.target);
  w.field("gap", r.gap);
  w.field("relative_gap", r.relative_gap());
  w.field("evaluations", r.evaluations);
  w.field("iterations", static_cast<int>(r.trace.empty() ? 0 : r.trace.back().iteration));
  w.field("converged", r.converged);
  w.key("trend");
  if (r.trend) {
    write_trend(w, *r.trend);
  } else {
    w.null();
  }
  w.end_object();
  return w.str();
}

}  // namespace hypsob
