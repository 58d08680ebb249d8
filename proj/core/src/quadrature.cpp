#include "hypsob/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "hypsob/error.hpp"

namespace hypsob {

namespace {

// Kronrod abscissae; odd indices are the Gauss 7-point nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Interval {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Interval& other) const { return error < other.error; }
};

IntegrationResult adaptive_finite(const RealFn& f, double a, double b, const QuadratureConfig& cfg) {
  IntegrationResult total;
  if (a == b) return total;
  std::priority_queue<Interval> work;
  std::vector<Interval> frozen;
  auto first = gauss_kronrod15(f, a, b);
  total.evaluations = first.evaluations;
  work.push({a, b, first.value, first.error, 0});
  double value = first.value;
  double error = first.error;
  int intervals = 1;
  while (!work.empty()) {
    const double goal = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (error <= goal) break;
    if (intervals >= cfg.max_intervals) break;
    Interval worst = work.top();
    work.pop();
    if (worst.depth >= cfg.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      frozen.push_back(worst);
      continue;
    }
    auto left = gauss_kronrod15(f, worst.a, mid);
    auto right = gauss_kronrod15(f, mid, worst.b);
    total.evaluations += left.evaluations + right.evaluations;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push({worst.a, mid, left.value, left.error, worst.depth + 1});
    work.push({mid, worst.b, right.value, right.error, worst.depth + 1});
    ++intervals;
  }
  // Re-sum from scratch; the running totals drift after many updates.
  value = 0.0;
  error = 0.0;
  auto accumulate = [&](const Interval& iv) {
    value += iv.value;
    error += iv.error;
  };
  for (const auto& iv : frozen) accumulate(iv);
  while (!work.empty()) {
    accumulate(work.top());
    work.pop();
  }
  total.value = value;
  total.error = error;
  total.converged = error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)) && std::isfinite(value);
  return total;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("QuadratureConfig: rel_tol must be > 0");
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureConfig: abs_tol must be > 0");
  if (max_depth < 1) throw DomainError("QuadratureConfig: max_depth must be >= 1");
  if (!(tail_parameter > 0.0)) throw DomainError("QuadratureConfig: tail_parameter must be > 0");
  if (max_intervals < 1) throw DomainError("QuadratureConfig: max_intervals must be >= 1");
}

IntegrationResult gauss_kronrod15(const RealFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);
  const double fc = f(center);
  double result_gauss = fc * kWg[3];
  double result_kronrod = fc * kWgk[7];
  double result_abs = std::abs(result_kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double lo = f(center - dx);
    const double hi = f(center + dx);
    f1[j] = lo;
    f2[j] = hi;
    result_kronrod += kWgk[j] * (lo + hi);
    result_abs += kWgk[j] * (std::abs(lo) + std::abs(hi));
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (lo + hi);
  }
  const double mean = 0.5 * result_kronrod;
  double result_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  IntegrationResult r;
  r.value = result_kronrod * half;
  result_abs *= abs_half;
  result_asc *= abs_half;
  double err = std::abs((result_kronrod - result_gauss) * half);
  if (result_asc != 0.0 && err != 0.0) err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  if (result_abs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * result_abs, err);
  r.error = err;
  r.evaluations = 15;
  r.converged = std::isfinite(r.value);
  return r;
}

IntegrationResult integrate_adaptive(const RealFn& f, double a, double b, const QuadratureConfig& cfg) {
  cfg.validate();
  if (std::isnan(a) || std::isnan(b) || std::isinf(a)) throw DomainError("integrate: invalid interval");
  if (b < a) {
    auto r = integrate_adaptive(f, b, a, cfg);
    r.value = -r.value;
    return r;
  }
  if (std::isfinite(b)) return adaptive_finite(f, a, b, cfg);

  if (cfg.tail_strategy == TailStrategy::hard_cutoff) {
    return adaptive_finite(f, a, a + cfg.tail_parameter, cfg);
  }
  const double kappa = cfg.tail_parameter;
  auto mapped = [&](double x) {
    const double one_minus = 1.0 - x;
    if (one_minus <= 0.0) return 0.0;
    const double s = a - std::log(one_minus) / kappa;
    const double v = f(s);
    return v == 0.0 ? 0.0 : v / (kappa * one_minus);
  };
  return adaptive_finite(mapped, 0.0, 1.0, cfg);
}

IntegrationResult integrate(const RealFn& f, double a, double b, const QuadratureConfig& cfg) {
  auto r = integrate_adaptive(f, a, b, cfg);
  if (!r.converged) {
    throw ConvergenceError(fmt::format("integrate: tolerance not reached on [{}, {}] (value {:.17g}, error {:.3g})",
                                       a, b, r.value, r.error),
                           r.value, r.error);
  }
  return r;
}

double find_root_increasing(const RealFn& f, double target, double lo, double hi, const RootOptions& options) {
  if (!(lo <= hi)) throw BracketError("find_root_increasing: lo > hi");
  double f_lo = f(lo) - target;
  double f_hi = f(hi) - target;
  if (std::isnan(f_lo) || std::isnan(f_hi)) throw BracketError("find_root_increasing: f is NaN at the bracket ends");
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw BracketError(fmt::format("find_root_increasing: [{:.17g}, {:.17g}] does not bracket target {:.17g}",
                                   lo, hi, target));
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  const double f_stop = options.f_tol * std::max(1.0, std::abs(target));

  double x = 0.5 * (lo + hi);
  int side = 0;  // Illinois bookkeeping: which end was retained last
  for (int it = 0; it < options.max_iterations; ++it) {
    double candidate;
    if (options.derivative) {
      candidate = x;
    } else {
      candidate = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    }
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    const double fx = f(candidate) - target;
    if (fx == 0.0 || std::abs(fx) <= f_stop) return candidate;
    if (fx < 0.0) {
      lo = candidate;
      f_lo = fx;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = candidate;
      f_hi = fx;
      if (side == +1) f_lo *= 0.5;
      side = +1;
    }
    if (hi - lo <= options.x_tol * std::max(std::abs(lo), std::abs(hi)) || hi - lo <= kTiny) {
      return 0.5 * (lo + hi);
    }
    if (options.derivative) {
      const double d = options.derivative(candidate);
      double next = (d > 0.0 && std::isfinite(d)) ? candidate - fx / d : 0.5 * (lo + hi);
      // Newton that is slow to shrink the bracket gets a bisection step.
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
  }
  return 0.5 * (lo + hi);
}

GridDerivative differentiate_grid(const std::vector<double>& x, const std::vector<double>& y,
                                  SignConstraint constraint) {
  const std::size_t m = x.size();
  if (m < 3) throw DomainError("differentiate_grid: need at least 3 nodes");
  if (y.size() != m) throw DomainError("differentiate_grid: size mismatch");
  for (std::size_t i = 1; i < m; ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("differentiate_grid: grid must be strictly increasing");
  }
  GridDerivative out;
  out.slopes.resize(m);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    out.slopes[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] +
                    h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    const double h1 = x[1] - x[0];
    const double h2 = x[2] - x[1];
    out.slopes[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
                    h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = x[m - 2] - x[m - 3];
    const double h2 = x[m - 1] - x[m - 2];
    out.slopes[m - 1] = h2 / (h1 * (h1 + h2)) * y[m - 3] - (h1 + h2) / (h1 * h2) * y[m - 2] +
                        (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y[m - 1];
  }
  if (constraint != SignConstraint::none) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d = out.slopes[i];
      const bool bad = constraint == SignConstraint::non_positive ? d > 0.0 : d < 0.0;
      if (!bad) continue;
      const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
      const double right = i + 1 < m ? x[i + 1] - x[i] : 0.0;
      out.clamped_mass += std::abs(d) * 0.5 * (left + right);
      ++out.clamped_nodes;
      out.slopes[i] = 0.0;
    }
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) throw DomainError("log_grid: need 0 < lo < hi, per_decade >= 1");
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  const auto count = static_cast<std::size_t>(std::ceil((l1 - l0) * per_decade));
  std::vector<double> out;
  out.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    out.push_back(i == count ? hi : std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / count));
  }
  out.front() = lo;
  return out;
}

}  // namespace hypsob
