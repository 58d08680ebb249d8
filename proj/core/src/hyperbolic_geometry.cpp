#include "hypsob/hyperbolic_geometry.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/special_constants.hpp"

namespace hypsob {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kCancellationLimit = 1e6;

void require_dimension(int n) {
  if (n < 2) throw DomainError("dimension n must be >= 2");
}

void require_radius(double t) {
  if (!(t >= 0.0)) throw DomainError("radius must be >= 0");
}

}  // namespace

double ScaledValue::value() const {
  if (mantissa == 0.0) return 0.0;
  return mantissa * std::exp(log_scale);
}

double ScaledValue::log_abs() const {
  if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa)) + log_scale;
}

std::string format_scaled(const ScaledValue& v) {
  if (v.mantissa == 0.0 || !std::isfinite(v.mantissa)) return fmt::format("{:.17g}", v.mantissa);
  const double direct = v.value();
  if (std::isfinite(direct) && direct != 0.0 && std::abs(std::log10(std::abs(direct))) < 290.0) {
    return fmt::format("{:.17g}", direct);
  }
  const double lg = v.log_abs() / std::numbers::ln10;
  double exponent = std::floor(lg);
  double digits = std::pow(10.0, lg - exponent);
  if (digits >= 10.0) {
    digits /= 10.0;
    exponent += 1.0;
  }
  return fmt::format("{}{:.16f}e{:+d}", v.mantissa < 0.0 ? "-" : "", digits, static_cast<long>(exponent));
}

double log_sinh(double t) {
  if (t < 0.0) throw DomainError("log_sinh: argument must be >= 0");
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  if (t < 1.0) return std::log(t) + std::log1p(sinhc_minus_one(t));
  return t - kLn2 + std::log1p(-std::exp(-2.0 * t));
}

double sinhc_minus_one(double t) {
  const double x = t * t;
  if (std::abs(t) < 0.5) {
    double term = x / 6.0;
    double sum = 0.0;
    for (int k = 1; k < 30 && term != 0.0; ++k) {
      sum += term;
      term *= x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      if (term < kEps * 1e-3 * sum) break;
    }
    return sum;
  }
  return std::sinh(t) / t - 1.0;
}

VolumeMap::VolumeMap(int n, bool use_closed_form) : n_(n) {
  require_dimension(n);
  closed_form_ = !use_closed_form ? ClosedForm::none
                 : n == 2         ? ClosedForm::n2
                 : n == 3         ? ClosedForm::n3
                                  : ClosedForm::none;
  const int m = n - 1;
  const int terms = 40 + 2 * n;
  // Coefficients of (sinh s / s)^m as a series in s^2.
  std::vector<double> g(terms);
  double fact = 1.0;
  for (int k = 0; k < terms; ++k) {
    if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
    g[k] = 1.0 / fact;
  }
  std::vector<double> c(terms, 0.0);
  c[0] = 1.0;
  for (int power = 0; power < m; ++power) {
    std::vector<double> next(terms, 0.0);
    for (int i = 0; i < terms; ++i) {
      if (c[i] == 0.0) continue;
      for (int j = 0; i + j < terms; ++j) next[i + j] += c[i] * g[j];
    }
    c.swap(next);
  }
  h_coefficients_.resize(terms);
  for (int k = 0; k < terms; ++k) h_coefficients_[k] = n * c[k] / (n + 2.0 * k);
}

double VolumeMap::h_minus_one(double x) const {
  double acc = 0.0;
  for (std::size_t k = h_coefficients_.size() - 1; k >= 1; --k) acc = acc * x + h_coefficients_[k];
  return acc * x;
}

double VolumeMap::scaled_remainder(double t) const {
  const int m = n_ - 1;
  const double u = std::exp(-2.0 * t);
  const double lm = std::log1p(-u);
  const double lp = std::log1p(u);
  double scaled_prev;  // scaled I_{j-2}
  double r = 0.0;
  int j;
  if (m % 2 == 0) {
    scaled_prev = t;
    j = 2;
  } else {
    const double e = std::exp(-t);
    r = e * (e - 2.0);
    scaled_prev = 1.0 + r;
    j = 3;
  }
  for (; j <= m; j += 2) {
    r = std::expm1((j - 1) * lm + lp) - 4.0 * (j - 1) * u * scaled_prev;
    scaled_prev = (1.0 + r) / j;
  }
  return r;
}

double VolumeMap::log_phi(double t) const {
  require_radius(t);
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  if (closed_form_ == ClosedForm::n2) return 2.0 * kLn2 + 2.0 * log_sinh(0.5 * t);
  if (t < 1.0) return n_ * std::log(t) + std::log1p(h_minus_one(t * t));
  const int m = n_ - 1;
  if (closed_form_ == ClosedForm::n3) {
    // (3/8)(e^{2t} - e^{-2t} - 4t)
    const double u = std::exp(-2.0 * t);
    return std::log(3.0 / 8.0) + 2.0 * t + std::log1p(-u * u - 4.0 * t * u);
  }
  return std::log(static_cast<double>(n_) / m) - m * kLn2 + m * t + std::log1p(scaled_remainder(t));
}

double VolumeMap::phi(double t) const {
  require_radius(t);
  if (t == 0.0) return 0.0;
  if (closed_form_ == ClosedForm::n2) {
    const double sh = std::sinh(0.5 * t);
    return 4.0 * sh * sh;
  }
  if (t < 1.0) return std::pow(t, n_) * (1.0 + h_minus_one(t * t));
  return std::exp(log_phi(t));
}

double VolumeMap::phi_derivative(double t) const {
  require_radius(t);
  return n_ * std::pow(std::sinh(t), n_ - 1);
}

double VolumeMap::log_ratio(double t) const {
  if (t < 1.0) return std::log1p(h_minus_one(t * t)) / n_ - std::log1p(sinhc_minus_one(t));
  return log_phi(t) / n_ - log_sinh(t);
}

double VolumeMap::phi_inv(double s) const {
  if (!(s >= 0.0)) throw DomainError("phi_inv: volume must be >= 0");
  if (s == 0.0) return 0.0;
  if (std::isinf(s)) return s;
  if (closed_form_ == ClosedForm::n2) {
    // 4 sinh^2(t/2) = s
    return 2.0 * std::asinh(0.5 * std::sqrt(s));
  }
  const int m = n_ - 1;
  const double ls = std::log(s);
  double t = ls < 0.0 ? std::exp(ls / n_)
                      : std::max((ls - std::log(static_cast<double>(n_) / m) + m * kLn2) / m,
                                 std::min(1.0, std::exp(ls / n_)));
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double lphi = log_phi(t);
    const double g = lphi - ls;
    if (g == 0.0) return t;
    if (g < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double slope = std::exp(std::log(static_cast<double>(n_)) + m * log_sinh(t) - lphi);
    double next = t - g / slope;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * t + 1.0;
    if (std::abs(next - t) <= 2.0 * kEps * next) return next;
    if (std::isfinite(hi) && hi - lo <= 2.0 * kEps * hi) return next;
    t = next;
  }
  throw ConvergenceError("phi_inv: Newton iteration did not converge", t, hi - lo);
}

const VolumeMap& volume_map(int n) {
  require_dimension(n);
  constexpr int kCached = 128;
  static std::array<std::atomic<const VolumeMap*>, kCached> cache{};
  static std::mutex build_mutex;
  static std::vector<std::unique_ptr<VolumeMap>> owned;
  if (n >= kCached) {
    std::lock_guard<std::mutex> lock(build_mutex);
    for (const auto& map : owned) {
      if (map->n() == n) return *map;
    }
    owned.push_back(std::make_unique<VolumeMap>(n));
    return *owned.back();
  }
  const VolumeMap* hit = cache[n].load(std::memory_order_acquire);
  if (hit) return *hit;
  std::lock_guard<std::mutex> lock(build_mutex);
  hit = cache[n].load(std::memory_order_relaxed);
  if (hit) return *hit;
  owned.push_back(std::make_unique<VolumeMap>(n));
  cache[n].store(owned.back().get(), std::memory_order_release);
  return *owned.back();
}

double phi(int n, double t) { return volume_map(n).phi(t); }

double phi_inv(int n, double s) { return volume_map(n).phi_inv(s); }

double phi_quadrature(int n, double t, const QuadratureConfig& cfg) {
  require_dimension(n);
  require_radius(t);
  const int m = n - 1;
  auto r = integrate([m](double x) { return std::pow(std::sinh(x), m); }, 0.0, t, cfg);
  return n * r.value;
}

double ball_volume(int n, double rho) {
  require_radius(rho);
  return unit_ball_volume(n) * phi(n, rho);
}

double kernel_k(int n, double p, double s) {
  if (!(s >= 0.0)) throw DomainError("kernel_k: s must be >= 0");
  if (s == 0.0) return 0.0;
  const auto& map = volume_map(n);
  const double t = map.phi_inv(s);
  const double big_n = p * (n - 1);
  return -std::exp(big_n * log_sinh(t)) * std::expm1(big_n * map.log_ratio(t));
}

namespace {

MarginValue finish(double mantissa, double log_scale, double magnitude) {
  MarginValue out;
  out.value = {mantissa, log_scale};
  out.cancellation = mantissa == 0.0 ? (magnitude == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                     : std::max(1.0, magnitude / std::abs(mantissa));
  out.cancellation_warning = out.cancellation > kCancellationLimit;
  return out;
}

void require_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("exponent p must be finite and >= 1");
}

}  // namespace

MarginValue pointwise_margin(int n, double p, double t) {
  require_dimension(n);
  require_exponent(p);
  require_radius(t);
  if (t == 0.0) return finish(0.0, 0.0, 0.0);
  const auto& map = volume_map(n);
  if (n == 2) {
    // s = Phi = 4x: F = 2^p x^{p/2} [(1+x)^{p/2} - 1 - x^{p/2}]
    const double lx = 2.0 * log_sinh(0.5 * t);
    const double x = std::exp(lx);
    const double e = 0.5 * p - 1.0;
    double bracket;
    double magnitude;
    if (x <= 1.0 || p == 2.0) {
      const double a = (1.0 + x) * std::expm1(e * std::log1p(x));
      const double b = x * std::expm1(e * lx);
      bracket = a - b;
      magnitude = std::abs(a) + std::abs(b);
    } else {
      const double a = std::exp(0.5 * p * lx) * std::expm1(0.5 * p * std::log1p(1.0 / x));
      bracket = a - 1.0;
      magnitude = std::abs(a) + 1.0;
    }
    return finish(bracket, p * kLn2 + 0.5 * p * lx, magnitude);
  }
  const int m = n - 1;
  const double big_n = p * m;
  const double c = std::pow(static_cast<double>(m) / n, p);
  if (t < 1.0) {
    const double hm1 = map.h_minus_one(t * t);
    const double a = big_n * std::log1p(sinhc_minus_one(t));
    const double b = big_n / n * std::log1p(hm1);
    const double first = std::exp(b) * std::expm1(a - b);
    const double second = c * std::pow(t, p) * std::exp(p * std::log1p(hm1));
    return finish(first - second, big_n * std::log(t), std::exp(a) + std::exp(b) + second);
  }
  const double u = std::exp(-2.0 * t);
  const double r = map.scaled_remainder(t);
  const double d1 = std::expm1(big_n * std::log1p(-u));
  const double d2 = std::expm1(p * std::log1p(r));
  const double q = std::exp(big_n / n * map.log_phi(t) + big_n * kLn2 - big_n * t);
  return finish(d1 - d2 - q, big_n * t - big_n * kLn2, std::abs(d1) + std::abs(d2) + q);
}

MarginValue margin_derivative_factor(int n, double p, double t) {
  require_dimension(n);
  require_exponent(p);
  require_radius(t);
  const int m = n - 1;
  const double big_n = p * m;
  const double excess = big_n - n;  // exponent of sinh in the first term
  if (t == 0.0) {
    if (excess >= 0.0) return finish(0.0, 0.0, 0.0);
    return finish(std::numeric_limits<double>::infinity(), 0.0, 0.0);
  }
  if (n == 2 && p == 2.0) return finish(0.0, 0.0, 0.0);  // cosh t - 1 - Phi/2
  const auto& map = volume_map(n);
  const double c = std::pow(static_cast<double>(m) / n, p - 1.0);
  if (t < 1.0) {
    const double hm1 = map.h_minus_one(t * t);
    const double a = excess * std::log1p(sinhc_minus_one(t));
    const double sh = std::sinh(0.5 * t);
    const double lc = std::log1p(2.0 * sh * sh);
    const double b = excess / n * std::log1p(hm1);
    const double first = std::exp(b) * std::expm1(a + lc - b);
    const double second = c * std::pow(t, p) * std::exp((p - 1.0) * std::log1p(hm1));
    return finish(first - second, excess * std::log(t), std::exp(a + lc) + std::exp(b) + second);
  }
  const double e = m * (p - 1.0);
  const double u = std::exp(-2.0 * t);
  const double r = map.scaled_remainder(t);
  const double d1 = std::expm1(excess * std::log1p(-u) + std::log1p(u));
  const double d2 = std::expm1((p - 1.0) * std::log1p(r));
  const double q = std::exp(excess / n * map.log_phi(t) + e * kLn2 - e * t);
  return finish(d1 - d2 - q, e * t - e * kLn2, std::abs(d1) + std::abs(d2) + q);
}

double F(int n, double p, double t) { return pointwise_margin(n, p, t).value.value(); }

double G(int n, double p, double t) { return margin_derivative_factor(n, p, t).value.value(); }

double log_l_function(int n, double s) {
  if (!(s >= 0.0)) throw DomainError("l: s must be >= 0");
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  const double t = phi_inv(n, s / unit_ball_volume(n));
  return (n - 1) * log_sinh(t);
}

double l_function(int n, double s) {
  if (s == 0.0) return 0.0;
  return std::exp(log_l_function(n, s));
}

ScaledValue asymptotic_F_scaled(int n, double p, double t) {
  if (n < 3) throw DomainError("asymptotic_F: requires n >= 3");
  require_exponent(p);
  if (!(t > 0.0)) throw DomainError("asymptotic_F: requires t > 0");
  const double big_n = p * (n - 1);
  if (n == 3) {
    const double lk = p * std::log(4.0) + (2.0 * p / 3.0) * std::log(3.0 / 8.0);
    const double mantissa = 4.0 * p * t - std::exp(lk + (2.0 - 2.0 * p / 3.0) * t);
    return {mantissa, 2.0 * (p - 1.0) * t - p * std::log(4.0)};
  }
  const double a = 2.0 * p * (n - 1) / (n - 3.0);
  const double lb = big_n * kLn2 + big_n / n * (std::log(static_cast<double>(n)) + (1 - n) * kLn2 - std::log(n - 1.0));
  const double mantissa = a - std::exp(lb + (2.0 - big_n / n) * t);
  return {mantissa, (big_n - 2.0) * t - big_n * kLn2};
}

double asymptotic_F(int n, double p, double t) { return asymptotic_F_scaled(n, p, t).value(); }

double asymptotic_crossing(int n, double p) {
  if (n < 3) throw DomainError("asymptotic_crossing: requires n >= 3");
  const double big_n = p * (n - 1);
  if (n == 3) {
    const double rate = 2.0 - 2.0 * p / 3.0;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    const double lk = p * std::log(4.0) + (2.0 * p / 3.0) * std::log(3.0 / 8.0);
    auto h = [&](double t) { return std::log(4.0 * p * t) - lk - rate * t; };
    const double peak = 1.0 / rate;
    if (h(peak) <= 0.0) return peak;
    double hi = 2.0 * peak;
    while (h(hi) > 0.0) hi *= 2.0;
    return find_root_increasing([&](double t) { return -h(t); }, 0.0, peak, hi);
  }
  const double rate = 2.0 - big_n / n;
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  const double a = 2.0 * p * (n - 1) / (n - 3.0);
  const double lb = big_n * kLn2 + big_n / n * (std::log(static_cast<double>(n)) + (1 - n) * kLn2 - std::log(n - 1.0));
  return std::max(0.0, (std::log(a) - lb) / rate);
}

}  // namespace hypsob
