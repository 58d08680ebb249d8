#include "hypsob/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/hyperbolic_geometry.hpp"
#include "hypsob/special_constants.hpp"

namespace hypsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRhoMax = 700.0;

double probe_end(const MonotonePiece& piece) {
  return std::isfinite(piece.end) ? piece.end : std::min(piece.begin + 50.0, kRhoMax);
}

// Sum of adaptive integrals of g over [a, inf) on doubling panels.
Measured integrate_half_line(const RealFn& g, double a, const QuadratureConfig& cfg) {
  Measured total;
  double x0 = a;
  double width = 1.0;
  int quiet = 0;
  while (x0 < kRhoMax) {
    const double x1 = std::min(x0 + width, kRhoMax);
    auto r = integrate_adaptive(g, x0, x1, cfg);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
    if (std::abs(r.value) <= 0.1 * cfg.rel_tol * std::abs(total.value)) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
    x0 = x1;
    width *= 2.0;
  }
  total.converged = total.converged && quiet > 0;
  return total;
}

void check_tail_integrable(const RadialProfile& v, double exponent_factor, const char* what) {
  if (v.is_zero() || v.tail().kind != TailKind::power) return;
  if (exponent_factor <= 1.0) {
    throw DivergenceError(fmt::format("{} diverges for tail {} (decay exponent {:.6g} <= 1)", what,
                                      v.tail().describe(), exponent_factor));
  }
}

}  // namespace

RadialFunction::RadialFunction(int n, std::vector<MonotonePiece> pieces) : n_(n), pieces_(std::move(pieces)) {
  if (n < 2) throw DomainError("RadialFunction: n must be >= 2");
  if (pieces_.empty()) throw DomainError("RadialFunction: needs at least one piece");
  double expected = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& piece = pieces_[k];
    if (!piece.f) throw DomainError("RadialFunction: piece without a function");
    if (piece.begin != expected) throw DomainError("RadialFunction: pieces must tile [0, end) in order");
    if (!(piece.end > piece.begin)) throw DomainError("RadialFunction: empty piece");
    if (!std::isfinite(piece.end) && k + 1 != pieces_.size()) {
      throw DomainError("RadialFunction: only the last piece may be unbounded");
    }
    const double a = std::abs(piece.f(piece.begin));
    const double b = std::abs(piece.f(probe_end(piece)));
    int dir = 0;
    if (a > b) dir = -1;
    if (a < b) dir = +1;
    if (dir > 0 && !std::isfinite(piece.end)) {
      throw DomainError("RadialFunction: an unbounded piece must be non-increasing");
    }
    direction_.push_back(dir);
    expected = piece.end;
  }
}

RadialFunction RadialFunction::symmetric(int n, RealFn f, RealFn derivative, double support) {
  return RadialFunction(n, {MonotonePiece{0.0, support, std::move(f), std::move(derivative)}});
}

RadialFunction RadialFunction::indicator(int n, double radius, double height) {
  if (!(radius > 0.0)) throw DomainError("indicator: radius must be > 0");
  return RadialFunction(n, {MonotonePiece{0.0, radius, [height](double) { return height; },
                                          [](double) { return 0.0; }}});
}

double RadialFunction::value(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("RadialFunction: negative radius");
  for (const auto& piece : pieces_) {
    if (rho < piece.end) return std::abs(piece.f(rho));
  }
  return 0.0;
}

double RadialFunction::sup() const {
  double out = 0.0;
  for (const auto& piece : pieces_) {
    out = std::max(out, std::abs(piece.f(piece.begin)));
    if (std::isfinite(piece.end)) out = std::max(out, std::abs(piece.f(piece.end)));
  }
  return out;
}

bool RadialFunction::derivatives_known() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const MonotonePiece& p) { return static_cast<bool>(p.derivative); });
}

namespace {

struct Crossing {
  double volume = 0.0;  // of the superlevel part of the piece
  double root = std::numeric_limits<double>::quiet_NaN();  // interior crossing radius
};

template <class Pred>
Crossing piece_crossing(const MonotonePiece& piece, int dir, int n, Pred pred) {
  const auto& map = volume_map(n);
  auto f = [&](double r) { return std::abs(piece.f(r)); };
  const double a = piece.begin;
  Crossing out;
  if (dir == 0) {
    if (!pred(f(a))) return out;
    if (!std::isfinite(piece.end)) throw DomainError("superlevel set has infinite volume");
    out.volume = map.phi(piece.end) - map.phi(a);
    return out;
  }
  if (dir < 0) {
    if (!pred(f(a))) return out;
    double hi = piece.end;
    if (std::isfinite(hi)) {
      if (pred(f(hi))) {
        out.volume = map.phi(hi) - map.phi(a);
        return out;
      }
    } else {
      double step = 1.0;
      hi = a + step;
      while (pred(f(hi))) {
        if (hi >= kRhoMax) throw DomainError("superlevel set has infinite volume");
        step *= 2.0;
        hi = std::min(a + step, kRhoMax);
      }
    }
    double lo = a;
    for (int it = 0; it < 200 && hi - lo > 2.0 * kEps * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (pred(f(mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.root = 0.5 * (lo + hi);
    out.volume = map.phi(out.root) - map.phi(a);
    return out;
  }
  // increasing on [a, end), end finite
  const double b = piece.end;
  if (!pred(f(b))) return out;
  if (pred(f(a))) {
    out.volume = map.phi(b) - map.phi(a);
    return out;
  }
  double lo = a;
  double hi = b;
  for (int it = 0; it < 200 && hi - lo > 2.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(f(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.root = 0.5 * (lo + hi);
  out.volume = map.phi(b) - map.phi(out.root);
  return out;
}

}  // namespace

double RadialFunction::distribution(double t, bool or_equal) const {
  if (!(t >= 0.0)) throw DomainError("distribution: level must be >= 0");
  double total = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    Crossing c = or_equal ? piece_crossing(pieces_[k], direction_[k], n_, [t](double x) { return x >= t; })
                          : piece_crossing(pieces_[k], direction_[k], n_, [t](double x) { return x > t; });
    total += c.volume;
  }
  return unit_ball_volume(n_) * total;
}

std::pair<double, double> RadialFunction::distribution_with_density(double t) const {
  double total = 0.0;
  double density = 0.0;
  const auto& map = volume_map(n_);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& piece = pieces_[k];
    Crossing c = piece_crossing(piece, direction_[k], n_, [t](double x) { return x > t; });
    total += c.volume;
    if (std::isnan(c.root) || !piece.derivative) continue;
    const double d = std::abs(piece.derivative(c.root));
    density += d == 0.0 ? kInf : map.phi_derivative(c.root) / d;
  }
  const double sigma = unit_ball_volume(n_);
  return {sigma * total, sigma * density};
}

double RadialFunction::support_volume() const {
  if (!std::isfinite(pieces_.back().end)) return kInf;
  return distribution(0.0);
}

Measured RadialFunction::lq_integral(double q, const QuadratureConfig& cfg) const {
  const int m = n_ - 1;
  Measured total;
  for (const auto& piece : pieces_) {
    auto g = [&](double r) {
      const double v = std::abs(piece.f(r));
      return v == 0.0 ? 0.0 : std::pow(v, q) * std::pow(std::sinh(r), m);
    };
    Measured part;
    if (std::isfinite(piece.end)) {
      auto r = integrate_adaptive(g, piece.begin, piece.end, cfg);
      part = {r.value, r.error, r.converged};
    } else {
      part = integrate_half_line(g, piece.begin, cfg);
    }
    total.value += part.value;
    total.error += part.error;
    total.converged = total.converged && part.converged;
  }
  const double factor = n_ * unit_ball_volume(n_);
  return {factor * total.value, factor * total.error, total.converged};
}

Measured RadialFunction::lq_integral_layer_cake(double q, const QuadratureConfig& cfg) const {
  std::vector<double> levels;
  const double top = sup();
  for (const auto& piece : pieces_) {
    levels.push_back(std::abs(piece.f(piece.begin)));
    if (std::isfinite(piece.end)) levels.push_back(std::abs(piece.f(piece.end)));
  }
  levels.push_back(top);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::remove_if(levels.begin(), levels.end(), [&](double x) { return !(x > 0.0) || x > top; }),
               levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Measured total;
  if (levels.empty()) return total;
  auto g = [&](double t) { return t <= 0.0 ? 0.0 : q * std::pow(t, q - 1.0) * distribution(t); };
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    auto r = integrate_adaptive(g, levels[i], levels[i + 1], cfg);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
  }
  // [0, levels[0]] in y = log(levels[0] / t), doubling panels.
  const double first = levels.front();
  auto head = [&](double y) {
    const double t = first * std::exp(-y);
    return t * g(t);
  };
  double y0 = 0.0;
  double width = 1.0;
  int quiet = 0;
  while (y0 < 700.0 && quiet < 2) {
    auto r = integrate_adaptive(head, y0, y0 + width, cfg);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
    quiet = std::abs(r.value) <= 0.1 * cfg.rel_tol * std::abs(total.value) ? quiet + 1 : 0;
    y0 += width;
    width *= 2.0;
  }
  return total;
}

Measured RadialFunction::gradient_integral(double p, const QuadratureConfig& cfg) const {
  const double scale = 1e-12 * (1.0 + sup());
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const double left = std::abs(pieces_[k].f(pieces_[k].end));
    const double right = std::abs(pieces_[k + 1].f(pieces_[k + 1].begin));
    if (std::abs(left - right) > scale) return {kInf, 0.0, true};
  }
  const auto& last = pieces_.back();
  if (std::isfinite(last.end) && std::abs(last.f(last.end)) > scale) return {kInf, 0.0, true};
  const int m = n_ - 1;
  Measured total;
  for (const auto& piece : pieces_) {
    auto slope = [&](double r) {
      if (piece.derivative) return std::abs(piece.derivative(r));
      const double h = 1e-6 * std::max(1.0, r);
      const double lo = std::max(piece.begin, r - h);
      const double hi = std::isfinite(piece.end) ? std::min(piece.end, r + h) : r + h;
      return std::abs((std::abs(piece.f(hi)) - std::abs(piece.f(lo))) / (hi - lo));
    };
    auto g = [&](double r) {
      const double d = slope(r);
      return d == 0.0 ? 0.0 : std::pow(d, p) * std::pow(std::sinh(r), m);
    };
    Measured part;
    if (std::isfinite(piece.end)) {
      auto r = integrate_adaptive(g, piece.begin, piece.end, cfg);
      part = {r.value, r.error, r.converged};
    } else {
      part = integrate_half_line(g, piece.begin, cfg);
    }
    total.value += part.value;
    total.error += part.error;
    total.converged = total.converged && part.converged;
  }
  const double factor = n_ * unit_ball_volume(n_);
  return {factor * total.value, factor * total.error, total.converged};
}

double distribution_function(const RadialFunction& f, double t) {
  if (!(t > 0.0)) throw DomainError("distribution_function: level must be > 0");
  return f.distribution(t);
}

namespace {

// u*(s) = sup{t : mu(t) > s}; `left` gives the left limit sup{t : mu(t) >= s}.
double rearranged_value(const RadialFunction& f, double s, bool left, double top) {
  auto pred = [&](double t) {
    const double mu = f.distribution(t);
    return left ? mu >= s : mu > s;
  };
  if (pred(top)) return top;
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 200 && hi - lo > kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Adds decades below the first positive node until u* there is within 1e-8
// of its top value, so a peak of tiny volume is not lost to interpolation.
void refine_near_zero(std::vector<double>& base, const std::function<double(double)>& value_at, double top,
                      int per_decade) {
  if (base.size() < 2) return;
  const double first = base[1];
  double lo = first;
  for (int k = 0; k < 24 && lo > 1e-280 && top - value_at(lo) > 1e-8 * top; ++k) lo *= 0.1;
  if (lo == first) return;
  auto extra = log_grid(lo, first, per_decade);
  extra.pop_back();
  base.insert(base.begin() + 1, extra.begin(), extra.end());
}

Tail fit_power_tail(const RadialProfile::Segment& seg) {
  const std::size_t m = seg.s.size();
  if (m < 2) throw DomainError("decreasing_rearrangement: grid too short to fit a tail");
  const double v1 = seg.v[m - 2];
  const double v2 = seg.v[m - 1];
  if (v2 == 0.0) return Tail{TailKind::compact, seg.s.back()};
  const double gamma = std::log(v1 / v2) / std::log(seg.s[m - 1] / seg.s[m - 2]);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("decreasing_rearrangement: u* does not decay on the grid (infinite superlevel volume?)");
  }
  return Tail{TailKind::power, gamma};
}

}  // namespace

RadialProfile decreasing_rearrangement(const RadialFunction& f, const GridSpec& grid) {
  const int n = f.n();
  const double sigma = unit_ball_volume(n);
  const auto& map = volume_map(n);
  const double top = f.sup();
  if (top == 0.0) return RadialProfile::zero();
  const double support = f.support_volume();
  std::vector<double> base = grid.nodes(sigma);

  const auto& pieces = f.pieces();
  const bool symmetric = pieces.size() == 1 && std::abs(pieces[0].f(0.0)) >= std::abs(pieces[0].f(probe_end(pieces[0])));
  if (symmetric && pieces[0].f(0.0) != pieces[0].f(probe_end(pieces[0]))) {
    const auto& piece = pieces[0];
    refine_near_zero(
        base, [&](double s) { return std::abs(piece.f(map.phi_inv(s / sigma))); }, std::abs(piece.f(0.0)),
        grid.per_decade);
    RadialProfile::Segment seg;
    const bool exact = static_cast<bool>(piece.derivative);
    for (double s : base) {
      if (s >= support) break;
      const double rho = map.phi_inv(s / sigma);
      seg.s.push_back(s);
      seg.v.push_back(std::abs(piece.f(rho)));
      if (exact) {
        const double d = s == 0.0 ? 0.0 : -std::abs(piece.derivative(rho)) / (sigma * map.phi_derivative(rho));
        seg.slope.push_back(std::isfinite(d) ? d : 0.0);
      }
    }
    Tail tail;
    if (std::isfinite(support)) {
      if (support > seg.s.back()) {
        const double rho_end = std::isfinite(piece.end) ? piece.end : map.phi_inv(support / sigma);
        seg.s.push_back(support);
        const double end_value = std::abs(piece.f(rho_end));
        seg.v.push_back(end_value <= 1e-12 * top ? 0.0 : std::min(seg.v.back(), end_value));
        if (exact) {
          const double d = -std::abs(piece.derivative(rho_end)) / (sigma * map.phi_derivative(rho_end));
          seg.slope.push_back(std::isfinite(d) ? d : 0.0);
        }
      }
      tail = Tail{TailKind::compact, support};
    } else {
      tail = fit_power_tail(seg);
    }
    std::vector<RadialProfile::Segment> segs{std::move(seg)};
    return RadialProfile::from_segments(std::move(segs), tail, "rearrangement");
  }

  // Breakpoints: volumes of the end values of every piece.
  std::vector<double> levels;
  for (const auto& piece : pieces) {
    levels.push_back(std::abs(piece.f(piece.begin)));
    if (std::isfinite(piece.end)) levels.push_back(std::abs(piece.f(piece.end)));
  }
  std::vector<double> breaks;
  for (double c : levels) {
    if (!(c > 0.0)) continue;
    breaks.push_back(f.distribution(c));
    breaks.push_back(f.distribution(c, true));
  }
  breaks.push_back(0.0);
  if (std::isfinite(support)) breaks.push_back(support);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return b < 0.0 || b > support; }),
               breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(a, b); }),
               breaks.end());

  refine_near_zero(
      base, [&](double s) { return rearranged_value(f, s, false, top); }, top, grid.per_decade);

  const bool exact = f.derivatives_known();
  auto slope_at_level = [&](double t) {
    const double density = f.distribution_with_density(t).second;
    if (density == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::isinf(density) ? 0.0 : -1.0 / density;
  };

  std::vector<RadialProfile::Segment> segs;
  const std::size_t count = breaks.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double a = breaks[i];
    const bool last = i + 1 == count;
    if (last && std::isfinite(support)) break;
    const double b = last ? base.back() : breaks[i + 1];
    if (!(b > a)) continue;
    RadialProfile::Segment seg;
    seg.s.push_back(a);
    seg.v.push_back(rearranged_value(f, a, false, top));
    for (double s : base) {
      if (s > a * (1.0 + 1e-9) && s < b * (1.0 - 1e-9) && s > 0.0) {
        seg.s.push_back(s);
        seg.v.push_back(rearranged_value(f, s, false, top));
      }
    }
    seg.s.push_back(b);
    seg.v.push_back(last ? rearranged_value(f, b, false, top) : rearranged_value(f, b, true, top));
    for (std::size_t k = 1; k < seg.v.size(); ++k) seg.v[k] = std::min(seg.v[k], seg.v[k - 1]);
    if (exact) {
      bool ok = true;
      const double width = b - a;
      for (std::size_t k = 0; k < seg.s.size() && ok; ++k) {
        double s = seg.s[k];
        const bool end = k == 0 || k + 1 == seg.s.size();
        if (k == 0) s += 1e-7 * width;
        if (k + 1 == seg.s.size()) s -= 1e-7 * width;
        const double d = slope_at_level(end ? rearranged_value(f, s, false, top) : seg.v[k]);
        ok = std::isfinite(d);
        seg.slope.push_back(d);
      }
      if (!ok) seg.slope.clear();
    }
    segs.push_back(std::move(seg));
  }
  if (segs.empty()) return RadialProfile::zero();
  // Drops at rounding level are continuity, not jumps.
  std::vector<RadialProfile::Segment> merged;
  for (auto& seg : segs) {
    if (!merged.empty() && merged.back().v.back() - seg.v.front() <= 1e-12 * top) {
      auto& prev = merged.back();
      const bool slopes = !prev.slope.empty() && !seg.slope.empty();
      if (!slopes) prev.slope.clear();
      for (std::size_t k = 1; k < seg.s.size(); ++k) {
        prev.s.push_back(seg.s[k]);
        prev.v.push_back(std::min(seg.v[k], prev.v.back()));
        if (slopes) prev.slope.push_back(seg.slope[k]);
      }
    } else {
      merged.push_back(std::move(seg));
    }
  }
  segs = std::move(merged);
  if (std::isfinite(support) && segs.back().v.back() <= 1e-12 * top) segs.back().v.back() = 0.0;
  Tail tail = std::isfinite(support) ? Tail{TailKind::compact, support} : fit_power_tail(segs.back());
  return RadialProfile::from_segments(std::move(segs), tail, "rearrangement");
}

Measured lp_integral(const RadialProfile& v, double q, const QuadratureConfig& cfg) {
  if (!(q > 0.0)) throw DomainError("lp_integral: q must be > 0");
  if (v.is_zero()) return {};
  check_tail_integrable(v, q * v.tail().parameter, "L^q integral");
  auto g = [&](double s) {
    const double x = v.value(s);
    return x == 0.0 ? 0.0 : std::pow(x, q);
  };
  return integrate_measure_line(g, v, cfg);
}

Measured lp_norm(const RadialProfile& v, double q, const QuadratureConfig& cfg) {
  if (!(q >= 1.0)) throw DomainError("lp_norm: q must be >= 1");
  const Measured power = lp_integral(v, q, cfg);
  if (power.value == 0.0) return {0.0, 0.0, power.converged};
  const double norm = std::pow(power.value, 1.0 / q);
  return {norm, norm * power.error / (q * power.value), power.converged};
}

Measured grad_norm_euclidean(const RadialProfile& v, int n, double p, const QuadratureConfig& cfg) {
  if (n < 2 || !(p >= 1.0)) throw DomainError("grad_norm_euclidean: needs n >= 2, p >= 1");
  if (v.is_zero()) return {};
  if (v.has_jumps()) return {kInf, 0.0, true};
  check_tail_integrable(v, p * (v.tail().parameter + 1.0 / n), "Euclidean gradient norm");
  const double sigma = unit_ball_volume(n);
  const double weight = static_cast<double>(n - 1) / n;
  const double log_prefactor = p * std::log(n * sigma);
  auto g = [&](double s) {
    const double d = v.slope(s);
    if (!(d < 0.0) || s == 0.0) return 0.0;
    return std::exp(log_prefactor + p * (std::log(-d) + weight * std::log(s / sigma)));
  };
  return integrate_measure_line(g, v, cfg);
}

Measured grad_norm_hyperbolic(const RadialProfile& v, int n, double p, const QuadratureConfig& cfg) {
  if (n < 2 || !(p >= 1.0)) throw DomainError("grad_norm_hyperbolic: needs n >= 2, p >= 1");
  if (v.is_zero()) return {};
  if (v.has_jumps()) return {kInf, 0.0, true};
  check_tail_integrable(v, p * v.tail().parameter, "hyperbolic gradient norm");
  const double sigma = unit_ball_volume(n);
  const auto& map = volume_map(n);
  const int m = n - 1;
  const double log_prefactor = p * std::log(n * sigma);
  auto g = [&](double s) {
    const double d = v.slope(s);
    if (!(d < 0.0) || s == 0.0) return 0.0;
    const double rho = map.phi_inv(s / sigma);
    return std::exp(log_prefactor + p * (std::log(-d) + m * log_sinh(rho)));
  };
  return integrate_measure_line(g, v, cfg);
}

Measured grad_norm_correction(const RadialProfile& v, int n, double p, const QuadratureConfig& cfg) {
  if (n < 2 || !(p >= 1.0)) throw DomainError("grad_norm_correction: needs n >= 2, p >= 1");
  if (v.is_zero()) return {};
  if (v.has_jumps()) return {kInf, 0.0, true};
  check_tail_integrable(v, p * v.tail().parameter, "hyperbolic gradient correction");
  const double sigma = unit_ball_volume(n);
  const double log_prefactor = p * std::log(n * sigma);
  auto g = [&](double s) {
    const double d = v.slope(s);
    if (!(d < 0.0) || s == 0.0) return 0.0;
    const double k = kernel_k(n, p, s / sigma);
    if (k == 0.0) return 0.0;
    return std::exp(log_prefactor + p * std::log(-d)) * k;
  };
  return integrate_measure_line(g, v, cfg);
}

HardyBound hardy_term_bound(const RadialProfile& v, double p, const QuadratureConfig& cfg) {
  if (!(p >= 2.0)) throw DomainError("hardy_term_bound: requires p >= 2");
  HardyBound out;
  if (v.is_zero()) return out;
  if (v.has_jumps()) {
    out.lhs = kInf;
    out.rhs = kInf;
    return out;
  }
  check_tail_integrable(v, p * v.tail().parameter, "Hardy term");
  auto lhs = integrate_measure_line(
      [&](double s) {
        const double d = v.slope(s);
        return d == 0.0 ? 0.0 : std::pow(std::abs(d) * s, p);
      },
      v, cfg);
  auto a_term = integrate_measure_line(
      [&](double s) {
        const double x = std::abs(s * v.slope(s) + v.value(s) / p);
        return x == 0.0 ? 0.0 : std::pow(x, p);
      },
      v, cfg);
  auto vp = lp_integral(v, p, cfg);
  out.lhs = lhs.value;
  out.rhs = a_term.value + std::pow(p, -p) * vp.value;
  out.error = lhs.error + a_term.error + std::pow(p, -p) * vp.error;
  return out;
}

HardyBound hardy_term_bound(const RealFn& value, const RealFn& slope, double p, double lo, double hi,
                            const QuadratureConfig& cfg) {
  if (!(p >= 2.0)) throw DomainError("hardy_term_bound: requires p >= 2");
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) throw DomainError("hardy_term_bound: need 0 < lo < hi < inf");
  const double la = std::log(lo);
  const double lb = std::log(hi);
  auto lhs = integrate_adaptive(
      [&](double y) {
        const double s = std::exp(y);
        return std::pow(std::abs(slope(s)) * s, p) * s;
      },
      la, lb, cfg);
  auto a_term = integrate_adaptive(
      [&](double y) {
        const double s = std::exp(y);
        return std::pow(std::abs(s * slope(s) + value(s) / p), p) * s;
      },
      la, lb, cfg);
  auto vp = integrate_adaptive(
      [&](double y) {
        const double s = std::exp(y);
        return std::pow(value(s), p) * s;
      },
      la, lb, cfg);
  HardyBound out;
  out.lo = lo;
  out.hi = hi;
  out.boundary_term = std::pow(p, 1.0 - p) * (std::pow(value(hi), p) * hi - std::pow(value(lo), p) * lo);
  out.lhs = lhs.value;
  out.rhs = a_term.value + std::pow(p, -p) * vp.value - out.boundary_term;
  out.error = lhs.error + a_term.error + std::pow(p, -p) * vp.error;
  return out;
}

double rigidity_distance(const RadialProfile& v, double p, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("rigidity_distance: need 0 < lo < hi");
  const double la = std::log(lo);
  const double lb = std::log(hi);
  auto w = [&](double y) { return v.value(std::exp(y)) * std::exp(y / p); };
  QuadratureConfig cfg = profile_quadrature(1e-8);
  const double width = lb - la;
  const double mean = integrate_adaptive(w, la, lb, cfg).value / width;
  if (mean == 0.0) return 0.0;
  const double var = integrate_adaptive(
                         [&](double y) {
                           const double d = w(y) - mean;
                           return d * d;
                         },
                         la, lb, cfg)
                         .value /
                     width;
  return std::sqrt(var) / std::abs(mean);
}

DeficitReport key_comparison(const RadialProfile& v, const Params& params, const QuadratureConfig& cfg,
                             double constant_scale) {
  const int n = params.n;
  const double p = params.p;
  const bool in_range = n == 2 ? p >= 2.0 : p >= Params::lemma_boundary(n);
  if (!in_range) {
    throw DomainError(fmt::format("key_comparison: requires p >= 2 for n = 2 and p >= 2n/(n-1) = {:.17g} for n >= 3 "
                                  "(got {})",
                                  Params::lemma_boundary(n), params.describe()));
  }
  const auto hyp = grad_norm_hyperbolic(v, n, p, cfg);
  const auto euc = grad_norm_euclidean(v, n, p, cfg);
  const auto vp = lp_integral(v, p, cfg);
  const double c = std::pow(constant_scale * (n - 1) / p, p);
  auto report = DeficitReport::make(InequalityId::key_comparison, params, hyp.value - c * vp.value, euc.value,
                                    hyp.error + c * vp.error + euc.error, p);
  report.profile = v.name();
  if (v.has_jumps()) report.add_flag(ReportFlag::step_profile);
  if (!(hyp.converged && euc.converged && vp.converged)) report.add_flag(ReportFlag::not_converged);
  if (!v.is_zero() && !v.has_jumps()) {
    double hi = v.support_end();
    if (!std::isfinite(hi)) {
      hi = 1.0;
      for (double k : v.knots()) hi = std::max(hi, k);
      for (double h : v.scale_hints()) hi = std::max(hi, h);
    }
    report.add_diagnostic("rigidity_distance", rigidity_distance(v, p, 1e-3 * hi, hi));
  }
  return report;
}

}  // namespace hypsob
