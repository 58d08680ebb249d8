#include "hypsob/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hypsob/error.hpp"

namespace hypsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void hermite(double x0, double x1, double y0, double y1, double d0, double d1, double s, double* value,
             double* slope) {
  const double h = x1 - x0;
  const double t = (s - x0) / h;
  const double t2 = t * t;
  const double omt = 1.0 - t;
  if (value) {
    *value = (1.0 + 2.0 * t) * omt * omt * y0 + t * omt * omt * h * d0 + t2 * (3.0 - 2.0 * t) * y1 +
             t2 * (t - 1.0) * h * d1;
  }
  if (slope) {
    *slope = ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h + (3.0 * t2 - 4.0 * t + 1.0) * d0 +
             (3.0 * t2 - 2.0 * t) * d1;
  }
}

// Fritsch–Carlson: shrink node slopes so each cubic piece stays monotone.
void limit_slopes(const std::vector<double>& s, const std::vector<double>& v, std::vector<double>& d) {
  for (double& x : d) x = std::min(x, 0.0);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double delta = (v[k + 1] - v[k]) / (s[k + 1] - s[k]);
    if (delta == 0.0) {
      d[k] = 0.0;
      d[k + 1] = 0.0;
      continue;
    }
    const double a = d[k] / delta;
    const double b = d[k + 1] / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d[k] = tau * a * delta;
      d[k + 1] = tau * b * delta;
    }
  }
}

void validate_tail(const Tail& tail, double last_node) {
  switch (tail.kind) {
    case TailKind::compact:
      if (!(tail.parameter >= last_node) || !std::isfinite(tail.parameter)) {
        throw DomainError(fmt::format("compact tail end {} lies before the last node {}", tail.parameter, last_node));
      }
      break;
    case TailKind::power:
    case TailKind::exponential:
      if (!(tail.parameter > 0.0) || !std::isfinite(tail.parameter)) {
        throw DomainError(fmt::format("tail {} needs a positive parameter", tail.describe()));
      }
      if (!(last_node > 0.0)) throw DomainError("power/exponential tails need a last node s > 0");
      break;
  }
}

}  // namespace

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::compact:
      return "compact";
    case TailKind::power:
      return "power";
    case TailKind::exponential:
      return "exponential";
  }
  return "compact";
}

TailKind tail_kind_from_string(const std::string& text) {
  if (text == "compact") return TailKind::compact;
  if (text == "power") return TailKind::power;
  if (text == "exponential") return TailKind::exponential;
  throw DomainError("unknown tail kind '" + text + "' (expected compact, power or exponential)");
}

std::string Tail::describe() const { return fmt::format("{}:{:.17g}", to_string(kind), parameter); }

std::vector<double> GridSpec::nodes(double scale) const {
  if (!(scale > 0.0)) throw DomainError("GridSpec: scale must be > 0");
  auto out = log_grid(lo * scale, hi * scale, per_decade);
  out.insert(out.begin(), 0.0);
  return out;
}

struct RadialProfile::Impl {
  std::string name;
  double scale = 1.0;
  bool zero = true;
  std::vector<Segment> segments;
  Fn value_fn;
  Fn slope_fn;
  Tail tail;
  std::vector<Jump> jumps;
  std::vector<double> knots;
  std::vector<double> hints;
  double support_end = 0.0;
  double clamped_mass = 0.0;

  double tail_start() const { return segments.back().s.back(); }
  double tail_value() const { return segments.back().v.back(); }

  // Unscaled grid evaluation.
  void grid_eval(double s, double* value, double* slope) const {
    const double sm = tail_start();
    if (s >= sm) {
      const double vm = tail_value();
      double v = 0.0;
      double d = 0.0;
      switch (tail.kind) {
        case TailKind::compact:
          v = s < tail.parameter ? vm : 0.0;
          break;
        case TailKind::power:
          v = vm * std::pow(s / sm, -tail.parameter);
          d = -tail.parameter * v / s;
          break;
        case TailKind::exponential:
          v = vm * std::exp(-tail.parameter * (s - sm));
          d = -tail.parameter * v;
          break;
      }
      if (value) *value = v;
      if (slope) *slope = d;
      return;
    }
    auto seg_it = std::upper_bound(segments.begin(), segments.end(), s,
                                   [](double x, const Segment& seg) { return x < seg.s.front(); });
    const Segment& seg = *(seg_it - 1);
    const auto& x = seg.s;
    if (s >= x.back()) {  // only possible in a gap-free layout at the very end
      if (value) *value = seg.v.back();
      if (slope) *slope = seg.slope.back();
      return;
    }
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
    hermite(x[k], x[k + 1], seg.v[k], seg.v[k + 1], seg.slope[k], seg.slope[k + 1], s, value, slope);
  }
};

RadialProfile::RadialProfile() : impl_(std::make_shared<Impl>()) {}

RadialProfile::RadialProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

RadialProfile RadialProfile::zero() { return RadialProfile(); }

RadialProfile RadialProfile::from_samples(std::vector<double> s, std::vector<double> v, Tail tail, std::string name,
                                          std::vector<double> slopes) {
  Segment seg{std::move(s), std::move(v), std::move(slopes)};
  std::vector<Segment> segs;
  segs.push_back(std::move(seg));
  return from_segments(std::move(segs), tail, std::move(name));
}

RadialProfile RadialProfile::from_segments(std::vector<Segment> segments, Tail tail, std::string name) {
  if (segments.empty()) throw DomainError("profile needs at least one segment");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  double prev_end = 0.0;
  double prev_value = kInf;
  bool all_zero = true;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    auto& seg = segments[k];
    const auto& x = seg.s;
    const auto& y = seg.v;
    if (x.empty() || x.size() != y.size()) throw DomainError("profile segment needs matching, non-empty s and v");
    if (k == 0 && x.front() != 0.0) throw DomainError("profile must start at s = 0");
    if (k > 0 && x.front() != prev_end) throw DomainError("profile segments must be contiguous");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("profile samples must be finite");
      if (y[i] < 0.0) throw DomainError(fmt::format("profile value {} at s = {} is negative", y[i], x[i]));
      if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("profile nodes must be strictly increasing");
      const double before = i > 0 ? y[i - 1] : prev_value;
      if (y[i] > before) {
        throw DomainError(fmt::format("profile values must be non-increasing (v({}) = {} > {})", x[i], y[i], before));
      }
      if (y[i] != 0.0) all_zero = false;
    }
    if (k > 0 && y.front() < prev_value) impl->jumps.push_back({x.front(), prev_value - y.front()});
    if (!seg.slope.empty()) {
      if (seg.slope.size() != x.size()) throw DomainError("profile slopes must match the nodes");
    } else if (x.size() >= 3) {
      auto d = differentiate_grid(x, y, SignConstraint::non_positive);
      impl->clamped_mass += d.clamped_mass;
      seg.slope = std::move(d.slopes);
    } else if (x.size() == 2) {
      const double secant = (y[1] - y[0]) / (x[1] - x[0]);
      seg.slope = {secant, secant};
    } else {
      seg.slope = {0.0};
    }
    limit_slopes(x, y, seg.slope);
    prev_end = x.back();
    prev_value = y.back();
  }
  validate_tail(tail, prev_end);
  impl->tail = tail;
  impl->segments = std::move(segments);
  impl->zero = all_zero;
  if (tail.kind == TailKind::compact) {
    impl->support_end = tail.parameter;
    if (prev_value > 0.0) impl->jumps.push_back({tail.parameter, prev_value});
  } else {
    impl->support_end = kInf;
  }
  if (all_zero) {
    impl->jumps.clear();
    impl->support_end = 0.0;
  } else {
    for (const auto& seg : impl->segments) {
      for (double x : seg.s) {
        if (x > 0.0) impl->knots.push_back(x);
      }
    }
    if (std::isfinite(impl->support_end)) impl->knots.push_back(impl->support_end);
    std::sort(impl->knots.begin(), impl->knots.end());
    impl->knots.erase(std::unique(impl->knots.begin(), impl->knots.end()), impl->knots.end());
    if (std::isfinite(impl->support_end)) {
      while (!impl->knots.empty() && impl->knots.back() > impl->support_end) impl->knots.pop_back();
    }
  }
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::analytic(Analytic spec) {
  if (!spec.value) throw DomainError("analytic profile needs a value closure");
  if (!spec.slope) throw DomainError("analytic profile needs a slope closure");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(spec.name);
  impl->tail = spec.tail;
  if (spec.tail.kind == TailKind::compact) {
    if (!(spec.tail.parameter >= 0.0) || !std::isfinite(spec.tail.parameter)) {
      throw DomainError("compact analytic profile needs a finite support end");
    }
    impl->support_end = spec.tail.parameter;
  } else {
    if (!(spec.tail.parameter > 0.0)) throw DomainError("analytic tail needs a positive parameter");
    impl->support_end = kInf;
  }
  const double v0 = spec.value(0.0);
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw DomainError("analytic profile needs finite v(0) >= 0");
  impl->zero = v0 == 0.0 || impl->support_end == 0.0;
  impl->value_fn = std::move(spec.value);
  impl->slope_fn = std::move(spec.slope);
  impl->jumps = std::move(spec.jumps);
  for (const auto& j : impl->jumps) {
    if (!(j.drop > 0.0) || !(j.s > 0.0)) throw DomainError("jumps need s > 0 and a positive drop");
  }
  for (double b : spec.breakpoints) {
    if (b > 0.0 && b < impl->support_end) impl->knots.push_back(b);
  }
  for (const auto& j : impl->jumps) {
    if (j.s < impl->support_end) impl->knots.push_back(j.s);
  }
  if (std::isfinite(impl->support_end) && impl->support_end > 0.0) {
    impl->knots.push_back(impl->support_end);
    const double v_end = impl->value_fn(impl->support_end);
    if (v_end > 0.0) impl->jumps.push_back({impl->support_end, v_end});
  }
  std::sort(impl->knots.begin(), impl->knots.end());
  impl->knots.erase(std::unique(impl->knots.begin(), impl->knots.end()), impl->knots.end());
  std::sort(impl->jumps.begin(), impl->jumps.end(), [](const Jump& a, const Jump& b) { return a.s < b.s; });
  for (double h : spec.scale_hints) {
    if (h > 0.0 && h < impl->support_end) impl->hints.push_back(h);
  }
  std::sort(impl->hints.begin(), impl->hints.end());
  if (impl->zero) {
    impl->jumps.clear();
    impl->knots.clear();
    impl->hints.clear();
    impl->support_end = 0.0;
  }
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::step(double height, double width, std::string name) {
  if (!(height >= 0.0) || !(width > 0.0)) throw DomainError("step profile needs height >= 0 and width > 0");
  return from_samples({0.0, width}, {height, height}, Tail{TailKind::compact, width}, std::move(name));
}

double RadialProfile::value(double s) const {
  if (!(s >= 0.0)) throw DomainError("profile evaluated at negative s");
  const Impl& m = *impl_;
  if (m.zero || s >= m.support_end) return 0.0;
  if (m.value_fn) return m.scale * m.value_fn(s);
  double v = 0.0;
  m.grid_eval(s, &v, nullptr);
  return m.scale * v;
}

double RadialProfile::slope(double s) const {
  if (!(s >= 0.0)) throw DomainError("profile slope evaluated at negative s");
  const Impl& m = *impl_;
  if (m.zero || s >= m.support_end) return 0.0;
  if (m.slope_fn) return m.scale * m.slope_fn(s);
  double d = 0.0;
  m.grid_eval(s, nullptr, &d);
  return m.scale * d;
}

bool RadialProfile::is_zero() const { return impl_->zero; }
bool RadialProfile::has_closure() const { return static_cast<bool>(impl_->value_fn); }
const std::vector<Jump>& RadialProfile::jumps() const { return impl_->jumps; }
const Tail& RadialProfile::tail() const { return impl_->tail; }
double RadialProfile::support_end() const { return impl_->support_end; }
const std::vector<double>& RadialProfile::knots() const { return impl_->knots; }
const std::vector<double>& RadialProfile::scale_hints() const { return impl_->hints; }
double RadialProfile::clamped_mass() const { return impl_->clamped_mass; }
const std::vector<RadialProfile::Segment>& RadialProfile::segments() const { return impl_->segments; }
const std::string& RadialProfile::name() const { return impl_->name; }
double RadialProfile::scale_factor() const { return impl_->scale; }

RadialProfile RadialProfile::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("profile scale factor must be finite and >= 0");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->scale *= c;
  for (auto& j : impl->jumps) j.drop *= c;
  if (c == 0.0) {
    impl->zero = true;
    impl->jumps.clear();
    impl->knots.clear();
    impl->hints.clear();
    impl->support_end = 0.0;
  }
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::renamed(std::string name) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->name = std::move(name);
  return RadialProfile(std::move(impl));
}

RadialProfile RadialProfile::sampled(const std::vector<double>& nodes) const {
  if (nodes.empty() || nodes.front() != 0.0) throw DomainError("sampling nodes must start at 0");
  const Impl& m = *impl_;
  const double end = m.support_end;
  std::vector<double> cuts;
  for (const auto& j : m.jumps) {
    if (j.s < end) cuts.push_back(j.s);
  }
  std::vector<Segment> segs(1);
  std::size_t next_cut = 0;
  auto push = [&](double s, double v, double d) {
    auto& seg = segs.back();
    seg.s.push_back(s);
    seg.v.push_back(v);
    seg.slope.push_back(d);
  };
  auto slope_at = [&](double s) { return m.slope_fn ? slope(s) : std::numeric_limits<double>::quiet_NaN(); };
  for (double s : nodes) {
    if (s >= end) break;
    while (next_cut < cuts.size() && cuts[next_cut] <= s) {
      const double c = cuts[next_cut++];
      if (c > segs.back().s.back()) {
        const double left = value(c) + m.jumps[next_cut - 1].drop;
        push(c, left, slope_at(c));
      }
      segs.emplace_back();
      push(c, value(c), slope_at(c));
    }
    if (!segs.back().s.empty() && s <= segs.back().s.back()) continue;
    push(s, value(s), slope_at(s));
  }
  Tail tail = m.tail;
  if (std::isfinite(end)) {
    const double last = segs.back().s.back();
    if (end > last) {
      double left = 0.0;
      if (m.value_fn) {
        left = m.scale * m.value_fn(end);
      } else {
        left = value(std::nextafter(end, 0.0));
      }
      push(end, std::min(left, segs.back().v.back()), slope_at(std::nextafter(end, 0.0)));
    }
    tail = Tail{TailKind::compact, end};
  }
  if (!m.slope_fn) {
    for (auto& seg : segs) seg.slope.clear();
  }
  return from_segments(std::move(segs), tail, m.name);
}

QuadratureConfig profile_quadrature(double rel_tol) {
  QuadratureConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = 1e-300;
  cfg.max_depth = 50;
  cfg.max_intervals = 4000;
  return cfg;
}

namespace {

void add(Measured& total, const IntegrationResult& r) {
  total.value += r.value;
  total.error += r.error;
  total.converged = total.converged && r.converged;
}

IntegrationResult integrate_piece(const RadialProfile::Fn& g, double a, double b, const QuadratureConfig& cfg) {
  if (a > 0.0 && b / a > 4.0) {
    const double la = std::log(a);
    const double lb = std::log(b);
    return integrate_adaptive(
        [&](double y) {
          const double s = std::exp(y);
          const double v = g(s);
          return v == 0.0 ? 0.0 : v * s;
        },
        la, lb, cfg);
  }
  return integrate_adaptive(g, a, b, cfg);
}

}  // namespace

Measured integrate_measure_line(const RadialProfile::Fn& g, const RadialProfile& profile, const QuadratureConfig& cfg) {
  Measured total;
  if (profile.is_zero()) return total;
  const double end = profile.support_end();
  std::vector<double> points = profile.knots();
  for (double h : profile.scale_hints()) points.push_back(h);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.empty()) points.push_back(std::isfinite(end) ? end : 1.0);

  // A piece far below the whole integral cannot reach rel_tol on its own
  // value without hitting roundoff; floor its absolute goal using a coarse
  // estimate of the total.
  QuadratureConfig coarse = cfg;
  coarse.rel_tol = 1e-3;
  coarse.max_intervals = 8;
  double estimate = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    estimate += std::abs(integrate_piece(g, points[i], points[i + 1], coarse).value);
  }
  auto local = [&] {
    QuadratureConfig c = cfg;
    const double scale = std::max(estimate, std::abs(total.value));
    if (std::isfinite(scale)) c.abs_tol = std::max(cfg.abs_tol, 1e-3 * cfg.rel_tol * scale);
    return c;
  };
  for (std::size_t i = 0; i + 1 < points.size(); ++i) add(total, integrate_piece(g, points[i], points[i + 1], local()));

  const double negligible = 0.1 * cfg.rel_tol;
  auto panels = [&](auto&& map, double limit_y) {
    int quiet = 0;
    double y0 = 0.0;
    double width = 1.0;
    while (y0 < limit_y) {
      const double y1 = std::min(y0 + width, limit_y);
      auto r = integrate_adaptive(map, y0, y1, local());
      add(total, r);
      if (std::abs(r.value) <= negligible * std::abs(total.value)) {
        if (++quiet >= 2) return true;
      } else {
        quiet = 0;
      }
      y0 = y1;
      width *= 2.0;
    }
    return quiet >= 1;
  };

  // Head [0, points[0]] in y = log(points[0] / s).
  const double first = points.front();
  const double head_limit = std::log(first) - std::log(1e-300);
  panels(
      [&](double y) {
        const double s = first * std::exp(-y);
        if (s <= 0.0) return 0.0;
        const double v = g(s);
        return v == 0.0 ? 0.0 : v * s;
      },
      head_limit);

  if (!std::isfinite(end)) {
    const double last = points.back();
    const double tail_limit = std::log(1e300) - std::log(last);
    const bool settled = panels(
        [&](double y) {
          const double s = last * std::exp(y);
          const double v = g(s);
          return v == 0.0 ? 0.0 : v * s;
        },
        tail_limit);
    if (!settled) total.converged = false;
  }
  if (!std::isfinite(total.value)) total.converged = false;
  return total;
}

}  // namespace hypsob
