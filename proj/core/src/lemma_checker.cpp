#include "hypsob/lemma_checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/output.hpp"
#include "hypsob/params.hpp"
#include "hypsob/parallel.hpp"
#include "hypsob/quadrature.hpp"

namespace hypsob {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log(1 + Phi(t)^p)
double log_denominator(int n, double p, double t) {
  if (t == 0.0) return 0.0;
  const double lp = p * volume_map(n).log_phi(t);
  return lp > 0.0 ? lp + std::log1p(std::exp(-lp)) : std::log1p(std::exp(lp));
}

MarginRow evaluate_row(int n, double p, double t) {
  MarginRow row;
  row.t = t;
  if (t == 0.0) return row;
  const auto f = pointwise_margin(n, p, t);
  row.F = f.value;
  row.cancellation = f.cancellation;
  row.margin = f.value.mantissa == 0.0 ? 0.0 : f.value.mantissa * std::exp(f.value.log_scale - log_denominator(n, p, t));
  row.derivative = margin_derivative_factor(n, p, t).value.mantissa;
  return row;
}

void summarize(MarginTable& table) {
  table.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    if (row.margin < table.min_margin) {
      table.min_margin = row.margin;
      table.min_margin_t = row.t;
    }
  }
  if (table.rows.empty()) table.min_margin = 0.0;
}

}  // namespace

std::string to_string(LemmaMode mode) { return mode == LemmaMode::verify ? "verify" : "find_violation"; }

std::vector<double> LemmaGrid::nodes() const {
  if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) {
    throw DomainError("LemmaGrid: need 0 < t_min < t_max and per_decade >= 1");
  }
  std::vector<double> out{0.0};
  for (double t : log_grid(t_min, t_max, per_decade)) out.push_back(t);
  return out;
}

bool MarginTable::passed() const {
  if (mode == LemmaMode::find_violation) return violation.has_value();
  return min_margin >= -tolerance && monotone_ok && derivative_ok;
}

MarginTable verify_lemma(int n, double p, const LemmaGrid& grid, double tolerance) {
  if (n < 2 || !(p >= Params::lemma_boundary(n))) {
    throw DomainError(fmt::format("verify_lemma: requires p >= 2 for n = 2 and p >= 2n/(n-1) = {:.17g} for n >= 3 "
                                  "(got n = {}, p = {})",
                                  n < 2 ? 2.0 : Params::lemma_boundary(n), n, p));
  }
  MarginTable table;
  table.n = n;
  table.p = p;
  table.mode = LemmaMode::verify;
  table.tolerance = tolerance;
  const auto ts = grid.nodes();
  table.rows = parallel_map<MarginRow>(ts.size(), grid.threads, [&](std::size_t i) { return evaluate_row(n, p, ts[i]); });
  table.scan_limit = ts.back();
  summarize(table);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.derivative < -tolerance) table.derivative_ok = false;
    if (i == 0) continue;
    const auto& prev = table.rows[i - 1];
    const double shrink = std::exp(log_denominator(n, p, prev.t) - log_denominator(n, p, row.t));
    if (row.margin - prev.margin * shrink < -tolerance) table.monotone_ok = false;
  }
  return table;
}

MarginTable find_violation(int n, double p, double t_max, double cap) {
  const bool below = n >= 3 ? p < Params::lemma_boundary(n) : (n == 2 && p < 2.0);
  if (!below || !(p >= 1.0)) {
    throw DomainError(fmt::format("find_violation: requires 1 <= p < 2n/(n-1) for n >= 3 or 1 <= p < 2 for n = 2 "
                                  "(got n = {}, p = {})",
                                  n, p));
  }
  if (!(t_max > 1e-2)) throw DomainError("find_violation: t_max must exceed 1e-2");
  MarginTable table;
  table.n = n;
  table.p = p;
  table.mode = LemmaMode::find_violation;
  const double crossing = n >= 3 ? asymptotic_crossing(n, p) : kNaN;

  auto locate = [&](double lo, double hi) {
    // F(lo) >= 0 > F(hi); lo = 0 means F < 0 from the start of the scan, so
    // hi itself is reported.
    for (int it = 0; lo > 0.0 && it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (pointwise_margin(n, p, mid).value.mantissa < 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Violation v;
    v.t = hi;
    v.F = pointwise_margin(n, p, hi).value;
    v.asymptotic_crossing = crossing;
    if (n >= 3) v.asymptotic_F = asymptotic_F_scaled(n, p, hi);
    return v;
  };
  auto scan = [&](const std::vector<double>& ts) {
    for (double t : ts) {
      const double prev = table.rows.empty() ? 0.0 : table.rows.back().t;
      table.rows.push_back(evaluate_row(n, p, t));
      table.scan_limit = t;
      if (table.rows.back().F.mantissa < 0.0) {
        table.violation = locate(prev, t);
        return true;
      }
    }
    return false;
  };

  std::vector<double> ts = log_grid(1e-2, t_max, 100);
  if (std::isfinite(crossing) && crossing > 1e-2 && crossing < t_max) {
    ts.push_back(crossing);
    std::sort(ts.begin(), ts.end());
  }
  if (!scan(ts) && std::isfinite(crossing) && t_max < cap) {
    const double limit = std::min(cap, 2.0 * crossing + 10.0);
    std::vector<double> more;
    for (double t = t_max + 0.05; t <= limit + 1e-12; t += 0.05) more.push_back(t);
    table.extended_range = scan(more);
  }
  table.inconclusive = !table.violation.has_value();
  summarize(table);
  return table;
}

std::string margins_to_csv(const MarginTable& table) {
  std::string out = "t,F,margin\n";
  for (const auto& row : table.rows) {
    out += format_number(row.t) + "," + format_scaled(row.F) + "," + format_number(row.margin) + "\n";
  }
  return out;
}

namespace {

void write_scaled(JsonWriter& w, const ScaledValue& v) {
  w.begin_object();
  w.field("decimal", format_scaled(v));
  w.field("mantissa", v.mantissa);
  w.field("log_scale", v.log_scale);
  w.end_object();
}

}  // namespace

std::string to_json(const MarginTable& table) {
  JsonWriter w;
  w.begin_object();
  w.field("n", table.n);
  w.field("p", table.p);
  w.field("mode", to_string(table.mode));
  w.field("tolerance", table.tolerance);
  w.field("points", static_cast<int>(table.rows.size()));
  w.field("t_first", table.rows.empty() ? 0.0 : table.rows.front().t);
  w.field("scan_limit", table.scan_limit);
  w.field("min_margin", table.min_margin);
  w.field("min_margin_t", table.min_margin_t);
  if (table.mode == LemmaMode::verify) {
    w.field("monotone_ok", table.monotone_ok);
    w.field("derivative_ok", table.derivative_ok);
  }
  w.key("violation");
  if (table.violation) {
    const auto& v = *table.violation;
    w.begin_object();
    w.field("t", v.t);
    w.key("F");
    write_scaled(w, v.F);
    w.field("asymptotic_crossing", v.asymptotic_crossing);
    w.key("asymptotic_F");
    if (v.asymptotic_F) {
      write_scaled(w, *v.asymptotic_F);
    } else {
      w.null();
    }
    w.end_object();
  } else {
    w.null();
  }
  w.field("extended_range", table.extended_range);
  w.field("inconclusive", table.inconclusive);
  w.field("passed", table.passed());
  w.end_object();
  return w.str();
}

}  // namespace hypsob
