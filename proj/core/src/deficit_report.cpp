#include "hypsob/deficit_report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/output.hpp"

namespace hypsob {

namespace {

const std::vector<std::pair<InequalityId, const char*>>& names() {
  static const std::vector<std::pair<InequalityId, const char*>> table = {
      {InequalityId::key_comparison, "key_comparison"},
      {InequalityId::poincare_sobolev, "poincare_sobolev"},
      {InequalityId::gagliardo_nirenberg, "gagliardo_nirenberg"},
      {InequalityId::morrey_sobolev, "morrey_sobolev"},
      {InequalityId::log_sobolev, "log_sobolev"},
      {InequalityId::mugelli_talenti_sum, "mugelli_talenti_sum"},
      {InequalityId::linfty_inequality, "linfty_inequality"},
      {InequalityId::euclidean_sobolev, "euclidean_sobolev"},
      {InequalityId::euclidean_morrey, "euclidean_morrey"},
  };
  return table;
}

void write_report(JsonWriter& w, const DeficitReport& r, double rel) {
  w.begin_object();
  w.field("inequality_id", to_string(r.inequality_id));
  w.field("profile", r.profile);
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
  w.field("lhs", r.lhs);
  w.field("rhs", r.rhs);
  w.field("deficit", r.deficit);
  w.field("relative_margin", r.relative_margin);
  w.field("quadrature_error", r.quadrature_error);
  w.key("flags").begin_array();
  for (auto f : r.flags) w.value(to_string(f));
  w.end_array();
  w.field("power", r.power);
  w.field("passed", r.passed(rel));
  w.key("diagnostics").begin_object();
  for (const auto& [name, value] : r.diagnostics) w.field(name, value);
  w.end_object();
  if (!r.note.empty()) w.field("note", r.note);
  w.end_object();
}

}  // namespace

std::string to_string(InequalityId id) {
  for (const auto& [key, name] : names()) {
    if (key == id) return name;
  }
  return "unknown";
}

InequalityId inequality_from_string(const std::string& text) {
  for (const auto& [key, name] : names()) {
    if (text == name) return key;
  }
  throw DomainError("unknown inequality '" + text + "'");
}

const std::vector<InequalityId>& all_inequalities() {
  static const std::vector<InequalityId> ids = [] {
    std::vector<InequalityId> out;
    for (const auto& entry : names()) out.push_back(entry.first);
    return out;
  }();
  return ids;
}

std::string to_string(ReportFlag flag) {
  switch (flag) {
    case ReportFlag::divergent:
      return "divergent";
    case ReportFlag::outside_range:
      return "outside_range";
    case ReportFlag::step_profile:
      return "step_profile";
    case ReportFlag::cancellation:
      return "cancellation";
    case ReportFlag::not_converged:
      return "not_converged";
  }
  return "unknown";
}

DeficitReport DeficitReport::make(InequalityId id, const Params& params, double lhs, double rhs,
                                  double quadrature_error, double power) {
  DeficitReport r;
  r.inequality_id = id;
  r.params = params;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deficit = lhs - rhs;
  const double denom = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  r.relative_margin = (lhs == 0.0 && rhs == 0.0) ? 0.0 : r.deficit / denom;
  if (std::isinf(r.deficit) && std::isinf(denom)) r.relative_margin = r.deficit > 0.0 ? 1.0 : -1.0;
  r.quadrature_error = quadrature_error;
  r.power = power;
  return r;
}

DeficitReport DeficitReport::skipped(InequalityId id, const Params& params, ReportFlag why,
                                     const std::string& detail) {
  DeficitReport r;
  r.inequality_id = id;
  r.params = params;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.lhs = r.rhs = r.deficit = r.relative_margin = nan;
  r.quadrature_error = 0.0;
  r.flags.push_back(why);
  r.note = detail;
  return r;
}

void DeficitReport::add_flag(ReportFlag flag) {
  if (!has_flag(flag)) {
    flags.push_back(flag);
    std::sort(flags.begin(), flags.end());
  }
}

bool DeficitReport::has_flag(ReportFlag flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void DeficitReport::add_diagnostic(std::string name, double value) { diagnostics.emplace_back(std::move(name), value); }

double DeficitReport::diagnostic(const std::string& name) const {
  for (const auto& [key, value] : diagnostics) {
    if (key == name) return value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double DeficitReport::scale() const { return std::max(std::abs(lhs), std::abs(rhs)); }

double DeficitReport::tolerance(double rel) const { return std::max(rel * scale(), 10.0 * quadrature_error); }

bool DeficitReport::evaluated() const {
  return !has_flag(ReportFlag::divergent) && !has_flag(ReportFlag::outside_range);
}

bool DeficitReport::passed(double rel) const {
  if (!evaluated()) return true;
  if (has_flag(ReportFlag::step_profile) && !std::isfinite(deficit)) return true;
  if (std::isnan(deficit)) return false;
  return deficit >= -tolerance(rel);
}

std::string to_json(const DeficitReport& report, double rel) {
  JsonWriter w;
  write_report(w, report, rel);
  return w.str();
}

std::string reports_to_json(const std::vector<DeficitReport>& reports, double rel) {
  JsonWriter w;
  w.begin_object();
  w.field("count", static_cast<long>(reports.size()));
  const bool all = std::all_of(reports.begin(), reports.end(), [rel](const DeficitReport& r) { return r.passed(rel); });
  w.field("passed", all);
  w.key("reports").begin_array();
  for (const auto& r : reports) write_report(w, r, rel);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string reports_to_csv(const std::vector<DeficitReport>& reports, double rel) {
  std::string out =
      "inequality_id,profile,n,p,alpha,lhs,rhs,deficit,relative_margin,quadrature_error,flags,power,passed\n";
  for (const auto& r : reports) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      if (i) flags += ';';
      flags += to_string(r.flags[i]);
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.inequality_id), csv_cell(r.profile),
                       r.params.n, format_number(r.params.p), r.params.alpha ? format_number(*r.params.alpha) : "",
                       format_number(r.lhs), format_number(r.rhs), format_number(r.deficit),
                       format_number(r.relative_margin), format_number(r.quadrature_error), flags,
                       format_number(r.power), r.passed(rel) ? "true" : "false");
  }
  return out;
}

}  // namespace hypsob
