#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "hypsob/corpus.hpp"
#include "hypsob/error.hpp"
#include "hypsob/inequality_verifier.hpp"
#include "hypsob/lemma_checker.hpp"
#include "hypsob/output.hpp"
#include "hypsob/parallel.hpp"
#include "hypsob/profile_io.hpp"
#include "hypsob/sharpness_optimizer.hpp"
#include "hypsob/special_constants.hpp"

namespace hypsob::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string out = ".";
  std::string format = "json";
  double rel_tol = 1e-8;
  std::string config;
  int threads = 1;
};

struct Context {
  Global g;
  std::ostream& out;
  std::ostream& err;

  bool json() const { return g.format == "json"; }

  fs::path write(const std::string& name, const std::string& content) const {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (ec) throw UsageError(fmt::format("cannot create output directory {}: {}", g.out, ec.message()));
    const fs::path path = fs::path(g.out) / name;
    write_file_atomic(path, content);
    return path;
  }
};

std::string tag(double x) { return fmt::format("{:.6g}", x); }

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(parse_real(s));
  return out;
}

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& s : items) {
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw UsageError("expected an integer, got '" + s + "'");
    out.push_back(v);
  }
  return out;
}

int need_int(const std::string& text, const char* name) {
  if (text.empty()) throw UsageError(fmt::format("--{} is required", name));
  return parse_int_list({text}).front();
}

double need_real(const std::string& text, const char* name) {
  if (text.empty()) throw UsageError(fmt::format("--{} is required", name));
  return parse_real(text);
}

std::optional<double> maybe_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_real(text);
}

// Reads key=value lines; '#' starts a comment.
std::vector<std::tuple<std::string, std::string, int>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::tuple<std::string, std::string, int>> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key=value", path, number));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(fmt::format("{}:{}: empty key", path, number));
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(key, value, number);
  }
  return out;
}

// Fills options that were not given on the command line from the config file.
void apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
  for (const auto& [key, value, line] : read_config(path)) {
    if (key == "config") throw UsageError(fmt::format("{}:{}: config files cannot include others", path, line));
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (!opt) opt = sub.get_option_no_throw(key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      throw UsageError(fmt::format("{}:{}: unknown key '{}' for command {}", path, line, key, sub.get_name()));
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

VerifierOptions verifier_options(double constant_scale, const std::string& log_weight,
                                 const std::string& log_constant) {
  VerifierOptions opts;
  if (!(constant_scale > 0.0)) throw UsageError("--constant-scale must be > 0");
  opts.constant_scale = constant_scale;
  opts.log_weight = poincare_weight_from_string(log_weight);
  opts.log_constant = log_constant_from_string(log_constant);
  return opts;
}

std::vector<RadialProfile> load_corpus(const std::string& spec, int n, double p) {
  if (spec.empty()) throw UsageError("--corpus is required");
  if (spec == "builtin:standard") return standard_corpus();
  if (spec == "builtin:bubble") return bubble_corpus(n, p);
  if (spec == "builtin:zero") return {RadialProfile::zero().renamed("zero")};
  if (spec.rfind("builtin:", 0) == 0) {
    throw UsageError("unknown builtin corpus '" + spec + "' (expected builtin:standard, builtin:bubble or builtin:zero)");
  }
  return read_corpus(spec);
}

std::vector<InequalityId> inequality_list(const std::vector<std::string>& names) {
  if (names.empty() || (names.size() == 1 && names.front() == "all")) return all_inequalities();
  std::vector<InequalityId> out;
  for (const auto& s : names) out.push_back(inequality_from_string(s));
  return out;
}

// ---------------------------------------------------------------- constants

struct ConstantsArgs {
  std::string n, p, alpha;
};

int cmd_constants(const Context& ctx, const ConstantsArgs& a) {
  const int n = need_int(a.n, "n");
  const Params params(n, need_real(a.p, "p"), maybe_real(a.alpha));
  struct Row {
    const char* name;
    const char* range;
    std::function<double()> value;
  };
  const std::vector<Row> rows = {
      {"S", "1 < p < n", [&] { return sobolev_constant(params); }},
      {"GN", "1 < p < n and alpha given", [&] { return gn_constant(params); }},
      {"b", "p > n", [&] { return morrey_constant(params); }},
      {"C", "p > n", [&] { return linfty_constant(params); }},
      {"L", "n >= 4, 2n/(n-1) <= p < n", [&] { return log_sobolev_constant(params); }},
  };
  std::vector<std::optional<double>> values;
  for (const auto& row : rows) {
    try {
      values.push_back(row.value());
    } catch (const DomainError&) {
      values.push_back(std::nullopt);
    }
  }
  if (std::none_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); })) {
    throw DomainError(fmt::format("no constant is defined for {}", params.describe()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ctx.out << fmt::format("{:<3}{}\n", rows[i].name,
                           values[i] ? format_number(*values[i]) : fmt::format("n/a ({})", rows[i].range));
  }
  if (ctx.json()) {
    JsonWriter w;
    w.begin_object();
    w.field("params", params.describe());
    w.key("constants").begin_array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      w.begin_object();
      w.field("name", rows[i].name);
      w.key("value");
      if (values[i]) {
        w.value(*values[i]);
      } else {
        w.null();
      }
      w.field("range", rows[i].range);
      w.end_object();
    }
    w.end_array();
    w.end_object();
    ctx.write("constants.json", w.str() + "\n");
  } else {
    std::string csv = "name,value,range\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv += fmt::format("{},{},{}\n", rows[i].name, values[i] ? format_number(*values[i]) : "",
                         csv_cell(rows[i].range));
    }
    ctx.write("constants.csv", csv);
  }
  return kPass;
}

// ---------------------------------------------------------------- lemma

struct LemmaArgs {
  std::string mode, n, p;
  double t_min = 1e-4;
  double t_max = 0.0;
  int per_decade = 50;
  double tol = 1e-9;
  double cap = 400.0;
};

int cmd_lemma(const Context& ctx, const LemmaArgs& a) {
  const int n = need_int(a.n, "n");
  const double p = need_real(a.p, "p");
  const std::string stem = fmt::format("lemma_{}_n{}_p{}", a.mode, n, tag(p));
  MarginTable table;
  if (a.mode == "verify") {
    LemmaGrid grid;
    grid.t_min = a.t_min;
    grid.t_max = a.t_max > 0.0 ? a.t_max : 25.0;
    grid.per_decade = a.per_decade;
    grid.threads = ctx.g.threads;
    table = verify_lemma(n, p, grid, a.tol);
  } else {
    table = find_violation(n, p, a.t_max > 0.0 ? a.t_max : 40.0, a.cap);
  }
  ctx.write(stem + ".csv", margins_to_csv(table));
  ctx.write(stem + ".json", to_json(table) + "\n");
  if (a.mode == "verify") {
    ctx.out << fmt::format("lemma verify n={} p={}: {} (min margin {} at t={})\n", n, format_number(p),
                           table.passed() ? "pass" : "FAIL", format_number(table.min_margin),
                           format_number(table.min_margin_t));
    return table.passed() ? kPass : kViolation;
  }
  if (table.violation) {
    ctx.out << fmt::format("lemma violate n={} p={}: F < 0 at t={}{}\n", n, format_number(p),
                           format_number(table.violation->t), table.extended_range ? " (extended range)" : "");
    return kPass;
  }
  ctx.out << fmt::format("lemma violate n={} p={}: no violation up to t={}{}\n", n, format_number(p),
                         format_number(table.scan_limit), table.inconclusive ? " (inconclusive)" : "");
  return table.inconclusive ? kInconclusive : kViolation;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> inequality;
  std::string n, p, alpha, corpus;
  double constant_scale = 1.0;
  std::string log_weight = "over_p";
  std::string log_constant = "displayed";
};

int cmd_verify(const Context& ctx, const VerifyArgs& a) {
  const int n = need_int(a.n, "n");
  const double p = need_real(a.p, "p");
  const Params params(n, p, maybe_real(a.alpha));
  const auto opts = verifier_options(a.constant_scale, a.log_weight, a.log_constant);
  const bool all = a.inequality.empty() || a.inequality == std::vector<std::string>{"all"};
  std::vector<InequalityId> ids;
  for (auto id : inequality_list(a.inequality)) {
    if (in_range(id, params)) {
      ids.push_back(id);
    } else if (!all) {
      throw DomainError(fmt::format("{}: requires {} (got {})", to_string(id), range_description(id),
                                    params.describe()));
    }
  }
  if (ids.empty()) throw DomainError("no inequality is stated for " + params.describe());
  const auto corpus = load_corpus(a.corpus, n, p);
  const std::size_t per = corpus.size();
  const auto reports = parallel_map<DeficitReport>(ids.size() * per, ctx.g.threads, [&](std::size_t i) {
    return evaluate_guarded(ids[i / per], corpus[i % per], params, opts);
  });
  const std::string stem =
      fmt::format("verify_{}_n{}_p{}", all ? std::string("all") : to_string(ids.front()), n, tag(p));
  if (ctx.json()) {
    ctx.write(stem + ".json", reports_to_json(reports, ctx.g.rel_tol) + "\n");
  } else {
    ctx.write(stem + ".csv", reports_to_csv(reports, ctx.g.rel_tol));
  }
  std::size_t failed = 0, skipped = 0;
  for (const auto& r : reports) {
    if (!r.evaluated()) ++skipped;
    if (!r.passed(ctx.g.rel_tol)) {
      ++failed;
      ctx.out << fmt::format("FAIL {} {} deficit={} relative_margin={}\n", to_string(r.inequality_id), r.profile,
                             format_number(r.deficit), format_number(r.relative_margin));
    }
  }
  ctx.out << fmt::format("verify {}: {} reports, {} failed, {} skipped\n", params.describe(), reports.size(), failed,
                         skipped);
  return failed == 0 ? kPass : kViolation;
}

// ---------------------------------------------------------------- sharpness

struct SharpnessArgs {
  std::string inequality = "poincare_sobolev";
  std::string n, p, alpha;
  std::string family = "truncated_bubble";
  std::vector<std::string> start;
  int max_evals = 200;
  std::uint64_t seed = 0;
  double gap_max = 0.05;
  bool no_optimize = false;
  std::string lambda = "1";
  std::string truncation = "1";
  std::string width = "1";
  std::vector<std::string> trend_lambdas = {"1", "0.1", "0.01", "0.001"};
  int trend_extra = 4;
  bool no_trend = false;
  double constant_scale = 1.0;
};

int cmd_sharpness(const Context& ctx, const SharpnessArgs& a) {
  const int n = need_int(a.n, "n");
  const double p = need_real(a.p, "p");
  const Params params(n, p, maybe_real(a.alpha));
  const auto id = inequality_from_string(a.inequality);
  if (!in_range(id, params)) {
    throw DomainError(fmt::format("{}: requires {} (got {})", to_string(id), range_description(id),
                                  params.describe()));
  }
  VerifierOptions opts;
  opts.constant_scale = a.constant_scale;
  const auto family_id = family_from_string(a.family);
  TestFamily family;
  switch (family_id) {
    case FamilyId::truncated_bubble:
      family = TestFamily::truncated_bubble(n, p);
      break;
    case FamilyId::tent:
      family = TestFamily::tent();
      break;
    case FamilyId::exponential:
      family = TestFamily::exponential();
      break;
    case FamilyId::custom:
      throw UsageError("the custom family is only available through the library");
  }
  const double target = target_constant(id, params, opts);
  const std::string stem = fmt::format("sharpness_{}_{}_n{}_p{}", to_string(id), to_string(family_id), n, tag(p));

  if (a.no_optimize) {
    const std::vector<double> x = family_id == FamilyId::truncated_bubble
                                      ? std::vector<double>{parse_real(a.lambda), parse_real(a.truncation)}
                                      : std::vector<double>{parse_real(a.width)};
    const double ratio = deficit_ratio(id, family.generate(x), params, opts);
    const double rel_gap = (ratio - target) / target;
    ctx.out << fmt::format("ratio {}\n", format_number(ratio));
    ctx.out << fmt::format("target {} relative_gap {}\n", format_number(target), format_number(rel_gap));
    JsonWriter w;
    w.begin_object();
    w.field("inequality_id", to_string(id));
    w.field("family_id", to_string(family_id));
    w.key("parameters").begin_object();
    for (std::size_t i = 0; i < x.size(); ++i) w.field(family.parameter_names[i], x[i]);
    w.end_object();
    w.field("ratio", ratio);
    w.field("target", target);
    w.field("relative_gap", rel_gap);
    w.end_object();
    if (ctx.json()) {
      ctx.write(stem + "_single.json", w.str() + "\n");
    } else {
      std::string csv = "ratio,target,relative_gap\n";
      csv += fmt::format("{},{},{}\n", format_number(ratio), format_number(target), format_number(rel_gap));
      ctx.write(stem + "_single.csv", csv);
    }
    return rel_gap < -1e-6 ? kViolation : kPass;
  }

  SearchSpec spec;
  spec.start = parse_list(a.start);
  spec.max_evaluations = a.max_evals;
  spec.seed = a.seed;
  spec.verifier = opts;
  auto result = minimize_ratio(id, params, family, spec);
  if (family_id == FamilyId::truncated_bubble && !a.no_trend) {
    result.trend = concentration_trend(id, params, parse_list(a.trend_lambdas), parse_real(a.truncation), opts,
                                       a.gap_max, a.trend_extra);
  }
  ctx.write(stem + "_trace.csv", trace_to_csv(result));
  if (ctx.json()) {
    ctx.write(stem + ".json", to_json(result) + "\n");
  } else {
    std::string csv = "inequality_id,family_id,n,p,best_ratio,target,gap,relative_gap,evaluations,converged";
    for (const auto& name : result.parameter_names) csv += "," + name;
    csv += "\n";
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}", to_string(id), to_string(family_id), n, format_number(p),
                       format_number(result.best_ratio), format_number(result.target), format_number(result.gap),
                       format_number(result.relative_gap()), result.evaluations, result.converged);
    for (double x : result.best_parameters) csv += "," + format_number(x);
    ctx.write(stem + ".csv", csv + "\n");
  }
  const double rel_gap = result.relative_gap();
  std::string params_text;
  for (std::size_t i = 0; i < result.best_parameters.size(); ++i) {
    params_text += fmt::format(" {}={}", result.parameter_names[i], format_number(result.best_parameters[i]));
  }
  ctx.out << fmt::format("sharpness {} {}: best ratio {} target {} relative gap {} ({} evaluations{}){}\n",
                         to_string(id), params.describe(), format_number(result.best_ratio), format_number(target),
                         format_number(rel_gap), result.evaluations, result.converged ? "" : ", not converged",
                         params_text);
  if (result.trend) {
    const auto& t = *result.trend;
    ctx.out << fmt::format("trend: {} (final lambda {}, relative gap {}{})\n", t.passed ? "pass" : "FAIL",
                           format_number(t.lambdas.back()), format_number(t.final_relative_gap),
                           t.extended ? ", extended past the requested lambdas" : "");
  }
  if (rel_gap < -1e-6) return kViolation;
  if (!result.converged) return kInconclusive;
  if (rel_gap > a.gap_max) return kViolation;
  if (result.trend && !result.trend->passed) return kViolation;
  return kPass;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string mode;
  std::vector<std::string> n, p, p_offset, inequality;
  std::string alpha, corpus;
  std::vector<std::string> lambdas = {"1", "0.1", "0.01", "0.001"};
  std::string truncation = "1";
  double t_max = 25.0;
  int per_decade = 50;
  double tol = 1e-9;
  double constant_scale = 1.0;
  std::string log_weight = "over_p";
  std::string log_constant = "displayed";
};

std::vector<std::pair<int, double>> sweep_pairs(const SweepArgs& a, bool lemma) {
  if (a.n.empty()) throw UsageError("--n is required");
  const auto ns = parse_int_list(a.n);
  std::vector<std::pair<int, double>> out;
  if (!a.p.empty()) {
    for (int n : ns) {
      for (double p : parse_list(a.p)) out.emplace_back(n, p);
    }
    return out;
  }
  if (!lemma && a.p_offset.empty()) throw UsageError("--p or --p-offset is required");
  const auto offsets = a.p_offset.empty() ? std::vector<double>{0.0, 0.2, 1.0} : parse_list(a.p_offset);
  for (int n : ns) {
    for (double d : offsets) out.emplace_back(n, Params::lemma_boundary(n) + d);
  }
  return out;
}

int sweep_lemma(const Context& ctx, const SweepArgs& a) {
  const auto pairs = sweep_pairs(a, true);
  LemmaGrid grid;
  grid.t_max = a.t_max;
  grid.per_decade = a.per_decade;
  const auto tables = parallel_map<MarginTable>(pairs.size(), ctx.g.threads, [&](std::size_t i) {
    return verify_lemma(pairs[i].first, pairs[i].second, grid, a.tol);
  });
  bool all = true;
  std::string csv = "n,p,min_margin,min_margin_t,monotone_ok,derivative_ok,passed\n";
  JsonWriter w;
  w.begin_object();
  w.field("mode", "lemma");
  w.key("rows").begin_array();
  for (const auto& t : tables) {
    all = all && t.passed();
    csv += fmt::format("{},{},{},{},{},{},{}\n", t.n, format_number(t.p), format_number(t.min_margin),
                       format_number(t.min_margin_t), t.monotone_ok, t.derivative_ok, t.passed());
    w.begin_object();
    w.field("n", t.n);
    w.field("p", t.p);
    w.field("min_margin", t.min_margin);
    w.field("min_margin_t", t.min_margin_t);
    w.field("monotone_ok", t.monotone_ok);
    w.field("derivative_ok", t.derivative_ok);
    w.field("passed", t.passed());
    w.end_object();
  }
  w.end_array();
  w.field("passed", all);
  w.end_object();
  if (ctx.json()) {
    ctx.write("sweep_lemma.json", w.str() + "\n");
  } else {
    ctx.write("sweep_lemma.csv", csv);
  }
  ctx.out << fmt::format("sweep lemma: {} (n, p) pairs, {}\n", tables.size(), all ? "all pass" : "FAILURES");
  return all ? kPass : kViolation;
}

int sweep_verify(const Context& ctx, const SweepArgs& a) {
  const auto pairs = sweep_pairs(a, false);
  const auto opts = verifier_options(a.constant_scale, a.log_weight, a.log_constant);
  const auto ids = inequality_list(a.inequality);
  struct Item {
    InequalityId id;
    Params params;
    std::size_t block;
    std::size_t profile;
  };
  std::vector<std::vector<RadialProfile>> corpora;
  std::vector<Item> items;
  const auto alpha = maybe_real(a.alpha);
  for (const auto& [n, p] : pairs) {
    corpora.push_back(load_corpus(a.corpus, n, p));
    for (auto id : ids) {
      Params params(n, p, id == InequalityId::gagliardo_nirenberg && p < n ? alpha : std::nullopt);
      if (!in_range(id, params)) continue;
      for (std::size_t k = 0; k < corpora.back().size(); ++k) items.push_back({id, params, corpora.size() - 1, k});
    }
  }
  if (items.empty()) throw DomainError("no inequality is stated for any requested (n, p)");
  const auto reports = parallel_map<DeficitReport>(items.size(), ctx.g.threads, [&](std::size_t i) {
    return evaluate_guarded(items[i].id, corpora[items[i].block][items[i].profile], items[i].params, opts);
  });
  if (ctx.json()) {
    ctx.write("sweep_verify.json", reports_to_json(reports, ctx.g.rel_tol) + "\n");
  } else {
    ctx.write("sweep_verify.csv", reports_to_csv(reports, ctx.g.rel_tol));
  }
  const auto failed = std::count_if(reports.begin(), reports.end(),
                                    [&](const DeficitReport& r) { return !r.passed(ctx.g.rel_tol); });
  ctx.out << fmt::format("sweep verify: {} reports, {} failed\n", reports.size(), failed);
  return failed == 0 ? kPass : kViolation;
}

int sweep_ratio(const Context& ctx, const SweepArgs& a) {
  const auto pairs = sweep_pairs(a, false);
  const auto lambdas = parse_list(a.lambdas);
  const double truncation = parse_real(a.truncation);
  if (a.inequality.size() > 1) throw UsageError("sweep ratio takes a single --inequality");
  const auto id = a.inequality.empty() ? InequalityId::poincare_sobolev : inequality_from_string(a.inequality.front());
  VerifierOptions opts;
  opts.constant_scale = a.constant_scale;
  for (const auto& [n, p] : pairs) {
    if (!in_range(id, Params(n, p))) {
      throw DomainError(fmt::format("{}: requires {} (got {})", to_string(id), range_description(id),
                                    Params(n, p).describe()));
    }
  }
  const std::size_t per = lambdas.size();
  const auto ratios = parallel_map<double>(pairs.size() * per, ctx.g.threads, [&](std::size_t i) {
    const auto [n, p] = pairs[i / per];
    return deficit_ratio(id, truncated_bubble(n, p, lambdas[i % per], truncation), Params(n, p), opts);
  });
  bool ok = true;
  std::string csv = "inequality_id,n,p,lambda,T,ratio,target,relative_gap\n";
  JsonWriter w;
  w.begin_object();
  w.field("mode", "ratio");
  w.field("inequality_id", to_string(id));
  w.key("rows").begin_array();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto [n, p] = pairs[i / per];
    const double target = target_constant(id, Params(n, p), opts);
    const double rel = (ratios[i] - target) / target;
    ok = ok && rel >= -1e-6;
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(id), n, format_number(p), format_number(lambdas[i % per]),
                       format_number(truncation), format_number(ratios[i]), format_number(target),
                       format_number(rel));
    w.begin_object();
    w.field("n", n);
    w.field("p", p);
    w.field("lambda", lambdas[i % per]);
    w.field("T", truncation);
    w.field("ratio", ratios[i]);
    w.field("target", target);
    w.field("relative_gap", rel);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  if (ctx.json()) {
    ctx.write("sweep_ratio.json", w.str() + "\n");
  } else {
    ctx.write("sweep_ratio.csv", csv);
  }
  ctx.out << fmt::format("sweep ratio: {} evaluations{}\n", ratios.size(), ok ? "" : ", ratio below target");
  return ok ? kPass : kViolation;
}

int cmd_sweep(const Context& ctx, const SweepArgs& a) {
  if (a.mode == "lemma") return sweep_lemma(ctx, a);
  if (a.mode == "verify") return sweep_verify(ctx, a);
  return sweep_ratio(ctx, a);
}

// ---------------------------------------------------------------- corpus

struct CorpusArgs {
  std::string kind = "standard";
  std::string n, p;
};

int cmd_corpus(const Context& ctx, const CorpusArgs& a) {
  std::vector<RadialProfile> profiles;
  if (a.kind == "bubble") {
    profiles = bubble_corpus(need_int(a.n, "n"), need_real(a.p, "p"));
  } else if (a.kind == "zero") {
    profiles = {RadialProfile::zero().renamed("zero")};
  } else {
    profiles = standard_corpus();
  }
  const auto paths = write_corpus(ctx.g.out, profiles);
  ctx.out << fmt::format("wrote {} profiles to {}\n", paths.size(), ctx.g.out);
  return kPass;
}

}  // namespace

double parse_real(const std::string& text) {
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) throw UsageError("expected a number, got '" + text + "'");
    return v;
  };
  const std::string_view s(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const double den = number(s.substr(slash + 1));
    if (den == 0.0) throw UsageError("zero denominator in '" + text + "'");
    return number(s.substr(0, slash)) / den;
  }
  return number(s);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp Poincaré–Sobolev inequalities on hyperbolic space: constants, lemma checks, deficits."};
  app.name("hypsob");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Artifact format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--rel-tol", g.rel_tol, "Relative tolerance for deficit checks")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "key=value config file; flags override it");
  app.add_option("--threads", g.threads, "Worker threads for sweeps")->check(CLI::Range(1, 256));

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Print the sharp constants defined for (n, p, alpha)");
  constants->add_option("--n", ca.n, "Dimension");
  constants->add_option("--p", ca.p, "Exponent (decimal or a/b)");
  constants->add_option("--alpha", ca.alpha, "Gagliardo–Nirenberg alpha");

  LemmaArgs la;
  auto* lemma = app.add_subcommand("lemma", "Check the pointwise comparison or search for its failure");
  lemma->add_option("mode", la.mode, "verify or violate")->required()->check(CLI::IsMember({"verify", "violate"}));
  lemma->add_option("--n", la.n, "Dimension");
  lemma->add_option("--p", la.p, "Exponent (decimal or a/b)");
  lemma->add_option("--t-min", la.t_min, "Smallest positive grid point (verify)");
  lemma->add_option("--t-max", la.t_max, "Largest t (default 25 for verify, 40 for violate)");
  lemma->add_option("--per-decade", la.per_decade, "Grid points per decade (verify)");
  lemma->add_option("--tol", la.tol, "Margin tolerance (verify)");
  lemma->add_option("--cap", la.cap, "Hard limit for the extended violation scan");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Evaluate inequality deficits on a profile corpus");
  verify->add_option("--inequality", va.inequality, "Inequality id(s) or all")->delimiter(',');
  verify->add_option("--n", va.n, "Dimension");
  verify->add_option("--p", va.p, "Exponent (decimal or a/b)");
  verify->add_option("--alpha", va.alpha, "Gagliardo–Nirenberg alpha");
  verify->add_option("--corpus", va.corpus, "Profile file, directory of .prof files, or builtin:<standard|bubble|zero>");
  verify->add_option("--constant-scale", va.constant_scale, "Test hook: strengthen every sharp constant by this factor");
  verify->add_option("--log-weight", va.log_weight, "Poincaré weight in the log-Sobolev term")
      ->check(CLI::IsMember({"over_p", "over_n"}));
  verify->add_option("--log-constant", va.log_constant, "Log-Sobolev constant variant")
      ->check(CLI::IsMember({"displayed", "sharp"}));

  SharpnessArgs sa;
  auto* sharp = app.add_subcommand("sharpness", "Minimize the deficit ratio over a test family");
  sharp->add_option("--inequality", sa.inequality, "Inequality id");
  sharp->add_option("--n", sa.n, "Dimension");
  sharp->add_option("--p", sa.p, "Exponent (decimal or a/b)");
  sharp->add_option("--alpha", sa.alpha, "Gagliardo–Nirenberg alpha");
  sharp->add_option("--family", sa.family, "truncated_bubble, tent or exponential");
  sharp->add_option("--start", sa.start, "Starting parameters")->delimiter(',');
  sharp->add_option("--max-evals", sa.max_evals, "Evaluation budget")->check(CLI::PositiveNumber);
  sharp->add_option("--seed", sa.seed, "Seed for the initial simplex");
  sharp->add_option("--gap-max", sa.gap_max, "Largest accepted relative gap");
  sharp->add_flag("--no-optimize", sa.no_optimize, "Evaluate one profile instead of searching");
  sharp->add_option("--lambda", sa.lambda, "Bubble concentration for --no-optimize");
  sharp->add_option("--T", sa.truncation, "Bubble truncation volume");
  sharp->add_option("--width", sa.width, "Tent or exponential width for --no-optimize");
  sharp->add_option("--trend-lambdas", sa.trend_lambdas, "Concentration sequence for the trend test")->delimiter(',');
  sharp->add_option("--trend-extra", sa.trend_extra, "Extra factor steps allowed to reach --gap-max");
  sharp->add_flag("--no-trend", sa.no_trend, "Skip the concentration trend test");
  sharp->add_option("--constant-scale", sa.constant_scale, "Test hook: strengthen the sharp constant");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Map a check over a parameter grid");
  sweep->add_option("--mode", wa.mode, "lemma, verify or ratio")
      ->check(CLI::IsMember({"lemma", "verify", "ratio"}));
  sweep->add_option("--n", wa.n, "Dimensions")->delimiter(',');
  sweep->add_option("--p", wa.p, "Exponents")->delimiter(',');
  sweep->add_option("--p-offset", wa.p_offset, "Exponents relative to the lemma boundary")->delimiter(',');
  sweep->add_option("--inequality", wa.inequality, "Inequality id(s) or all")->delimiter(',');
  sweep->add_option("--alpha", wa.alpha, "Gagliardo–Nirenberg alpha");
  sweep->add_option("--corpus", wa.corpus, "Profile corpus (verify mode)");
  sweep->add_option("--lambdas", wa.lambdas, "Bubble concentrations (ratio mode)")->delimiter(',');
  sweep->add_option("--T", wa.truncation, "Bubble truncation volume (ratio mode)");
  sweep->add_option("--t-max", wa.t_max, "Largest t (lemma mode)");
  sweep->add_option("--per-decade", wa.per_decade, "Grid points per decade (lemma mode)");
  sweep->add_option("--tol", wa.tol, "Margin tolerance (lemma mode)");
  sweep->add_option("--constant-scale", wa.constant_scale, "Test hook: strengthen every sharp constant");
  sweep->add_option("--log-weight", wa.log_weight, "Poincaré weight in the log-Sobolev term")
      ->check(CLI::IsMember({"over_p", "over_n"}));
  sweep->add_option("--log-constant", wa.log_constant, "Log-Sobolev constant variant")
      ->check(CLI::IsMember({"displayed", "sharp"}));

  CorpusArgs ka;
  auto* corpus = app.add_subcommand("corpus", "Write a built-in profile corpus as .prof files");
  corpus->add_option("--kind", ka.kind, "standard, bubble or zero")->check(CLI::IsMember({"standard", "bubble", "zero"}));
  corpus->add_option("--n", ka.n, "Dimension (bubble)");
  corpus->add_option("--p", ka.p, "Exponent (bubble)");

  for (auto* sub : {constants, lemma, verify, sharp, sweep, corpus}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  Context ctx{g, out, err};
  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!g.config.empty()) apply_config(app, *sub, g.config);
    ctx.g = g;
    if (sub == constants) return cmd_constants(ctx, ca);
    if (sub == lemma) return cmd_lemma(ctx, la);
    if (sub == verify) return cmd_verify(ctx, va);
    if (sub == sharp) return cmd_sharpness(ctx, sa);
    if (sub == sweep) {
      if (wa.mode.empty()) throw UsageError("--mode is required");
      return cmd_sweep(ctx, wa);
    }
    return cmd_corpus(ctx, ka);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hypsob::cli
