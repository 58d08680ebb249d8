#include "hypsob/profile_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hypsob/error.hpp"
#include "hypsob/output.hpp"

namespace hypsob {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

RadialProfile parse_profile(std::string_view text, const std::string& source, std::string name) {
  bool have_tail = false;
  Tail tail;
  std::vector<double> s;
  std::vector<double> v;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!have_tail) {
      if (line.substr(0, 5) != "tail=") throw ParseError(source, line_no, "expected header 'tail=<kind>:<param>'");
      const auto spec = line.substr(5);
      const auto colon = spec.find(':');
      if (colon == std::string_view::npos) throw ParseError(source, line_no, "tail needs '<kind>:<param>'");
      try {
        tail.kind = tail_kind_from_string(std::string(trim(spec.substr(0, colon))));
      } catch (const DomainError& e) {
        throw ParseError(source, line_no, e.what());
      }
      if (!parse_double(trim(spec.substr(colon + 1)), tail.parameter) || !std::isfinite(tail.parameter)) {
        throw ParseError(source, line_no, "tail parameter is not a finite number");
      }
      have_tail = true;
      continue;
    }
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(source, line_no, "expected 's value'");
    double x = 0.0;
    double y = 0.0;
    if (!parse_double(line.substr(0, sep), x) || !parse_double(trim(line.substr(sep)), y)) {
      throw ParseError(source, line_no, "expected two decimal numbers 's value'");
    }
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError(source, line_no, "non-finite number");
    if (s.empty() && x != 0.0) throw ParseError(source, line_no, "the first node must be s = 0");
    if (!s.empty() && !(x > s.back())) throw ParseError(source, line_no, "s must be strictly increasing");
    if (y < 0.0) throw ParseError(source, line_no, "values must be non-negative");
    if (!v.empty() && y > v.back()) throw ParseError(source, line_no, "values must be non-increasing");
    s.push_back(x);
    v.push_back(y);
  }
  if (!have_tail) throw ParseError(source, 0, "missing header 'tail=<kind>:<param>'");
  if (s.empty()) throw ParseError(source, 0, "no samples");
  if (std::all_of(v.begin(), v.end(), [](double y) { return y == 0.0; })) {
    return RadialProfile::zero().renamed(std::move(name));
  }
  try {
    return RadialProfile::from_samples(std::move(s), std::move(v), tail, std::move(name));
  } catch (const DomainError& e) {
    throw ParseError(source, 0, e.what());
  }
}

RadialProfile read_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_profile(buffer.str(), path.string(), path.stem().string());
}

std::vector<double> default_write_nodes(const RadialProfile& profile) {
  const double end = profile.support_end();
  // concentrated profiles need the grid to reach far below the default range
  double lo = 1e-6;
  for (double h : profile.scale_hints()) lo = std::min(lo, 1e-6 * h);
  std::vector<double> nodes{0.0};
  for (double x : log_grid(lo, 1e6, 40)) {
    if (x < end * (1.0 - 1e-12)) nodes.push_back(x);
  }
  for (double k : profile.knots()) {
    if (k < end) nodes.push_back(k);
  }
  if (std::isfinite(end) && end > 0.0) nodes.push_back(end);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::string format_profile(const RadialProfile& profile, const std::vector<double>& nodes) {
  if (nodes.empty() || nodes.front() != 0.0) throw DomainError("format_profile: nodes must start at 0");
  std::string out;
  if (!profile.name().empty()) out += "# " + profile.name() + "\n";
  if (profile.is_zero()) return out + "tail=compact:0\n0 0\n";
  const double end = profile.support_end();
  out += "tail=" + profile.tail().describe() + "\n";
  double prev = profile.value(0.0);
  for (double x : nodes) {
    if (x > end) break;
    // At the support end keep the left limit; the compact tail drops to 0 there.
    double y = x == end ? profile.value(std::nextafter(end, 0.0)) : profile.value(x);
    y = std::min(y, prev);
    prev = y;
    out += format_number(x) + " " + format_number(y) + "\n";
  }
  return out;
}

std::string format_profile(const RadialProfile& profile) {
  if (!profile.has_closure() && !profile.is_zero()) {
    std::string out;
    if (!profile.name().empty()) out += "# " + profile.name() + "\n";
    out += "tail=" + profile.tail().describe() + "\n";
    const auto& segs = profile.segments();
    if (segs.size() != 1) throw DomainError("format_profile: profiles with interior jumps cannot be written");
    for (std::size_t i = 0; i < segs[0].s.size(); ++i) {
      out += format_number(segs[0].s[i]) + " " + format_number(segs[0].v[i]) + "\n";
    }
    return out;
  }
  return format_profile(profile, default_write_nodes(profile));
}

void write_profile(const std::filesystem::path& path, const RadialProfile& profile) {
  write_file_atomic(path, format_profile(profile));
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return {path};
  if (!fs::is_directory(path, ec)) throw ParseError(path.string(), 0, "no such corpus file or directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".prof") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ParseError(path.string(), 0, "corpus directory contains no .prof files");
  return out;
}

std::vector<RadialProfile> read_corpus(const std::filesystem::path& path) {
  std::vector<RadialProfile> out;
  for (const auto& file : corpus_files(path)) out.push_back(read_profile(file));
  return out;
}

std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir,
                                                const std::vector<RadialProfile>& profiles) {
  std::vector<std::filesystem::path> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& name = profiles[i].name();
    const auto path = dir / ((name.empty() ? fmt::format("profile_{:02}", i) : name) + ".prof");
    write_profile(path, profiles[i]);
    out.push_back(path);
  }
  return out;
}

}  // namespace hypsob
