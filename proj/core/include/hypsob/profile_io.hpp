#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hypsob/profile.hpp"

namespace hypsob {

/// Profile text format:
///
///   # comment
///   tail=compact:2
///   0 1
///   0.5 0.75
///   ...
///
/// One `s value` pair per line, s strictly increasing from 0, values finite,
/// non-negative and non-increasing. Blank lines and `#` comments are ignored.
/// Errors throw ParseError naming `source` and the line.
RadialProfile parse_profile(std::string_view text, const std::string& source = "<string>", std::string name = {});
/// The profile is named after the file stem.
RadialProfile read_profile(const std::filesystem::path& path);

/// Nodes used when an analytic profile is written out: 0 plus a geometric grid
/// on [1e-6, 1e6] (40 per decade), cut at the support end, which is added.
std::vector<double> default_write_nodes(const RadialProfile& profile);
/// Grid profiles are written node for node; analytic ones are sampled.
std::string format_profile(const RadialProfile& profile);
std::string format_profile(const RadialProfile& profile, const std::vector<double>& nodes);
void write_profile(const std::filesystem::path& path, const RadialProfile& profile);

/// A directory (every *.prof file, sorted by name) or a single file.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& path);
std::vector<RadialProfile> read_corpus(const std::filesystem::path& path);
/// Writes <dir>/<name>.prof for each profile; returns the paths.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir,
                                                const std::vector<RadialProfile>& profiles);

}  // namespace hypsob
