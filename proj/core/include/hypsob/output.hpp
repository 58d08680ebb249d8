#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hypsob {

/// "%.17g"; non-finite values become nan, inf, -inf.
std::string format_number(double x);

/// Minimal streaming JSON writer with 17-significant-digit numbers. Non-finite
/// numbers are written as null. Indents two spaces per level.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);
  JsonWriter& value(double x);
  JsonWriter& value(int x);
  JsonWriter& value(long x);
  JsonWriter& value(bool x);
  JsonWriter& value(std::string_view text);
  JsonWriter& value(const char* text) { return value(std::string_view(text)); }
  JsonWriter& null();

  template <class T>
  JsonWriter& field(std::string_view name, const T& x) {
    key(name);
    return value(x);
  }

  /// Finished document with a trailing newline.
  std::string str() const;

 private:
  void before_value();
  void newline();

  std::string out_;
  std::vector<bool> first_;  // per open container: no element written yet
  std::vector<bool> is_object_;
  bool after_key_ = false;
};

std::string json_escape(std::string_view text);

/// Quote a CSV cell when it contains a separator, quote or newline.
std::string csv_cell(std::string_view text);

/// Write via a temporary sibling file and rename, creating parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hypsob
