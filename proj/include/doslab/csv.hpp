#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace doslab {

inline constexpr const char* kVersion = "0.1.0";

/// CSV text with a block of "# key=value" metadata lines on top. Numbers
/// are written with 17 significant digits and '.' as decimal point.
class CsvWriter {
 public:
  void meta(std::string key, std::string value);
  void columns(std::vector<std::string> names);
  void row(std::span<const double> values);
  /// Comment line after the rows.
  void trailer(std::string line);
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
  std::vector<std::string> trailer_;
};

/// Writes to path.tmp.<pid> and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace doslab
