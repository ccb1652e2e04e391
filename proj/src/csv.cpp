#include "doslab/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doslab/error.hpp"
#include "doslab/model.hpp"

namespace doslab {

void CsvWriter::meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }

void CsvWriter::columns(std::vector<std::string> names) { columns_ = std::move(names); }

void CsvWriter::row(std::span<const double> values) {
  require(values.size() == columns_.size(), "row width does not match the column count");
  std::string line;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) line += ',';
    line += format_double(values[k]);
  }
  rows_.push_back(std::move(line));
}

void CsvWriter::trailer(std::string line) { trailer_.push_back(std::move(line)); }

std::string CsvWriter::str() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) out += (k ? "," : "") + columns_[k];
  out += "\n";
  for (const auto& r : rows_) out += r + "\n";
  for (const auto& t : trailer_) out += "# " + t + "\n";
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(f), "cannot open '" + tmp + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    require(static_cast<bool>(f), "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace doslab
