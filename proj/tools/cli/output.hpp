#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sloc::cli {

/// Shortest round-trip decimal form of a double ("inf", "nan" for specials).
std::string fmt(double v);

/// CSV with optional leading '#' comment lines, built in memory.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void comment(const std::string& line) { comments_.push_back(line); }
  void add(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sloc::cli
