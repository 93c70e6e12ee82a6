#pragma once

// Small helpers shared by the CLI, golden and acceptance tests.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("sloc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
  double number(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(column(name)));
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Csv parse_csv(const std::string& text) {
  Csv c;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') c.comments.push_back(line);
    else if (c.header.empty()) c.header = split(line);
    else c.rows.push_back(split(line));
  }
  return c;
}

inline bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

/// Integer cells must match exactly, other numeric cells to `rel` relative
/// (absolute floor `abs`), anything else as text. Returns a description of
/// the first mismatch, or an empty string.
inline std::string compare_csv(const Csv& a, const Csv& b, double rel = 1e-6, double abs = 1e-12) {
  if (a.header != b.header) return "headers differ";
  if (a.rows.size() != b.rows.size()) return "row counts differ";
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return "row " + std::to_string(r) + " width differs";
    for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
      const std::string &x = a.rows[r][c], &y = b.rows[r][c];
      if (x == y) continue;
      const std::string where = "row " + std::to_string(r) + " column " + a.header[c] + ": " + x + " vs " + y;
      if (is_integer(x) || is_integer(y)) return where;
      char* ex = nullptr;
      char* ey = nullptr;
      const double vx = std::strtod(x.c_str(), &ex), vy = std::strtod(y.c_str(), &ey);
      if (*ex != '\0' || *ey != '\0') return where;
      if (std::abs(vx - vy) > std::max(abs, rel * std::max(std::abs(vx), std::abs(vy)))) return where;
    }
  }
  return "";
}

}  // namespace testing
