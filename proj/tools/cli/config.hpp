#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <sloc/types.hpp>

namespace sloc::cli {

inline constexpr int config_schema_version = 1;

/// Invalid or malformed configuration; the message carries file:line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line of every object key in a JSON text, by JSON pointer.
std::map<std::string, int> locate_keys(const std::string& text);

/// Parsed scenario configuration with source locations.
class Config {
 public:
  static Config parse(const std::string& text, std::string source = "<config>");
  static Config load(const std::string& path);

  const nlohmann::json& root() const { return root_; }
  const std::string& source() const { return source_; }
  const std::string& text() const { return text_; }
  std::string command() const;

  bool has(const std::string& ptr) const;
  /// Line of the key at ptr, or of its closest located ancestor.
  int line(const std::string& ptr) const;
  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const;

  double number(const std::string& ptr) const;
  double number(const std::string& ptr, double fallback) const;
  std::optional<double> opt_number(const std::string& ptr) const;
  int integer(const std::string& ptr) const;
  int integer(const std::string& ptr, int fallback) const;
  std::uint64_t uint64(const std::string& ptr) const;
  std::string string(const std::string& ptr) const;
  std::string string(const std::string& ptr, const std::string& fallback) const;
  bool boolean(const std::string& ptr, bool fallback) const;
  Vec2 vec2(const std::string& ptr) const;
  std::vector<double> numbers(const std::string& ptr) const;
  std::vector<Vec2> vec2s(const std::string& ptr) const;
  std::vector<std::uint64_t> uint64s(const std::string& ptr) const;

 private:
  const nlohmann::json& at(const std::string& ptr) const;

  nlohmann::json root_;
  std::map<std::string, int> lines_;
  std::string source_;
  std::string text_;
};

/// Rejects unknown blocks and keys, checks schema_version and the command.
void validate_schema(const Config& cfg);

/// FNV-1a 64-bit hash, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sloc::cli
