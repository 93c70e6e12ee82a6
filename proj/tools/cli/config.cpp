#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace sloc::cli {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

}  // namespace

std::map<std::string, int> locate_keys(const std::string& text) {
  struct Frame {
    std::string pointer;
    bool object = false;
    bool expect_key = false;
    std::string key;
    int index = 0;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  auto child = [&]() {
    if (stack.empty()) return std::string();
    const Frame& f = stack.back();
    return f.pointer + "/" + (f.object ? escape_token(f.key) : std::to_string(f.index));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          ++i;
          s += text[i];  // escapes only matter for matching key text
        } else {
          if (text[i] == '\n') ++line;
          s += text[i];
        }
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines[child()] = line;
      }
    } else if (c == '{' || c == '[') {
      const std::string ptr = child();
      if (!lines.count(ptr)) lines[ptr] = line;
      stack.push_back({ptr, c == '{', c == '{', "", 0});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',' && !stack.empty()) {
      if (stack.back().object) stack.back().expect_key = true;
      else ++stack.back().index;
    }
  }
  return lines;
}

Config Config::parse(const std::string& text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  cfg.text_ = text;
  try {
    cfg.root_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(cfg.source_ + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  if (!cfg.root_.is_object()) throw ConfigError(cfg.source_ + ":1: top level must be an object");
  cfg.lines_ = locate_keys(text);
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::command() const { return string("/command"); }

bool Config::has(const std::string& ptr) const {
  return root_.contains(nlohmann::json::json_pointer(ptr));
}

int Config::line(const std::string& ptr) const {
  std::string p = ptr;
  while (true) {
    if (auto it = lines_.find(p); it != lines_.end()) return it->second;
    const auto slash = p.rfind('/');
    if (slash == std::string::npos || p.empty()) return 1;
    p = p.substr(0, slash);
  }
}

void Config::fail(const std::string& ptr, const std::string& msg) const {
  throw ConfigError(source_ + ":" + std::to_string(line(ptr)) + ": " + ptr + ": " + msg);
}

const nlohmann::json& Config::at(const std::string& ptr) const {
  if (!has(ptr)) fail(ptr, "required key is missing");
  return root_.at(nlohmann::json::json_pointer(ptr));
}

double Config::number(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_number()) fail(ptr, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ptr, "expected a finite number");
  return d;
}

double Config::number(const std::string& ptr, double fallback) const {
  return has(ptr) ? number(ptr) : fallback;
}

std::optional<double> Config::opt_number(const std::string& ptr) const {
  if (!has(ptr)) return std::nullopt;
  return number(ptr);
}

int Config::integer(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_number_integer()) fail(ptr, "expected an integer");
  return v.get<int>();
}

int Config::integer(const std::string& ptr, int fallback) const {
  return has(ptr) ? integer(ptr) : fallback;
}

std::uint64_t Config::uint64(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_number_unsigned()) fail(ptr, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string Config::string(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_string()) fail(ptr, "expected a string");
  return v.get<std::string>();
}

std::string Config::string(const std::string& ptr, const std::string& fallback) const {
  return has(ptr) ? string(ptr) : fallback;
}

bool Config::boolean(const std::string& ptr, bool fallback) const {
  if (!has(ptr)) return fallback;
  const auto& v = at(ptr);
  if (!v.is_boolean()) fail(ptr, "expected true or false");
  return v.get<bool>();
}

Vec2 Config::vec2(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(ptr, "expected a point [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> Config::numbers(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_array()) fail(ptr, "expected a list of numbers");
  if (v.empty()) fail(ptr, "list must not be empty");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(ptr, "entry " + std::to_string(i) + " is not a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<Vec2> Config::vec2s(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_array() || v.empty()) fail(ptr, "expected a nonempty list of points");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec2(ptr + "/" + std::to_string(i)));
  return out;
}

std::vector<std::uint64_t> Config::uint64s(const std::string& ptr) const {
  const auto& v = at(ptr);
  if (!v.is_array() || v.empty()) fail(ptr, "expected a nonempty list of seeds");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(uint64(ptr + "/" + std::to_string(i)));
  return out;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"lattice", {"kind", "nx", "ny", "boundary", "t", "t_c_t", "phi_rad", "M_t", "right", "n_cells",
                   "t1_t", "t2_t"}},
      {"probe", {"x_al", "rho_al", "shape"}},
      {"localizer", {"kappa_t_per_al", "energy_t", "C_F", "a", "b", "c", "zero_tol"}},
      {"disorder", {"lambda_t", "seed", "disk_center_al", "disk_radius_al"}},
      {"sweep", {"rho_al", "kappa_t_per_al", "path_al", "samples", "tracked", "dos_energies_t",
                 "dos_sigma_t", "defect_path_al", "defect_samples", "defect_strength_t", "lambda_t",
                 "n_realizations", "seeds", "family", "k", "delta_al", "fourier_table"}},
      {"output", {"prefix", "json"}},
  };
  return s;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> c = {"local-gap", "kappa-bounds", "localizer", "flow", "anderson", "tapering"};
  return c;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string suggest(const std::string& key, const std::set<std::string>& allowed) {
  std::string best;
  std::size_t best_d = 3;
  for (const auto& a : allowed) {
    const std::size_t d = a.rfind(key, 0) == 0 || key.rfind(a, 0) == 0 ? 1 : edit_distance(key, a);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best.empty() ? "" : " (did you mean '" + best + "'?)";
}

}  // namespace

void validate_schema(const Config& cfg) {
  if (!cfg.has("/schema_version")) cfg.fail("/schema_version", "required key is missing");
  if (cfg.integer("/schema_version") != config_schema_version) {
    cfg.fail("/schema_version", "unsupported schema_version (expected " + std::to_string(config_schema_version) + ")");
  }
  const std::string cmd = cfg.command();
  if (!commands().count(cmd)) cfg.fail("/command", "unknown command '" + cmd + "'");
  for (const auto& [block, value] : cfg.root().items()) {
    const std::string ptr = "/" + escape_token(block);
    if (block == "schema_version" || block == "command") continue;
    auto it = schema().find(block);
    if (it == schema().end()) cfg.fail(ptr, "unknown block '" + block + "'");
    if (!value.is_object()) cfg.fail(ptr, "block must be an object");
    for (const auto& [key, inner] : value.items()) {
      const std::string kptr = ptr + "/" + escape_token(key);
      if (!it->second.count(key)) cfg.fail(kptr, "unknown key '" + key + "'" + suggest(key, it->second));
      if (block == "lattice" && key == "right") {
        static const std::set<std::string> side = {"t", "t_c_t", "phi_rad", "M_t"};
        if (!inner.is_object()) cfg.fail(kptr, "must be an object");
        for (const auto& [k2, v2] : inner.items()) {
          (void)v2;
          if (!side.count(k2)) cfg.fail(kptr + "/" + escape_token(k2), "unknown key '" + k2 + "'" + suggest(k2, side));
        }
      }
    }
  }
  if (cfg.has("/localizer/c")) {
    const double a = cfg.number("/localizer/a", 0.15), b = cfg.number("/localizer/b", 0.5);
    const double c = cfg.number("/localizer/c");
    const double derived = std::sqrt(a / (1.0 - a - b * b));
    if (std::abs(c - derived) > 1e-9 * std::max(1.0, derived)) {
      cfg.fail("/localizer/c", "c does not match sqrt(a / (1 - a - b^2)) = " + std::to_string(derived));
    }
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sloc::cli
