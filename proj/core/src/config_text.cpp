#include "coopnav/config_text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) out.push_back(token);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + value + "'");
}

std::vector<double> parse_numbers(const std::string& key,
                                  const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) out.push_back(parse_double(key, token));
  return out;
}

}  // namespace

ConfigDoc ConfigDoc::parse_string(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    const std::string qualified = section.empty() ? key : section + "." + key;
    doc.entries_[qualified] = value;
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool ConfigDoc::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

double ConfigDoc::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return parse_double(key, it->second);
}

std::uint64_t ConfigDoc::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string value = trim(it->second);
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
  return out;
}

bool ConfigDoc::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string value = trim(it->second);
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string ConfigDoc::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : trim(it->second);
}

Vec3 ConfigDoc::get_vec3(const std::string& key, const Vec3& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const auto nums = parse_numbers(key, it->second);
  if (nums.size() != 3) {
    throw ConfigError(key + ": expected three numbers, got '" + it->second +
                      "'");
  }
  return Vec3(nums[0], nums[1], nums[2]);
}

std::vector<Vec3> ConfigDoc::get_vec3_list(const std::string& key) const {
  std::vector<Vec3> out;
  const auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  for (const std::string& part : split(it->second, ';')) {
    const std::string trimmed = trim(part);
    if (trimmed.empty()) continue;
    const auto nums = parse_numbers(key, trimmed);
    if (nums.size() != 3) {
      throw ConfigError(key + ": each ';'-separated element needs three "
                        "numbers, got '" +
                        trimmed + "'");
    }
    out.emplace_back(nums[0], nums[1], nums[2]);
  }
  return out;
}

std::vector<std::pair<int, int>> ConfigDoc::get_int_pairs(
    const std::string& key) const {
  std::vector<std::pair<int, int>> out;
  const auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  for (const std::string& part : split(it->second, ';')) {
    const std::string trimmed = trim(part);
    if (trimmed.empty()) continue;
    const auto nums = parse_numbers(key, trimmed);
    if (nums.size() != 2) {
      throw ConfigError(key + ": each ';'-separated element needs two "
                        "numbers, got '" +
                        trimmed + "'");
    }
    out.emplace_back(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
  }
  return out;
}

std::vector<std::string> ConfigDoc::subsections(
    const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string needle = prefix + ".";
  for (const auto& [key, value] : entries_) {
    if (key.rfind(needle, 0) != 0) continue;
    const auto rest = key.substr(needle.size());
    const auto dot = rest.find('.');
    if (dot == std::string::npos) continue;
    const std::string name = rest.substr(0, dot);
    if (out.empty() || out.back() != name) {
      if (std::find(out.begin(), out.end(), name) == out.end()) {
        out.push_back(name);
      }
    }
  }
  return out;
}

}  // namespace coopnav
