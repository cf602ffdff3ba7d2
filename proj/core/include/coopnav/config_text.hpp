#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coopnav/geometry.hpp"

namespace coopnav {

/// Key/value configuration text with nested [section.subsection] scopes.
/// Lines are `key = value`; `#` starts a comment; list-valued keys
/// separate elements with `;`. Keys are addressed fully qualified, e.g.
/// "robot.2.speed".
class ConfigDoc {
 public:
  static ConfigDoc parse_string(const std::string& text);
  static ConfigDoc parse_file(const std::string& path);

  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  /// "x y z ; x y z ; ..." lists.
  std::vector<Vec3> get_vec3_list(const std::string& key) const;
  /// "a b ; c d ; ..." integer pairs.
  std::vector<std::pair<int, int>> get_int_pairs(const std::string& key) const;

  /// Distinct next-level names under `prefix.` (e.g. robot ids).
  std::vector<std::string> subsections(const std::string& prefix) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace coopnav
