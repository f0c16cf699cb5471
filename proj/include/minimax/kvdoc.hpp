#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minimax/core.hpp"

namespace minimax {

/// Flat `key=value` document: one entry per line, `#` starts a comment,
/// keys may contain dots for sections (`problem.kappa_target=16`).
/// Later entries override earlier ones with the same key.
class KeyValueDoc {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;  // 0 for entries not read from text
  };

  static KeyValueDoc parse(std::string_view text, const std::string& source = "<input>");
  static KeyValueDoc read_file(const std::string& path);

  void set(const std::string& key, std::string value, int line = 0);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  /// Applies `key=value`; throws ValidationError if malformed.
  void apply_override(std::string_view assignment);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  const Entry* find(const std::string& key) const;
  const std::vector<Entry>& entries() const { return entries_; }

  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Serializes entries in insertion order, LF line endings.
  std::string to_string() const;
  void write_file(const std::string& path) const;

 private:
  [[noreturn]] void fail(const Entry& e, const std::string& what) const;

  std::string source_ = "<input>";
  std::vector<Entry> entries_;
};

/// Closest candidate by edit distance, for "did you mean" diagnostics.
std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates);

std::vector<double> parse_double_list(std::string_view text);
std::string format_double_list(const std::vector<double>& values);

}  // namespace minimax
