#include "minimax/kvdoc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text, const std::string& source) {
  KeyValueDoc doc;
  doc.source_ = source;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": expected key=value, got '" +
                              std::string(line) + "'");
      }
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": empty key");
      }
      doc.set(std::string(key), std::string(trim(line.substr(eq + 1))), line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return doc;
}

KeyValueDoc KeyValueDoc::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void KeyValueDoc::set(const std::string& key, std::string value, int line) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      e.line = line;
      return;
    }
  }
  entries_.push_back({key, std::move(value), line});
}

void KeyValueDoc::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ValidationError("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

bool KeyValueDoc::has(const std::string& key) const { return find(key) != nullptr; }

const KeyValueDoc::Entry* KeyValueDoc::find(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::optional<std::string> KeyValueDoc::get(const std::string& key) const {
  if (const auto* e = find(key)) return e->value;
  return std::nullopt;
}

void KeyValueDoc::fail(const Entry& e, const std::string& what) const {
  std::string where = source_;
  if (e.line > 0) where += ":" + std::to_string(e.line);
  throw ValidationError(where + ": field '" + e.key + "': " + what);
}

std::string KeyValueDoc::require(const std::string& key) const {
  if (const auto* e = find(key)) return e->value;
  throw ValidationError(source_ + ": missing required field '" + key + "'");
}

double KeyValueDoc::require_double(const std::string& key) const {
  const auto* e = find(key);
  if (!e) throw ValidationError(source_ + ": missing required field '" + key + "'");
  try {
    return parse_double(e->value);
  } catch (const ValidationError& err) {
    fail(*e, err.what());
  }
}

double KeyValueDoc::get_double(const std::string& key, double fallback) const {
  return has(key) ? require_double(key) : fallback;
}

std::int64_t KeyValueDoc::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  std::int64_t v = 0;
  const auto& s = e->value;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty()) return v;
  // Accept integral values written in floating notation, e.g. 1e7.
  try {
    const double d = parse_double(s);
    if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
  } catch (const ValidationError&) {
  }
  fail(*e, "expected an integer, got '" + s + "'");
}

std::uint64_t KeyValueDoc::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const auto& s = e->value;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    fail(*e, "expected an unsigned 64-bit integer, got '" + s + "'");
  }
  return v;
}

bool KeyValueDoc::get_bool(const std::string& key, bool fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  fail(*e, "expected true or false, got '" + e->value + "'");
}

std::string KeyValueDoc::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.key;
    out += '=';
    out += e.value;
    out += '\n';
  }
  return out;
}

void KeyValueDoc::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << to_string();
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& c : candidates) {
    const auto d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(trim(text.substr(start, end - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace minimax
