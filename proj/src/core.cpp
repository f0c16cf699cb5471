#include "minimax/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

void check_finite(const std::vector<double>& v, const char* where) {
  for (double e : v) {
    if (!std::isfinite(e)) throw NonFiniteValue(std::string(where) + ": non-finite entry");
  }
}

void check_same_dim(const RealVector& a, const RealVector& b, const char* where) {
  if (a.dim() != b.dim()) {
    throw ContractViolation(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

RealVector::RealVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ContractViolation("RealVector: dimension must be positive");
  check_finite(entries_, "RealVector");
}

RealVector::RealVector(std::initializer_list<double> entries)
    : RealVector(std::vector<double>(entries)) {}

RealVector RealVector::zeros(std::size_t dim) { return RealVector(std::vector<double>(dim, 0.0)); }

RealVector RealVector::filled(std::size_t dim, double value) {
  return RealVector(std::vector<double>(dim, value));
}

double dot(const RealVector& a, const RealVector& b) {
  check_same_dim(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  if (!std::isfinite(acc)) throw NonFiniteValue("dot: non-finite result");
  return acc;
}

double norm2(const RealVector& a) {
  double acc = 0.0;
  for (double e : a.values()) acc += e * e;
  if (!std::isfinite(acc)) throw NonFiniteValue("norm2: non-finite result");
  return std::sqrt(acc);
}

RealVector axpy(double alpha, const RealVector& x, const RealVector& y) {
  check_same_dim(x, y, "axpy");
  return RealVector::generate(x.dim(), [&](std::size_t i) { return alpha * x[i] + y[i]; });
}

RealVector add(const RealVector& a, const RealVector& b) {
  check_same_dim(a, b, "add");
  return RealVector::generate(a.dim(), [&](std::size_t i) { return a[i] + b[i]; });
}

RealVector sub(const RealVector& a, const RealVector& b) {
  check_same_dim(a, b, "sub");
  return RealVector::generate(a.dim(), [&](std::size_t i) { return a[i] - b[i]; });
}

RealVector scale(double alpha, const RealVector& a) {
  return RealVector::generate(a.dim(), [&](std::size_t i) { return alpha * a[i]; });
}

double squared_distance(const RealVector& a, const RealVector& b) {
  check_same_dim(a, b, "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  if (!std::isfinite(acc)) throw NonFiniteValue("distance: non-finite result");
  return acc;
}

double distance(const RealVector& a, const RealVector& b) { return std::sqrt(squared_distance(a, b)); }

double max_abs(const RealVector& a) {
  double m = 0.0;
  for (double e : a.values()) m = std::max(m, std::abs(e));
  return m;
}

RealVector Rng::uniform_vector(std::size_t dim, double lo, double hi) {
  std::vector<double> out(dim);
  for (auto& e : out) e = uniform(lo, hi);
  return RealVector(std::move(out));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  // from_chars rejects a leading '+'
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_vector(const RealVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

RealVector parse_vector(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  try {
    return RealVector(std::move(out));
  } catch (const NonFiniteValue&) {
    throw ValidationError("vector contains non-finite entries: '" + std::string(text) + "'");
  }
}

}  // namespace minimax
