#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minimax {

/// Raised when a vector operation would produce NaN or Inf.
class NonFiniteValue : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Dense, immutable real vector. Entries are finite and the dimension is
/// positive; both are checked on construction and after every operation.
class RealVector {
 public:
  explicit RealVector(std::vector<double> entries);
  RealVector(std::initializer_list<double> entries);

  static RealVector zeros(std::size_t dim);
  static RealVector filled(std::size_t dim, double value);

  /// Builds entry i from fn(i), left to right.
  template <class Fn>
  static RealVector generate(std::size_t dim, Fn&& fn) {
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = fn(i);
    return RealVector(std::move(out));
  }

  std::size_t dim() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> values() const { return entries_; }
  const std::vector<double>& to_std() const { return entries_; }

  bool operator==(const RealVector&) const = default;

 private:
  std::vector<double> entries_;
};

/// Left-to-right sum of a_i * b_i.
double dot(const RealVector& a, const RealVector& b);
double norm2(const RealVector& a);
/// Returns alpha * x + y.
RealVector axpy(double alpha, const RealVector& x, const RealVector& y);

RealVector add(const RealVector& a, const RealVector& b);
RealVector sub(const RealVector& a, const RealVector& b);
RealVector scale(double alpha, const RealVector& a);
/// ||a - b|| without materializing the difference.
double distance(const RealVector& a, const RealVector& b);
double squared_distance(const RealVector& a, const RealVector& b);
double max_abs(const RealVector& a);

/// Deterministic generator: mt19937_64 (bit-exact by the C++ standard) with
/// uniform doubles taken from the top 53 bits, so streams match across
/// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  RealVector uniform_vector(std::size_t dim, double lo, double hi);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);
/// Strict parse of a full string as a double; throws ValidationError.
double parse_double(std::string_view text);
std::string format_vector(const RealVector& v);
RealVector parse_vector(std::string_view text);

}  // namespace minimax
