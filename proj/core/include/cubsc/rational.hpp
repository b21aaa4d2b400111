#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cubsc {

/// Exact rational over int64 with gcd normalization.
/// Angle and curvature bookkeeping stores values as rational multiples of pi,
/// so nothing here ever touches floating point.
class Frac {
 public:
  constexpr Frac() = default;
  Frac(std::int64_t n);  // NOLINT: implicit by design, mirrors integer literals
  Frac(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  Frac operator-() const;
  Frac& operator+=(const Frac& o);
  Frac& operator-=(const Frac& o);
  Frac& operator*=(const Frac& o);
  Frac& operator/=(const Frac& o);

  friend Frac operator+(Frac a, const Frac& b) { return a += b; }
  friend Frac operator-(Frac a, const Frac& b) { return a -= b; }
  friend Frac operator*(Frac a, const Frac& b) { return a *= b; }
  friend Frac operator/(Frac a, const Frac& b) { return a /= b; }

  bool operator==(const Frac& o) const = default;
  std::strong_ordering operator<=>(const Frac& o) const;

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }

  /// "p/q" with q omitted when 1, e.g. "1/144", "-3/2", "7".
  std::string str() const;

  /// Accepts "p", "p/q", optional leading '-', whitespace rejected.
  static std::optional<Frac> parse(std::string_view s);

  double approx() const { return static_cast<double>(num_) / static_cast<double>(den_); }

 private:
  void normalize();
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace cubsc
