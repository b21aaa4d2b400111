#include "cubsc/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace cubsc {

namespace {
using i128 = __int128;

std::int64_t checked_narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Frac overflow");
  return static_cast<std::int64_t>(v);
}
}  // namespace

Frac::Frac(std::int64_t n) : num_(n), den_(1) {}

Frac::Frac(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
  if (d == 0) throw std::domain_error("Frac with zero denominator");
  normalize();
}

void Frac::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

Frac Frac::operator-() const {
  Frac r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Frac& Frac::operator+=(const Frac& o) {
  const i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
  const i128 d = i128(den_) * o.den_;
  num_ = checked_narrow(n);
  den_ = checked_narrow(d);
  normalize();
  return *this;
}

Frac& Frac::operator-=(const Frac& o) { return *this += -o; }

Frac& Frac::operator*=(const Frac& o) {
  num_ = checked_narrow(i128(num_) * o.num_);
  den_ = checked_narrow(i128(den_) * o.den_);
  normalize();
  return *this;
}

Frac& Frac::operator/=(const Frac& o) {
  if (o.num_ == 0) throw std::domain_error("Frac division by zero");
  num_ = checked_narrow(i128(num_) * o.den_);
  den_ = checked_narrow(i128(den_) * o.num_);
  normalize();
  return *this;
}

std::strong_ordering Frac::operator<=>(const Frac& o) const {
  const i128 l = i128(num_) * o.den_;
  const i128 r = i128(o.num_) * den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Frac::str() const {
  std::string s = std::to_string(num_);
  if (den_ != 1) {
    s += '/';
    s += std::to_string(den_);
  }
  return s;
}

std::optional<Frac> Frac::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t n = 0, d = 1;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [pn, ecn] = std::from_chars(b, e, n);
  if (ecn != std::errc{}) return std::nullopt;
  if (pn != e) {
    if (*pn != '/') return std::nullopt;
    auto [pd, ecd] = std::from_chars(pn + 1, e, d);
    if (ecd != std::errc{} || pd != e || d == 0) return std::nullopt;
  }
  return Frac(n, d);
}

}  // namespace cubsc
