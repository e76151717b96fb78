/// @file rational.hpp
/// @brief Exact rational arithmetic for counts, rates, and deltas.
///
/// All rates and rate differences in the harness are exact rationals; floating
/// point enters only in distribution tails and bootstrap percentiles.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pairbench {

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  /// Fixed-point rendering with `decimals` places, rounding half away from zero.
  std::string to_fixed(int decimals) const {
    i128 scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    i128 n = i128(num_ < 0 ? -num_ : num_) * scale;
    i128 rounded = (n + den_ / 2) / den_;
    std::string digits = u128_to_string(rounded);
    if (static_cast<int>(digits.size()) <= decimals)
      digits.insert(0, decimals + 1 - digits.size(), '0');
    std::string out;
    if (num_ < 0 && rounded != 0) out += '-';
    out += digits.substr(0, digits.size() - decimals);
    if (decimals > 0) {
      out += '.';
      out += digits.substr(digits.size() - decimals);
    }
    return out;
  }

  /// Rendering with an explicit sign, the convention for deltas and shifts.
  std::string to_signed_fixed(int decimals) const {
    std::string body = to_fixed(decimals);
    if (!body.empty() && body[0] == '-') return body;
    return (sign() == 0 ? " " : "+") + body;
  }

 private:
  using i128 = __int128;

  static Rational from_i128(i128 num, i128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i128 g = gcd_i128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr i128 kMax = INT64_MAX;
    if (num > kMax || num < -kMax || den > kMax)
      throw std::overflow_error("Rational: overflow after reduction");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static i128 gcd_i128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static std::string u128_to_string(i128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
      s += static_cast<char>('0' + static_cast<int>(v % 10));
      v /= 10;
    }
    return {s.rbegin(), s.rend()};
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_{0};
  std::int64_t den_{1};
};

}  // namespace pairbench
