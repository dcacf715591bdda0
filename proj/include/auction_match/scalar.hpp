#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace auction_match {

/// Exact rational number used for every money, utility, weight and
/// probability quantity. There is no rounding anywhere.
///
/// Text form is either an integer ("7", "-1"), a finite decimal ("0.25")
/// or a fraction ("1/3"). `to_string` always emits the canonical reduced
/// form, which `parse` reads back losslessly.
class Scalar {
 public:
  Scalar() = default;
  Scalar(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Scalar(std::int64_t numerator, std::int64_t denominator);

  /// Throws std::invalid_argument on malformed text or a zero denominator.
  static Scalar parse(std::string_view text);

  std::string to_string() const;
  bool is_integer() const;
  int sign() const;
  double to_double() const;

  Scalar& operator+=(const Scalar& other);
  Scalar& operator-=(const Scalar& other);
  Scalar& operator*=(const Scalar& other);
  Scalar& operator/=(const Scalar& other);

  friend Scalar operator+(Scalar lhs, const Scalar& rhs) { return lhs += rhs; }
  friend Scalar operator-(Scalar lhs, const Scalar& rhs) { return lhs -= rhs; }
  friend Scalar operator*(Scalar lhs, const Scalar& rhs) { return lhs *= rhs; }
  friend Scalar operator/(Scalar lhs, const Scalar& rhs) { return lhs /= rhs; }
  Scalar operator-() const;

  friend bool operator==(const Scalar& lhs, const Scalar& rhs);
  friend std::strong_ordering operator<=>(const Scalar& lhs, const Scalar& rhs);

 private:
  explicit Scalar(boost::multiprecision::mpq_rational value)
      : value_(std::move(value)) {}

  boost::multiprecision::mpq_rational value_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& value);

inline const Scalar& max(const Scalar& a, const Scalar& b) {
  return a < b ? b : a;
}
inline const Scalar& min(const Scalar& a, const Scalar& b) {
  return b < a ? b : a;
}

}  // namespace auction_match
