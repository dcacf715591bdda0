#include "auction_match/scalar.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace auction_match {

namespace {

using boost::multiprecision::mpq_rational;
using boost::multiprecision::mpz_int;

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad_scalar(std::string_view text) {
  throw std::invalid_argument("malformed number \"" + std::string(text) +
                              "\" (expected integer, decimal or num/den)");
}

/// Decimal digits only; a leading zero would otherwise select octal.
mpz_int parse_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return mpz_int(0);
  return mpz_int(std::string(digits.substr(first)));
}

}  // namespace

Scalar::Scalar(std::int64_t value) : value_(value) {}

Scalar::Scalar(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("zero denominator");
  value_ = mpq_rational(numerator, denominator);
}

Scalar Scalar::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  mpq_rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_scalar(text);
    mpz_int d = parse_integer(den);
    if (d == 0) throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
    value = mpq_rational(parse_integer(num), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty()) bad_scalar(text);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) {
      bad_scalar(text);
    }
    std::string digits = std::string(whole) + std::string(frac);
    mpz_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = mpq_rational(parse_integer(digits), scale);
  } else {
    if (!all_digits(body)) bad_scalar(text);
    value = mpq_rational(parse_integer(body));
  }
  if (negative) value = -value;
  return Scalar(std::move(value));
}

std::string Scalar::to_string() const {
  const auto num = boost::multiprecision::numerator(value_);
  const auto den = boost::multiprecision::denominator(value_);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool Scalar::is_integer() const {
  return boost::multiprecision::denominator(value_) == 1;
}

int Scalar::sign() const { return value_.sign(); }

double Scalar::to_double() const { return value_.convert_to<double>(); }

Scalar& Scalar::operator+=(const Scalar& other) {
  value_ += other.value_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) {
  value_ -= other.value_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& other) {
  value_ *= other.value_;
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& other) {
  if (other.value_ == 0) throw std::domain_error("division by zero");
  value_ /= other.value_;
  return *this;
}

Scalar Scalar::operator-() const { return Scalar(mpq_rational(-value_)); }

bool operator==(const Scalar& lhs, const Scalar& rhs) {
  return lhs.value_ == rhs.value_;
}

std::strong_ordering operator<=>(const Scalar& lhs, const Scalar& rhs) {
  const int c = lhs.value_.compare(rhs.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Scalar& value) {
  return os << value.to_string();
}

}  // namespace auction_match
