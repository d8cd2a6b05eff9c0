#pragma once

// Exact signed integers of unbounded magnitude.
//
// BigNumber is the arithmetic oracle for every generated answer and every
// value-level evaluation. Only addition, subtraction, comparison and radix
// conversion are provided.

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace numeracy {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class InvalidBase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidDigit : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Digits of a value in an arbitrary base, most significant first.
struct RadixDigits {
  int base = 10;
  int sign = 1;
  std::vector<int> digits{0};

  // True when every digit is in range, there are no leading zeros and
  // zero carries sign +1.
  bool is_canonical() const;
  friend bool operator==(const RadixDigits&, const RadixDigits&) = default;
};

class BigNumber {
 public:
  BigNumber() = default;  // zero

  static BigNumber from_decimal_string(std::string_view s);
  static BigNumber from_int(std::int64_t v);
  // Builds a value from most-significant-first decimal digits; leading zeros
  // are stripped and a zero result is forced to sign +1.
  static BigNumber from_digits(int sign, std::vector<std::uint8_t> msf_digits);

  std::string to_decimal_string() const;

  int sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return digits_.size() == 1 && digits_[0] == 0; }
  bool is_negative() const noexcept { return sign_ < 0; }
  // Most significant first.
  std::span<const std::uint8_t> digits() const noexcept { return digits_; }
  std::size_t digit_count() const noexcept { return digits_.size(); }

  BigNumber negate() const;
  BigNumber abs() const;

  // Validity assertion used by tests: non-empty magnitude, no leading zeros,
  // digits in [0, 9], no negative zero.
  bool is_canonical() const;

  friend bool operator==(const BigNumber&, const BigNumber&) = default;
  friend std::strong_ordering operator<=>(const BigNumber& a, const BigNumber& b);

 private:
  int sign_ = 1;
  std::vector<std::uint8_t> digits_{0};
};

BigNumber add(const BigNumber& a, const BigNumber& b);
BigNumber sub(const BigNumber& a, const BigNumber& b);

inline BigNumber operator+(const BigNumber& a, const BigNumber& b) { return add(a, b); }
inline BigNumber operator-(const BigNumber& a, const BigNumber& b) { return sub(a, b); }
inline BigNumber operator-(const BigNumber& a) { return a.negate(); }

// Compares magnitudes only.
std::strong_ordering compare_magnitude(const BigNumber& a, const BigNumber& b);

RadixDigits to_radix(const BigNumber& a, int base);
BigNumber from_radix(const RadixDigits& d);

// Smallest k such that base^k >= 10^decimal_digits, i.e.
// ceil(decimal_digits * ln 10 / ln base), computed exactly.
int digit_count_for_equivalent(int decimal_digits, int base);

// base^exponent; used to render power-of-base position tokens.
BigNumber power_of(int base, int exponent);

}  // namespace numeracy
