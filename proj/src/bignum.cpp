#include "numeracy/bignum.hpp"

#include <algorithm>

namespace numeracy {

namespace {

using Digits = std::vector<std::uint8_t>;
using DigitView = std::span<const std::uint8_t>;

void strip_leading_zeros(Digits& d) {
  auto first = std::find_if(d.begin(), d.end(), [](std::uint8_t x) { return x != 0; });
  if (first == d.end()) {
    d.assign(1, 0);
    return;
  }
  d.erase(d.begin(), first);
}

std::strong_ordering compare_digits(DigitView a, DigitView b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

// |a| + |b|, most significant first.
Digits add_magnitudes(DigitView a, DigitView b) {
  Digits out(std::max(a.size(), b.size()) + 1, 0);
  int carry = 0;
  auto ia = a.rbegin(), ib = b.rbegin();
  for (auto io = out.rbegin(); io != out.rend(); ++io) {
    int s = carry;
    if (ia != a.rend()) s += *ia++;
    if (ib != b.rend()) s += *ib++;
    *io = static_cast<std::uint8_t>(s % 10);
    carry = s / 10;
  }
  strip_leading_zeros(out);
  return out;
}

// |a| - |b| for |a| >= |b|.
Digits sub_magnitudes(DigitView a, DigitView b) {
  Digits out(a.size(), 0);
  int borrow = 0;
  auto ib = b.rbegin();
  auto io = out.rbegin();
  for (auto ia = a.rbegin(); ia != a.rend(); ++ia, ++io) {
    int s = *ia - borrow;
    if (ib != b.rend()) s -= *ib++;
    borrow = s < 0 ? 1 : 0;
    *io = static_cast<std::uint8_t>(s + 10 * borrow);
  }
  strip_leading_zeros(out);
  return out;
}

// Signed addition of (sa, a) and (sb, b).
BigNumber signed_add(int sa, DigitView a, int sb, DigitView b) {
  if (sa == sb) return BigNumber::from_digits(sa, add_magnitudes(a, b));
  auto cmp = compare_digits(a, b);
  if (cmp == 0) return BigNumber{};
  if (cmp > 0) return BigNumber::from_digits(sa, sub_magnitudes(a, b));
  return BigNumber::from_digits(sb, sub_magnitudes(b, a));
}

void check_base(int base) {
  if (base < 2) throw InvalidBase("base must be >= 2, got " + std::to_string(base));
}

}  // namespace

bool RadixDigits::is_canonical() const {
  if (base < 2 || digits.empty()) return false;
  if (sign != 1 && sign != -1) return false;
  for (int d : digits) {
    if (d < 0 || d >= base) return false;
  }
  if (digits.size() > 1 && digits.front() == 0) return false;
  if (digits.size() == 1 && digits.front() == 0 && sign != 1) return false;
  return true;
}

BigNumber BigNumber::from_decimal_string(std::string_view s) {
  if (s.empty()) throw ParseError("empty decimal string", 0);
  std::size_t pos = 0;
  int sign = 1;
  if (s[0] == '-') {
    sign = -1;
    pos = 1;
    if (s.size() == 1) throw ParseError("bare '-' without digits", 1);
  }
  Digits digits;
  digits.reserve(s.size() - pos);
  for (std::size_t i = pos; i < s.size(); ++i) {
    char c = s[i];
    if (c < '0' || c > '9') {
      throw ParseError("illegal character '" + std::string(1, c) + "' at position " +
                           std::to_string(i),
                       i);
    }
    digits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return from_digits(sign, std::move(digits));
}

BigNumber BigNumber::from_int(std::int64_t v) {
  // Work in unsigned space so INT64_MIN is representable.
  std::uint64_t mag = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
  Digits d;
  do {
    d.push_back(static_cast<std::uint8_t>(mag % 10));
    mag /= 10;
  } while (mag != 0);
  std::reverse(d.begin(), d.end());
  return from_digits(v < 0 ? -1 : 1, std::move(d));
}

BigNumber BigNumber::from_digits(int sign, std::vector<std::uint8_t> msf_digits) {
  BigNumber out;
  for (auto x : msf_digits) {
    if (x > 9) throw InvalidDigit("decimal digit out of range: " + std::to_string(x));
  }
  strip_leading_zeros(msf_digits);
  out.digits_ = std::move(msf_digits);
  out.sign_ = (sign < 0 && !out.is_zero()) ? -1 : 1;
  return out;
}

std::string BigNumber::to_decimal_string() const {
  std::string s;
  s.reserve(digits_.size() + 1);
  if (sign_ < 0) s.push_back('-');
  for (auto d : digits_) s.push_back(static_cast<char>('0' + d));
  return s;
}

BigNumber BigNumber::negate() const {
  BigNumber out = *this;
  if (!out.is_zero()) out.sign_ = -sign_;
  return out;
}

BigNumber BigNumber::abs() const {
  BigNumber out = *this;
  out.sign_ = 1;
  return out;
}

bool BigNumber::is_canonical() const {
  if (digits_.empty()) return false;
  if (sign_ != 1 && sign_ != -1) return false;
  for (auto d : digits_) {
    if (d > 9) return false;
  }
  if (digits_.size() > 1 && digits_.front() == 0) return false;
  if (is_zero() && sign_ != 1) return false;
  return true;
}

std::strong_ordering operator<=>(const BigNumber& a, const BigNumber& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  auto mag = compare_digits(a.digits_, b.digits_);
  return a.sign_ > 0 ? mag : 0 <=> mag;
}

std::strong_ordering compare_magnitude(const BigNumber& a, const BigNumber& b) {
  return compare_digits(a.digits(), b.digits());
}

BigNumber add(const BigNumber& a, const BigNumber& b) {
  return signed_add(a.sign(), a.digits(), b.sign(), b.digits());
}

BigNumber sub(const BigNumber& a, const BigNumber& b) {
  return signed_add(a.sign(), a.digits(), -b.sign(), b.digits());
}

RadixDigits to_radix(const BigNumber& a, int base) {
  check_base(base);
  RadixDigits out;
  out.base = base;
  out.sign = a.sign();
  out.digits.clear();
  // Repeated short division of the decimal magnitude by base.
  std::vector<int> work(a.digits().begin(), a.digits().end());
  while (!(work.size() == 1 && work[0] == 0)) {
    std::vector<int> quotient;
    quotient.reserve(work.size());
    long long rem = 0;
    for (int d : work) {
      long long cur = rem * 10 + d;
      int q = static_cast<int>(cur / base);
      rem = cur % base;
      if (!quotient.empty() || q != 0) quotient.push_back(q);
    }
    out.digits.push_back(static_cast<int>(rem));
    work = quotient.empty() ? std::vector<int>{0} : std::move(quotient);
  }
  if (out.digits.empty()) out.digits.push_back(0);
  std::reverse(out.digits.begin(), out.digits.end());
  return out;
}

BigNumber from_radix(const RadixDigits& d) {
  check_base(d.base);
  if (d.digits.empty()) throw InvalidDigit("radix digit sequence is empty");
  // Horner evaluation over a least-significant-first decimal accumulator.
  std::vector<int> acc{0};
  for (int digit : d.digits) {
    if (digit < 0 || digit >= d.base) {
      throw InvalidDigit("digit " + std::to_string(digit) + " out of range for base " +
                         std::to_string(d.base));
    }
    long long carry = digit;
    for (int& a : acc) {
      long long cur = static_cast<long long>(a) * d.base + carry;
      a = static_cast<int>(cur % 10);
      carry = cur / 10;
    }
    while (carry > 0) {
      acc.push_back(static_cast<int>(carry % 10));
      carry /= 10;
    }
  }
  Digits msf(acc.rbegin(), acc.rend());
  return BigNumber::from_digits(d.sign, std::move(msf));
}

BigNumber power_of(int base, int exponent) {
  check_base(base);
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  RadixDigits d;
  d.base = base;
  d.digits.assign(static_cast<std::size_t>(exponent) + 1, 0);
  d.digits[0] = 1;
  return from_radix(d);
}

int digit_count_for_equivalent(int decimal_digits, int base) {
  check_base(base);
  if (decimal_digits < 1) throw std::invalid_argument("decimal_digits must be >= 1");
  // base^k >= 10^n  <=>  base^k has at least n + 1 decimal digits.
  int k = 1;
  while (power_of(base, k).digit_count() < static_cast<std::size_t>(decimal_digits) + 1) ++k;
  return k;
}

}  // namespace numeracy
