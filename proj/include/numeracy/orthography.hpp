#pragma once

// Surface forms ("orthographies") of numbers and their strict codecs.
//
//   DECIMAL          832
//   CHARACTER        8 3 2
//   FIXED_CHARACTER  0 8 3 2           (max_digits = 4)
//   UNDERSCORE       8_3_2
//   WORDS            eight hundred thirty-two
//   TEN_BASED        8 100 3 10 2
//   TEN_E_BASED      8 10e2 3 10e1 2 10e0
//
// Every encoding is a TokenSequence whose wire form is the tokens joined by
// single spaces.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "numeracy/bignum.hpp"

namespace numeracy {

enum class Scheme { Decimal, Character, FixedCharacter, Underscore, Words, TenBased, TenEBased };
enum class Order { Regular, Inverse };

// CLI names: decimal, char, fixedchar, underscore, words, 10based, 10ebased.
std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);
std::string_view order_name(Order o);
Order parse_order(std::string_view name);

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a value cannot be written in the requested orthography.
class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OrthographySpec {
  Scheme scheme = Scheme::TenEBased;
  Order order = Order::Regular;
  int base = 10;
  std::optional<int> max_digits;

  // Throws SpecError when the combination is invalid.
  void validate() const;
  friend bool operator==(const OrthographySpec&, const OrthographySpec&) = default;
};

class TokenSequence {
 public:
  TokenSequence() = default;
  // Throws std::invalid_argument on empty tokens or tokens with whitespace.
  explicit TokenSequence(std::vector<std::string> tokens);

  // Splits on any run of ASCII whitespace.
  static TokenSequence from_wire(std::string_view wire);
  std::string wire() const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<std::string> tokens_;
};

enum class MalformedReason {
  EmptyInput,
  UnknownToken,
  PositionGap,
  PositionDuplicate,
  PositionOrder,
  DigitOutOfRange,
  IllFormedScale,
  NonCanonical,
  Overflow,
};

std::string_view malformed_reason_name(MalformedReason r);

class MalformedSequence : public std::runtime_error {
 public:
  MalformedSequence(MalformedReason reason, const std::string& detail);
  MalformedReason reason() const noexcept { return reason_; }

 private:
  MalformedReason reason_;
};

TokenSequence encode(const BigNumber& n, const OrthographySpec& spec);

// Strict inverse of encode: anything outside encode's image is rejected with
// MalformedSequence.
BigNumber decode(const TokenSequence& t, const OrthographySpec& spec);

// English short-scale cardinal words; |n| < 10^64.
TokenSequence number_to_words(const BigNumber& n);
BigNumber words_to_number(const TokenSequence& t);

// "10e" followed by the exponent.
std::string position_token(int exponent);
// Exponent of a "10e<k>" token; nullopt for anything else (including
// zero-padded exponents such as "10e05").
std::optional<int> parse_position_token(std::string_view token);

// Text used for a single digit value (base 19 digits 10..18 render as "10".."18").
std::string digit_token(int value);

}  // namespace numeracy
