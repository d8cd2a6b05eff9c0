#include "numeracy/orthography.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>

namespace numeracy {

namespace {

constexpr std::array<std::string_view, 20> kSmall = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};

constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

// Index k names 10^(3k). Spelling follows num2words' English tables
// (note "septdecillion", not "septendecillion").
constexpr std::array<std::string_view, 22> kScales = {
    "",
    "thousand",
    "million",
    "billion",
    "trillion",
    "quadrillion",
    "quintillion",
    "sextillion",
    "septillion",
    "octillion",
    "nonillion",
    "decillion",
    "undecillion",
    "duodecillion",
    "tredecillion",
    "quattuordecillion",
    "quindecillion",
    "sexdecillion",
    "septdecillion",
    "octodecillion",
    "novemdecillion",
    "vigintillion"};

constexpr std::size_t kMaxWordDigits = 64;

[[noreturn]] void malformed(MalformedReason r, const std::string& detail) {
  throw MalformedSequence(r, detail);
}

std::string below_hundred(int v) {
  if (v < 20) return std::string(kSmall[v]);
  std::string s(kTens[v / 10]);
  if (v % 10 != 0) {
    s += '-';
    s += kSmall[v % 10];
  }
  return s;
}

void append_group(std::vector<std::string>& out, int v) {
  if (v >= 100) {
    out.emplace_back(kSmall[v / 100]);
    out.emplace_back("hundred");
  }
  if (v % 100 != 0) out.push_back(below_hundred(v % 100));
}

// Value of a word in [1, 99] ("seven", "forty", "thirty-two"); nullopt otherwise.
std::optional<int> below_hundred_value(std::string_view w) {
  for (int i = 1; i < 20; ++i) {
    if (w == kSmall[i]) return i;
  }
  for (int t = 2; t < 10; ++t) {
    if (w == kTens[t]) return t * 10;
    if (w.size() > kTens[t].size() + 1 && w.substr(0, kTens[t].size()) == kTens[t] &&
        w[kTens[t].size()] == '-') {
      auto unit = w.substr(kTens[t].size() + 1);
      for (int u = 1; u < 10; ++u) {
        if (unit == kSmall[u]) return t * 10 + u;
      }
    }
  }
  return std::nullopt;
}

std::optional<int> scale_index(std::string_view w) {
  for (std::size_t k = 1; k < kScales.size(); ++k) {
    if (w == kScales[k]) return static_cast<int>(k);
  }
  return std::nullopt;
}

bool is_word(std::string_view w) {
  return w == "zero" || w == "minus" || w == "hundred" || below_hundred_value(w) ||
         scale_index(w);
}

// Parses a plain non-negative decimal numeral without leading zeros.
std::optional<BigNumber> parse_numeral(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  for (char c : tok) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  if (tok.size() > 1 && tok[0] == '0') return std::nullopt;
  return BigNumber::from_decimal_string(tok);
}

std::optional<int> parse_small_int(std::string_view tok) {
  if (tok.empty() || tok.size() > 9) return std::nullopt;
  if (tok.size() > 1 && tok[0] == '0') return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

int digit_value(std::string_view tok, int base) {
  auto v = parse_small_int(tok);
  if (!v) malformed(MalformedReason::UnknownToken, "'" + std::string(tok) + "' is not a digit");
  if (*v >= base) {
    malformed(MalformedReason::DigitOutOfRange,
              "digit " + std::string(tok) + " out of range for base " + std::to_string(base));
  }
  return *v;
}

bool single_token_scheme(Scheme s) {
  return s == Scheme::Decimal || s == Scheme::Underscore || s == Scheme::Words;
}

// Magnitude digits in base spec.base, most significant first.
std::vector<int> magnitude_digits(const BigNumber& n, int base) {
  return to_radix(n.abs(), base).digits;
}

// Checks an emitted exponent sequence against the expected ladder and
// throws with the most specific reason on mismatch.
void check_ladder(const std::vector<int>& exps, Order order) {
  const int m = static_cast<int>(exps.size());
  bool exact = true;
  for (int g = 0; g < m; ++g) {
    int expected = order == Order::Regular ? m - 1 - g : g;
    if (exps[g] != expected) exact = false;
  }
  if (exact) return;
  std::vector<int> sorted = exps;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    malformed(MalformedReason::PositionDuplicate, "position token repeats an exponent");
  }
  for (int g = 1; g < m; ++g) {
    bool wrong_direction = order == Order::Regular ? exps[g] > exps[g - 1] : exps[g] < exps[g - 1];
    if (wrong_direction) malformed(MalformedReason::PositionOrder, "position tokens out of order");
  }
  // Monotone and duplicate free: some exponent between the max and 0 is absent.
  int top = sorted.back();
  for (int e = top, i = m - 1; e >= 0; --e) {
    if (i >= 0 && sorted[i] == e) {
      --i;
      continue;
    }
    malformed(MalformedReason::PositionGap,
              "position-token gap: " + position_token(e) + " missing");
  }
  malformed(MalformedReason::PositionGap, "position tokens do not end at exponent 0");
}

struct Group {
  int digit;
  int exponent;
};

// Splits digit/position-token groups for TEN_BASED and TEN_E_BASED.
std::vector<Group> parse_positional(const std::vector<std::string>& toks, const OrthographySpec& spec) {
  const bool ten_e = spec.scheme == Scheme::TenEBased;
  // Exponent carried by a position token, or nullopt if the token is a digit.
  auto position_of = [&](const std::string& tok) -> std::optional<int> {
    if (ten_e) return parse_position_token(tok);
    auto v = parse_numeral(tok);
    if (!v || v->digit_count() < 1) return std::nullopt;
    if (compare_magnitude(*v, BigNumber::from_int(spec.base)) < 0) return std::nullopt;
    auto r = to_radix(*v, spec.base).digits;
    if (r[0] != 1 || std::any_of(r.begin() + 1, r.end(), [](int d) { return d != 0; })) {
      malformed(MalformedReason::UnknownToken, "'" + tok + "' is not a power of the base");
    }
    return static_cast<int>(r.size()) - 1;
  };

  std::vector<Group> groups;
  std::size_t i = 0;
  const bool implicit_first = !ten_e && spec.order == Order::Inverse;
  const bool implicit_last = !ten_e && spec.order == Order::Regular;
  while (i < toks.size()) {
    if (position_of(toks[i])) {
      malformed(MalformedReason::PositionGap, "position token '" + toks[i] + "' without a digit");
    }
    int d = digit_value(toks[i], spec.base);
    ++i;
    bool needs_position = true;
    if (implicit_first && groups.empty()) needs_position = false;
    if (implicit_last && (i == toks.size())) needs_position = false;
    if (!needs_position) {
      groups.push_back({d, 0});
      continue;
    }
    if (i == toks.size()) {
      malformed(MalformedReason::PositionGap, "digit '" + toks[i - 1] + "' lacks a position token");
    }
    auto e = position_of(toks[i]);
    if (!e) {
      if (ten_e) {
        // A digit where a position token belongs: the position token is missing.
        bool digit_like = parse_small_int(toks[i]).has_value();
        malformed(digit_like ? MalformedReason::PositionGap : MalformedReason::UnknownToken,
                  "expected a position token, got '" + toks[i] + "'");
      }
      malformed(MalformedReason::PositionGap, "expected a power of the base, got '" + toks[i] + "'");
    }
    groups.push_back({d, *e});
    ++i;
  }
  std::vector<int> exps;
  exps.reserve(groups.size());
  for (const auto& g : groups) exps.push_back(g.exponent);
  check_ladder(exps, spec.order);
  return groups;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Decimal: return "decimal";
    case Scheme::Character: return "char";
    case Scheme::FixedCharacter: return "fixedchar";
    case Scheme::Underscore: return "underscore";
    case Scheme::Words: return "words";
    case Scheme::TenBased: return "10based";
    case Scheme::TenEBased: return "10ebased";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  static const std::map<std::string_view, Scheme> names = {
      {"decimal", Scheme::Decimal},      {"char", Scheme::Character},
      {"character", Scheme::Character},  {"fixedchar", Scheme::FixedCharacter},
      {"underscore", Scheme::Underscore}, {"words", Scheme::Words},
      {"10based", Scheme::TenBased},     {"10", Scheme::TenBased},
      {"10ebased", Scheme::TenEBased},   {"10e", Scheme::TenEBased}};
  auto it = names.find(name);
  if (it == names.end()) throw SpecError("unknown scheme '" + std::string(name) + "'");
  return it->second;
}

std::string_view order_name(Order o) { return o == Order::Regular ? "regular" : "inverse"; }

Order parse_order(std::string_view name) {
  if (name == "regular") return Order::Regular;
  if (name == "inverse") return Order::Inverse;
  throw SpecError("unknown order '" + std::string(name) + "'");
}

void OrthographySpec::validate() const {
  if (base < 2) throw SpecError("base must be >= 2");
  if (base != 10 && scheme != Scheme::Character && scheme != Scheme::TenBased &&
      scheme != Scheme::TenEBased) {
    throw SpecError("base " + std::to_string(base) + " is not supported by scheme " +
                    std::string(scheme_name(scheme)));
  }
  if (scheme == Scheme::FixedCharacter && !max_digits) {
    throw SpecError("fixedchar requires max_digits");
  }
  if (scheme != Scheme::FixedCharacter && max_digits) {
    throw SpecError("max_digits applies only to fixedchar");
  }
  if (max_digits && *max_digits < 1) throw SpecError("max_digits must be >= 1");
  if (scheme == Scheme::Words && order == Order::Inverse) {
    throw SpecError("words cannot be written in inverse order");
  }
}

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty()) throw std::invalid_argument("empty token");
    if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); })) {
      throw std::invalid_argument("token contains whitespace: '" + t + "'");
    }
  }
}

TokenSequence TokenSequence::from_wire(std::string_view wire) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < wire.size()) {
    while (i < wire.size() && std::isspace(static_cast<unsigned char>(wire[i]))) ++i;
    std::size_t j = i;
    while (j < wire.size() && !std::isspace(static_cast<unsigned char>(wire[j]))) ++j;
    if (j > i) toks.emplace_back(wire.substr(i, j - i));
    i = j;
  }
  TokenSequence out;
  out.tokens_ = std::move(toks);
  return out;
}

std::string TokenSequence::wire() const {
  std::string s;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) s += ' ';
    s += tokens_[i];
  }
  return s;
}

std::string_view malformed_reason_name(MalformedReason r) {
  switch (r) {
    case MalformedReason::EmptyInput: return "empty-input";
    case MalformedReason::UnknownToken: return "unknown-token";
    case MalformedReason::PositionGap: return "position-gap";
    case MalformedReason::PositionDuplicate: return "position-duplicate";
    case MalformedReason::PositionOrder: return "position-order";
    case MalformedReason::DigitOutOfRange: return "digit-out-of-range";
    case MalformedReason::IllFormedScale: return "ill-formed-scale";
    case MalformedReason::NonCanonical: return "non-canonical";
    case MalformedReason::Overflow: return "overflow";
  }
  return "?";
}

MalformedSequence::MalformedSequence(MalformedReason reason, const std::string& detail)
    : std::runtime_error(std::string(malformed_reason_name(reason)) + ": " + detail),
      reason_(reason) {}

std::string position_token(int exponent) { return "10e" + std::to_string(exponent); }

std::optional<int> parse_position_token(std::string_view token) {
  if (token.size() < 4 || token.substr(0, 3) != "10e") return std::nullopt;
  return parse_small_int(token.substr(3));
}

std::string digit_token(int value) { return std::to_string(value); }

TokenSequence number_to_words(const BigNumber& n) {
  if (n.digit_count() > kMaxWordDigits) {
    throw EncodeError("words support magnitudes below 10^64");
  }
  std::vector<std::string> out;
  if (n.is_zero()) return TokenSequence({"zero"});
  if (n.is_negative()) out.emplace_back("minus");
  auto d = n.digits();
  const int len = static_cast<int>(d.size());
  const int groups = (len + 2) / 3;
  for (int g = groups - 1; g >= 0; --g) {
    // Digits [lo, hi) of the magnitude hold the group for 10^(3g).
    int hi = len - 3 * g;
    int lo = std::max(0, hi - 3);
    int v = 0;
    for (int k = lo; k < hi; ++k) v = v * 10 + d[k];
    if (v == 0) continue;
    append_group(out, v);
    if (g > 0) out.emplace_back(kScales[g]);
  }
  return TokenSequence(std::move(out));
}

BigNumber words_to_number(const TokenSequence& t) {
  const auto& toks = t.tokens();
  if (toks.empty()) malformed(MalformedReason::EmptyInput, "no tokens");
  for (const auto& w : toks) {
    if (!is_word(w)) malformed(MalformedReason::UnknownToken, "unknown word '" + w + "'");
  }
  std::size_t i = 0;
  int sign = 1;
  if (toks[0] == "minus") {
    sign = -1;
    ++i;
    if (i == toks.size()) malformed(MalformedReason::EmptyInput, "'minus' without a number");
  }
  std::vector<std::uint8_t> digits(kMaxWordDigits, 0);
  if (toks[i] == "zero") {
    if (i + 1 != toks.size()) malformed(MalformedReason::IllFormedScale, "'zero' must stand alone");
    if (sign < 0) malformed(MalformedReason::NonCanonical, "negative zero");
    return BigNumber{};
  }
  int last_scale = static_cast<int>(kScales.size());
  while (i < toks.size()) {
    int value = 0;
    bool had = false;
    auto unit = below_hundred_value(toks[i]);
    if (unit && *unit < 10 && i + 1 < toks.size() && toks[i + 1] == "hundred") {
      value = *unit * 100;
      i += 2;
      had = true;
    }
    if (i < toks.size()) {
      if (auto sub = below_hundred_value(toks[i])) {
        value += *sub;
        ++i;
        had = true;
      }
    }
    if (!had) malformed(MalformedReason::IllFormedScale, "'" + toks[i] + "' has no count before it");
    int scale = 0;
    if (i < toks.size()) {
      auto s = scale_index(toks[i]);
      if (!s) malformed(MalformedReason::IllFormedScale, "'" + toks[i] + "' cannot follow a count");
      scale = *s;
      ++i;
    }
    if (scale >= last_scale) {
      malformed(MalformedReason::IllFormedScale, "scale words must strictly decrease");
    }
    last_scale = scale;
    for (int k = 0; k < 3; ++k) {
      digits[kMaxWordDigits - 1 - (3 * scale + k)] = static_cast<std::uint8_t>(value % 10);
      value /= 10;
    }
  }
  auto out = BigNumber::from_digits(sign, std::move(digits));
  if (number_to_words(out) != t) malformed(MalformedReason::NonCanonical, "not a canonical cardinal");
  return out;
}

TokenSequence encode(const BigNumber& n, const OrthographySpec& spec) {
  spec.validate();
  if (spec.scheme == Scheme::Words) return number_to_words(n);

  const auto digits = magnitude_digits(n, spec.base);
  const int m = static_cast<int>(digits.size());

  if (single_token_scheme(spec.scheme)) {
    std::vector<int> ordered = digits;
    if (spec.order == Order::Inverse) std::reverse(ordered.begin(), ordered.end());
    std::string tok = n.is_negative() ? "-" : "";
    for (int k = 0; k < m; ++k) {
      if (k && spec.scheme == Scheme::Underscore) tok += '_';
      tok += static_cast<char>('0' + ordered[k]);
    }
    return TokenSequence({tok});
  }

  std::vector<std::vector<std::string>> groups;
  groups.reserve(static_cast<std::size_t>(std::max(m, spec.max_digits.value_or(0))));
  switch (spec.scheme) {
    case Scheme::FixedCharacter:
      if (m > *spec.max_digits) {
        throw EncodeError(std::to_string(m) + " digits exceed max_digits " +
                          std::to_string(*spec.max_digits));
      }
      for (int k = m; k < *spec.max_digits; ++k) groups.push_back({"0"});
      [[fallthrough]];
    case Scheme::Character:
      for (int d : digits) groups.push_back({digit_token(d)});
      break;
    case Scheme::TenBased:
      for (int k = 0; k < m; ++k) {
        int exponent = m - 1 - k;
        if (exponent == 0) {
          groups.push_back({digit_token(digits[k])});
        } else {
          groups.push_back(
              {digit_token(digits[k]), power_of(spec.base, exponent).to_decimal_string()});
        }
      }
      break;
    case Scheme::TenEBased:
      for (int k = 0; k < m; ++k) groups.push_back({digit_token(digits[k]), position_token(m - 1 - k)});
      break;
    default:
      break;
  }
  if (spec.order == Order::Inverse) std::reverse(groups.begin(), groups.end());

  std::vector<std::string> out;
  if (n.is_negative()) out.emplace_back("-");
  for (auto& g : groups) {
    for (auto& tok : g) out.push_back(std::move(tok));
  }
  return TokenSequence(std::move(out));
}

BigNumber decode(const TokenSequence& t, const OrthographySpec& spec) {
  spec.validate();
  if (t.empty()) malformed(MalformedReason::EmptyInput, "no tokens");
  if (spec.scheme == Scheme::Words) return words_to_number(t);

  int sign = 1;
  std::vector<int> digits;  // most significant first

  if (single_token_scheme(spec.scheme)) {
    if (t.size() != 1) {
      malformed(MalformedReason::UnknownToken,
                std::string(scheme_name(spec.scheme)) + " expects a single token");
    }
    std::string_view tok = t[0];
    if (!tok.empty() && tok[0] == '-') {
      sign = -1;
      tok.remove_prefix(1);
    }
    if (tok.empty()) malformed(MalformedReason::EmptyInput, "sign without digits");
    if (spec.scheme == Scheme::Underscore) {
      std::size_t i = 0;
      while (true) {
        if (i >= tok.size() || tok[i] < '0' || tok[i] > '9') {
          malformed(MalformedReason::UnknownToken, "'" + t[0] + "' is not an underscore numeral");
        }
        digits.push_back(tok[i] - '0');
        ++i;
        if (i == tok.size()) break;
        if (tok[i] != '_') {
          malformed(MalformedReason::UnknownToken, "'" + t[0] + "' is not an underscore numeral");
        }
        ++i;
      }
    } else {
      for (char c : tok) {
        if (c < '0' || c > '9') malformed(MalformedReason::UnknownToken, "'" + t[0] + "' is not a numeral");
        digits.push_back(c - '0');
      }
    }
    if (spec.order == Order::Inverse) std::reverse(digits.begin(), digits.end());
  } else {
    std::vector<std::string> toks = t.tokens();
    if (toks[0] == "-") {
      sign = -1;
      toks.erase(toks.begin());
      if (toks.empty()) malformed(MalformedReason::EmptyInput, "sign without digits");
    }
    if (spec.scheme == Scheme::Character || spec.scheme == Scheme::FixedCharacter) {
      if (spec.scheme == Scheme::FixedCharacter &&
          toks.size() != static_cast<std::size_t>(*spec.max_digits)) {
        malformed(toks.size() > static_cast<std::size_t>(*spec.max_digits) ? MalformedReason::Overflow
                                                                           : MalformedReason::NonCanonical,
                  "fixedchar expects exactly " + std::to_string(*spec.max_digits) + " digits");
      }
      for (const auto& tok : toks) digits.push_back(digit_value(tok, spec.base));
      if (spec.order == Order::Inverse) std::reverse(digits.begin(), digits.end());
    } else {
      auto groups = parse_positional(toks, spec);
      if (spec.order == Order::Inverse) std::reverse(groups.begin(), groups.end());
      for (const auto& g : groups) digits.push_back(g.digit);
    }
  }

  RadixDigits rd;
  rd.base = spec.base;
  rd.sign = sign;
  rd.digits = digits;
  BigNumber value = from_radix(rd);
  if (encode(value, spec) != t) {
    malformed(MalformedReason::NonCanonical, "'" + t.wire() + "' is not the canonical form");
  }
  return value;
}

}  // namespace numeracy
