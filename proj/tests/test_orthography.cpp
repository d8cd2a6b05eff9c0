#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "numeracy/orthography.hpp"
#include "numeracy/taskgen.hpp"
#include "oracles.hpp"

using namespace numeracy;

namespace {

BigNumber big(const std::string& s) { return BigNumber::from_decimal_string(s); }

OrthographySpec spec(Scheme s, Order o = Order::Regular, int base = 10, std::optional<int> width = std::nullopt) {
  return OrthographySpec{s, o, base, width};
}

std::string wire(const std::string& n, const OrthographySpec& s) { return encode(big(n), s).wire(); }

MalformedReason reason_of(const std::string& w, const OrthographySpec& s) {
  try {
    decode(TokenSequence::from_wire(w), s);
  } catch (const MalformedSequence& e) {
    return e.reason();
  }
  FAIL("expected MalformedSequence for '" << w << "'");
  return MalformedReason::EmptyInput;
}

const Scheme kAll[] = {Scheme::Decimal,  Scheme::Character, Scheme::FixedCharacter, Scheme::Underscore,
                       Scheme::Words,    Scheme::TenBased,  Scheme::TenEBased};

}  // namespace

TEST_CASE("the seven orthographies of 832") {
  CHECK(wire("832", spec(Scheme::Decimal)) == "832");
  CHECK(wire("832", spec(Scheme::Character)) == "8 3 2");
  CHECK(wire("832", spec(Scheme::FixedCharacter, Order::Regular, 10, 4)) == "0 8 3 2");
  CHECK(wire("832", spec(Scheme::Underscore)) == "8_3_2");
  CHECK(wire("832", spec(Scheme::Words)) == "eight hundred thirty-two");
  CHECK(wire("832", spec(Scheme::TenBased)) == "8 100 3 10 2");
  CHECK(wire("832", spec(Scheme::TenEBased)) == "8 10e2 3 10e1 2 10e0");
}

TEST_CASE("other worked encodings") {
  CHECK(wire("32", spec(Scheme::FixedCharacter, Order::Regular, 10, 4)) == "0 0 3 2");
  CHECK(wire("832", spec(Scheme::TenEBased, Order::Inverse)) == "2 10e0 3 10e1 8 10e2");
  CHECK(wire("832", spec(Scheme::Decimal, Order::Inverse)) == "238");
  CHECK(wire("832", spec(Scheme::Underscore, Order::Inverse)) == "2_3_8");
  CHECK(wire("832", spec(Scheme::TenBased, Order::Inverse)) == "2 3 10 8 100");
  CHECK(wire("-165", spec(Scheme::Character)) == "- 1 6 5");
  CHECK(wire("-165", spec(Scheme::Character, Order::Inverse)) == "- 5 6 1");
  CHECK(wire("-165", spec(Scheme::Decimal)) == "-165");
  CHECK(wire("-165", spec(Scheme::Words)) == "minus one hundred sixty-five");
  CHECK(wire("0", spec(Scheme::TenEBased)) == "0 10e0");
  CHECK(wire("0", spec(Scheme::TenBased)) == "0");
  CHECK(wire("0", spec(Scheme::Words)) == "zero");
  // Base-b numbers keep the 10e prefix; powers in 10based are written in decimal.
  CHECK(wire("10", spec(Scheme::TenEBased, Order::Regular, 2)) == "1 10e3 0 10e2 1 10e1 0 10e0");
  CHECK(wire("10", spec(Scheme::TenBased, Order::Regular, 2)) == "1 8 0 4 1 2 0");
  CHECK(wire("18", spec(Scheme::Character, Order::Regular, 19)) == "18");
  CHECK(wire("19", spec(Scheme::Character, Order::Regular, 19)) == "1 0");
}

TEST_CASE("position tokens") {
  CHECK(position_token(59) == "10e59");
  CHECK(position_token(0) == "10e0");
  CHECK(position_token(2) == "10e2");
  CHECK(parse_position_token("10e59") == 59);
  CHECK(!parse_position_token("10e05"));
  CHECK(!parse_position_token("10e"));
  CHECK(!parse_position_token("10ex"));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(spec(Scheme::Words, Order::Regular, 19).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::Words, Order::Inverse).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::Decimal, Order::Regular, 2).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::Underscore, Order::Regular, 3).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::FixedCharacter).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::FixedCharacter, Order::Regular, 10, 0).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::Character, Order::Regular, 10, 4).validate(), SpecError);
  CHECK_THROWS_AS(spec(Scheme::Character, Order::Regular, 1).validate(), SpecError);
  CHECK_NOTHROW(spec(Scheme::TenEBased, Order::Inverse, 19).validate());
  CHECK_THROWS_AS(encode(big("12345"), spec(Scheme::FixedCharacter, Order::Regular, 10, 4)), EncodeError);
  CHECK_THROWS_AS(encode(power_of(10, 64), spec(Scheme::Words)), EncodeError);
  CHECK(parse_scheme("10e") == Scheme::TenEBased);
  CHECK(parse_scheme("char") == Scheme::Character);
  CHECK_THROWS_AS(parse_scheme("roman"), SpecError);
}

TEST_CASE("token sequences and the wire form") {
  const TokenSequence t = TokenSequence::from_wire("  8  10e2\t3 10e1 2 10e0\n");
  CHECK(t.size() == 6);
  CHECK(t.wire() == "8 10e2 3 10e1 2 10e0");
  CHECK(TokenSequence::from_wire(t.wire()) == t);
  CHECK_THROWS_AS(TokenSequence({"a b"}), std::invalid_argument);
  CHECK_THROWS_AS(TokenSequence({""}), std::invalid_argument);
}

TEST_CASE("strict decoding") {
  const auto te = spec(Scheme::TenEBased);
  CHECK(decode(TokenSequence::from_wire("8 10e2 3 10e1 2 10e0"), te) == big("832"));
  CHECK(decode(TokenSequence::from_wire("eight hundred thirty-two"), spec(Scheme::Words)) == big("832"));
  try {
    decode(TokenSequence::from_wire("8 10e2 3 10e1"), te);
    FAIL("expected MalformedSequence");
  } catch (const MalformedSequence& e) {
    CHECK(e.reason() == MalformedReason::PositionGap);
    CHECK(std::string(e.what()).find("10e0 missing") != std::string::npos);
  }
  CHECK(reason_of("", te) == MalformedReason::EmptyInput);
  CHECK(reason_of("8 10e2 3 10e2 2 10e0", te) == MalformedReason::PositionDuplicate);
  CHECK(reason_of("2 10e0 3 10e1", te) == MalformedReason::PositionOrder);
  CHECK(reason_of("8 10e2 x 10e1 2 10e0", te) == MalformedReason::UnknownToken);
  CHECK(reason_of("2 10e1 0 10e0", spec(Scheme::TenEBased, Order::Regular, 2)) == MalformedReason::DigitOutOfRange);
  CHECK(reason_of("0 8 3 2", spec(Scheme::Character)) == MalformedReason::NonCanonical);
  CHECK(reason_of("8 3 2", spec(Scheme::FixedCharacter, Order::Regular, 10, 4)) != MalformedReason::EmptyInput);
  CHECK(reason_of("0832", spec(Scheme::Decimal)) == MalformedReason::NonCanonical);
  CHECK(reason_of("- 0", spec(Scheme::Character)) == MalformedReason::NonCanonical);
  CHECK(reason_of("8 1000 3 10 2", spec(Scheme::TenBased)) != MalformedReason::EmptyInput);
  CHECK(reason_of("8 99 3 10 2", spec(Scheme::TenBased)) == MalformedReason::UnknownToken);
}

TEST_CASE("words grammar") {
  CHECK(words_to_number(TokenSequence::from_wire("minus one hundred sixty-five")) == big("-165"));
  CHECK(words_to_number(TokenSequence::from_wire("zero")) == BigNumber());
  CHECK(number_to_words(big("1000000")).wire() == "one million");
  CHECK(number_to_words(power_of(10, 63)).wire() == "one vigintillion");
  for (const char* bad : {"thirty hundred", "one thousand one thousand", "one million one billion", "hundred",
                          "twenty-ten", "minus zero", "one and two", "eleventy"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(words_to_number(TokenSequence::from_wire(bad)), MalformedSequence);
  }
  try {
    words_to_number(TokenSequence::from_wire("thirty hundred"));
  } catch (const MalformedSequence& e) {
    CHECK(e.reason() == MalformedReason::IllFormedScale);
  }
}

TEST_CASE("words match the num2words fixture sample") {
  std::ifstream in(std::string(NUMERACY_FIXTURES) + "/words_sample.tsv");
  REQUIRE(in);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    const auto tab = line.find('\t');
    const std::string value = line.substr(0, tab), text = line.substr(tab + 1);
    CAPTURE(value);
    REQUIRE(number_to_words(big(value)).wire() == text);
    REQUIRE(words_to_number(TokenSequence::from_wire(text)) == big(value));
  }
  CHECK(n == 1000);
}

TEST_CASE("words for every value in [0, 10^6] match the fixture digest") {
  std::ifstream in(std::string(NUMERACY_FIXTURES) + "/words_0_1e6.sha256");
  std::string expected;
  in >> expected;
  REQUIRE(expected.size() == 64);
  std::string corpus;
  corpus.reserve(60'000'000);
  for (std::int64_t v = 0; v <= 1'000'000; ++v) {
    corpus += std::to_string(v);
    corpus += '\t';
    corpus += number_to_words(BigNumber::from_int(v)).wire();
    corpus += '\n';
  }
  CHECK(sha256_hex(corpus) == expected);
}

TEST_CASE("round trip for every scheme and order") {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<int> len(1, 60), digit(0, 9);
  for (int i = 0; i < 1500; ++i) {
    std::string s;
    const int n = len(g);
    for (int k = 0; k < n; ++k) s.push_back(static_cast<char>('0' + digit(g)));
    s = oracle::strip(s);
    if (s != "0" && (g() & 1)) s = "-" + s;
    const BigNumber v = big(s);
    for (Scheme sc : kAll) {
      for (Order o : {Order::Regular, Order::Inverse}) {
        if (sc == Scheme::Words && o == Order::Inverse) continue;
        const auto sp = spec(sc, o, 10, sc == Scheme::FixedCharacter ? std::optional<int>(60) : std::nullopt);
        CAPTURE(s);
        REQUIRE(decode(encode(v, sp), sp) == v);
      }
    }
    for (int base : {2, 3, 19}) {
      for (Scheme sc : {Scheme::Character, Scheme::TenBased, Scheme::TenEBased}) {
        for (Order o : {Order::Regular, Order::Inverse}) {
          const auto sp = spec(sc, o, base);
          REQUIRE(decode(encode(v, sp), sp) == v);
        }
      }
    }
  }
}

TEST_CASE("token counts of positional schemes") {
  std::mt19937_64 g(5);
  for (int i = 0; i < 500; ++i) {
    const int k = 1 + static_cast<int>(g() % 60);
    std::string s(1, static_cast<char>('1' + g() % 9));
    for (int j = 1; j < k; ++j) s.push_back(static_cast<char>('0' + g() % 10));
    REQUIRE(encode(big(s), spec(Scheme::TenEBased)).size() == static_cast<std::size_t>(2 * k));
    REQUIRE(encode(big(s), spec(Scheme::TenBased)).size() == static_cast<std::size_t>(2 * k - 1));
  }
}

TEST_CASE("mutating one token of a 10ebased encoding never decodes to the same value") {
  std::mt19937_64 g(9);
  const auto te = spec(Scheme::TenEBased);
  const std::vector<std::string> replacements = {"10e0", "10e1", "10e7", "10e60", "x", "-", "10", "10e01", "ten"};
  for (int i = 0; i < 300; ++i) {
    const int k = 1 + static_cast<int>(g() % 30);
    std::string s(1, static_cast<char>('1' + g() % 9));
    for (int j = 1; j < k; ++j) s.push_back(static_cast<char>('0' + g() % 10));
    const BigNumber v = big(s);
    const auto toks = encode(v, te).tokens();
    for (std::size_t pos = 0; pos < toks.size(); ++pos) {
      for (const auto& r : replacements) {
        if (r == toks[pos]) continue;
        auto m = toks;
        m[pos] = r;
        bool same = false;
        try {
          same = decode(TokenSequence(m), te) == v;
        } catch (const MalformedSequence&) {
        }
        REQUIRE_FALSE(same);
      }
    }
  }
}
