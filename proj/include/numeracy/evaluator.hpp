#pragma once

// Exact-match scoring, per-length breakdowns, confidence intervals and the
// position-token skip analysis.

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numeracy/orthography.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy {

// 1 iff the whitespace-normalized token sequences are identical.
int exact_match(std::string_view prediction, std::string_view gold);

enum class ErrorKind { WrongDigits, Malformed, PositionSkip, LengthMismatch };
inline constexpr std::array<ErrorKind, 4> kErrorKinds = {
    ErrorKind::WrongDigits, ErrorKind::Malformed, ErrorKind::PositionSkip, ErrorKind::LengthMismatch};
std::string_view error_kind_name(ErrorKind k);

// Bucket for an incorrect prediction; priority
// MALFORMED > POSITION_SKIP > LENGTH_MISMATCH > WRONG_DIGITS.
ErrorKind classify_error(std::string_view prediction, std::string_view gold, const OrthographySpec& spec);

struct LengthBucket {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy() const { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
};

struct EvalReport {
  std::size_t n = 0;
  std::size_t correct = 0;
  double overall_accuracy = 0.0;
  std::map<int, LengthBucket> per_length;  // keyed by max(digits1, digits2)
  std::map<ErrorKind, std::size_t> error_taxonomy;
  std::vector<int> scores;  // per example, input order

  std::size_t incorrect() const { return n - correct; }
};

struct ExampleMeta {
  int digits1 = 0;
  int digits2 = 0;
};

// Throws std::invalid_argument on empty or mismatched streams.
EvalReport evaluate(std::span<const std::string> predictions, std::span<const std::string> golds,
                    std::span<const ExampleMeta> metadata, const OrthographySpec& spec);

// Scores external predictions (by index) against a gold dataset. Every gold
// example must receive exactly one prediction.
EvalReport evaluate_dataset(const std::vector<Example>& gold, const std::vector<Prediction>& preds,
                            const OrthographySpec& spec);

std::string report_json(const EvalReport& r);
std::string report_table(const EvalReport& r);
// length,count,correct,accuracy
std::string report_csv(const EvalReport& r);

struct CISummary {
  double mean = 0.0;
  double half_width = 0.0;
  std::vector<double> run_accuracies;
};

// Mean and 95% normal-approximation half-width 1.96 * s / sqrt(n), with s
// the sample standard deviation. Needs at least two runs.
CISummary confidence_interval(std::span<const double> run_accuracies);

struct SkipReport {
  int max_exponent_seen = -1;
  std::vector<int> missing_exponents;     // descending
  std::vector<int> duplicated_exponents;  // descending
  bool out_of_order = false;
  // Digit and position tokens alternate (sign token aside).
  bool alternating = true;
  // Exponents form max..0 stepping by one with no duplicates.
  bool well_formed = false;
};

// Inspects a "d 10e<k> d 10e<k-1> ..." sequence. In inverse order the ladder
// is expected to ascend from 0 instead.
SkipReport analyze_position_skips(const TokenSequence& t, Order order = Order::Regular);

}  // namespace numeracy
