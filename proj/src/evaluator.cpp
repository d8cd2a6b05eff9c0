#include "numeracy/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace numeracy {

int exact_match(std::string_view prediction, std::string_view gold) {
  return TokenSequence::from_wire(prediction) == TokenSequence::from_wire(gold) ? 1 : 0;
}

std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::WrongDigits: return "WRONG_DIGITS";
    case ErrorKind::Malformed: return "MALFORMED";
    case ErrorKind::PositionSkip: return "POSITION_SKIP";
    case ErrorKind::LengthMismatch: return "LENGTH_MISMATCH";
  }
  return "?";
}

ErrorKind classify_error(std::string_view prediction, std::string_view gold, const OrthographySpec& spec) {
  const auto pred = TokenSequence::from_wire(prediction);
  const auto ref = TokenSequence::from_wire(gold);
  try {
    decode(pred, spec);
  } catch (const MalformedSequence& e) {
    switch (e.reason()) {
      case MalformedReason::PositionGap:
      case MalformedReason::PositionDuplicate:
      case MalformedReason::PositionOrder:
        return ErrorKind::PositionSkip;
      default:
        return ErrorKind::Malformed;
    }
  }
  if (pred.size() != ref.size()) return ErrorKind::LengthMismatch;
  // Single-token schemes carry their length inside the token.
  if (pred.size() == 1 && pred[0].size() != ref[0].size()) return ErrorKind::LengthMismatch;
  return ErrorKind::WrongDigits;
}

EvalReport evaluate(std::span<const std::string> predictions, std::span<const std::string> golds,
                    std::span<const ExampleMeta> metadata, const OrthographySpec& spec) {
  if (predictions.empty()) throw std::invalid_argument("empty prediction stream");
  if (predictions.size() != golds.size() || golds.size() != metadata.size()) {
    throw std::invalid_argument("prediction, gold and metadata streams differ in length");
  }
  EvalReport r;
  r.n = predictions.size();
  r.scores.resize(r.n);
  for (ErrorKind k : kErrorKinds) r.error_taxonomy[k] = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    const int score = exact_match(predictions[i], golds[i]);
    r.scores[i] = score;
    auto& bucket = r.per_length[std::max(metadata[i].digits1, metadata[i].digits2)];
    ++bucket.count;
    if (score) {
      ++bucket.correct;
      ++r.correct;
    } else {
      ++r.error_taxonomy[classify_error(predictions[i], golds[i], spec)];
    }
  }
  r.overall_accuracy = static_cast<double>(r.correct) / static_cast<double>(r.n);
  return r;
}

EvalReport evaluate_dataset(const std::vector<Example>& gold, const std::vector<Prediction>& preds,
                            const OrthographySpec& spec) {
  if (preds.size() != gold.size()) {
    throw std::invalid_argument("got " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(gold.size()) + " gold examples");
  }
  std::vector<std::string> p(gold.size());
  std::vector<bool> seen(gold.size(), false);
  for (const auto& pr : preds) {
    if (pr.index >= gold.size()) {
      throw std::invalid_argument("prediction index " + std::to_string(pr.index) + " out of range");
    }
    if (seen[pr.index]) throw std::invalid_argument("duplicate prediction index " + std::to_string(pr.index));
    seen[pr.index] = true;
    p[pr.index] = pr.prediction;
  }
  std::vector<std::string> g;
  std::vector<ExampleMeta> meta;
  g.reserve(gold.size());
  meta.reserve(gold.size());
  for (const auto& e : gold) {
    g.push_back(e.answer);
    meta.push_back({e.digits1, e.digits2});
  }
  return evaluate(p, g, meta, spec);
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["correct"] = r.correct;
  j["overall_accuracy"] = r.overall_accuracy;
  auto per = nlohmann::ordered_json::array();
  for (const auto& [len, b] : r.per_length) {
    per.push_back({{"length", len}, {"count", b.count}, {"correct", b.correct}, {"accuracy", b.accuracy()}});
  }
  j["per_length"] = per;
  nlohmann::ordered_json tax;
  for (ErrorKind k : kErrorKinds) {
    auto it = r.error_taxonomy.find(k);
    tax[std::string(error_kind_name(k))] = it == r.error_taxonomy.end() ? 0 : it->second;
  }
  j["error_taxonomy"] = tax;
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "examples  " << r.n << "\n";
  os << "accuracy  " << r.overall_accuracy << "  (" << r.correct << "/" << r.n << ")\n\n";
  os << std::setw(8) << "length" << std::setw(10) << "count" << std::setw(12) << "accuracy" << "\n";
  for (const auto& [len, b] : r.per_length) {
    os << std::setw(8) << len << std::setw(10) << b.count << std::setw(12) << b.accuracy() << "\n";
  }
  os << "\nerrors\n";
  for (ErrorKind k : kErrorKinds) {
    auto it = r.error_taxonomy.find(k);
    os << "  " << std::left << std::setw(16) << error_kind_name(k) << std::right
       << (it == r.error_taxonomy.end() ? 0 : it->second) << "\n";
  }
  return os.str();
}

std::string report_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "length,count,correct,accuracy\n";
  os << std::setprecision(6);
  for (const auto& [len, b] : r.per_length) {
    os << len << "," << b.count << "," << b.correct << "," << b.accuracy() << "\n";
  }
  return os.str();
}

CISummary confidence_interval(std::span<const double> run_accuracies) {
  if (run_accuracies.size() < 2) throw std::invalid_argument("confidence interval needs at least 2 runs");
  CISummary s;
  s.run_accuracies.assign(run_accuracies.begin(), run_accuracies.end());
  const double n = static_cast<double>(run_accuracies.size());
  s.mean = std::accumulate(run_accuracies.begin(), run_accuracies.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : run_accuracies) ss += (a - s.mean) * (a - s.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  s.half_width = 1.96 * sd / std::sqrt(n);
  return s;
}

SkipReport analyze_position_skips(const TokenSequence& t, Order order) {
  // Longer ladders than this are reported as malformed rather than enumerated.
  constexpr int kMaxExponent = 1 << 20;
  SkipReport r;
  bool oversized = false;
  std::size_t start = (!t.empty() && t[0] == "-") ? 1 : 0;
  std::vector<int> exps;
  for (std::size_t i = start; i < t.size(); ++i) {
    const bool expect_digit = (i - start) % 2 == 0;
    auto e = parse_position_token(t[i]);
    if (e && *e > kMaxExponent) {
      oversized = true;
      r.alternating = false;
      continue;
    }
    if (e) {
      exps.push_back(*e);
      if (expect_digit) r.alternating = false;
      continue;
    }
    const bool numeral = !t[i].empty() && std::all_of(t[i].begin(), t[i].end(),
                                                      [](char c) { return c >= '0' && c <= '9'; });
    if (!numeral || !expect_digit) r.alternating = false;
  }
  if ((t.size() - start) % 2 != 0) r.alternating = false;
  if (exps.empty()) return r;

  r.max_exponent_seen = *std::max_element(exps.begin(), exps.end());
  std::vector<int> counts(static_cast<std::size_t>(r.max_exponent_seen) + 1, 0);
  for (int e : exps) ++counts[static_cast<std::size_t>(e)];
  for (int e = r.max_exponent_seen; e >= 0; --e) {
    if (counts[static_cast<std::size_t>(e)] == 0) r.missing_exponents.push_back(e);
    if (counts[static_cast<std::size_t>(e)] > 1) r.duplicated_exponents.push_back(e);
  }
  for (std::size_t k = 1; k < exps.size(); ++k) {
    if (order == Order::Regular ? exps[k] > exps[k - 1] : exps[k] < exps[k - 1]) r.out_of_order = true;
  }
  r.well_formed = !oversized && r.missing_exponents.empty() && r.duplicated_exponents.empty() && !r.out_of_order;
  return r;
}

}  // namespace numeracy
