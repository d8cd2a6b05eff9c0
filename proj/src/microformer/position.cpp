#include "numeracy/microformer/position.hpp"

#include <cmath>

#include "numeracy/bignum.hpp"

namespace numeracy::microformer {

namespace {

bool is_numeral(const std::string& t) {
  if (t.empty() || t.size() > 9) return false;
  for (char c : t) {
    if (c < '0' || c > '9') return false;
  }
  return t.size() == 1 || t[0] != '0';
}

bool is_digit_token(const std::string& t, int base) { return is_numeral(t) && std::stoi(t) < base; }

bool is_power_token(const std::string& t, const OrthographySpec& spec) {
  if (spec.scheme == Scheme::TenEBased) return parse_position_token(t).has_value();
  if (spec.scheme != Scheme::TenBased) return false;
  if (t.empty() || t.size() > 200) return false;
  for (char c : t) {
    if (c < '0' || c > '9') return false;
  }
  if (t[0] == '0') return false;
  auto r = to_radix(BigNumber::from_decimal_string(t), spec.base).digits;
  if (r.size() < 2 || r[0] != 1) return false;
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (r[k] != 0) return false;
  }
  return true;
}

}  // namespace

SliceBounds masked_slice(int index, int count, int width) {
  if (count < 1 || index < 1 || index > count) {
    throw ConfigError("digit index " + std::to_string(index) + " outside [1, " + std::to_string(count) + "]");
  }
  const int step = width / count;
  if (step == 0) {
    throw ConfigError(std::to_string(count) + "-digit number does not fit embedding width " +
                      std::to_string(width));
  }
  return {step * (count - index), step * (count - index + 1)};
}

Eigen::VectorXd positionwise_masked_embedding(int index, int count, int width) {
  auto s = masked_slice(index, count, width);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(width);
  e.segment(s.begin, s.end - s.begin).setOnes();
  return e;
}

Eigen::VectorXd sinusoidal_encoding(int position, int width) {
  Eigen::VectorXd e(width);
  for (int k = 0; k < width; k += 2) {
    const double freq = std::pow(10000.0, static_cast<double>(k) / width);
    e[k] = std::sin(position / freq);
    if (k + 1 < width) e[k + 1] = std::cos(position / freq);
  }
  return e;
}

std::vector<std::optional<DigitSlot>> digit_slots(const std::vector<std::string>& tokens,
                                                  const OrthographySpec& spec) {
  std::vector<std::optional<DigitSlot>> out(tokens.size());
  if (spec.scheme == Scheme::Decimal || spec.scheme == Scheme::Underscore || spec.scheme == Scheme::Words) {
    return out;
  }
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!is_digit_token(tokens[i], spec.base)) {
      ++i;
      continue;
    }
    // A number is a maximal run of digit and position tokens.
    std::size_t j = i;
    std::vector<std::size_t> digit_at;
    while (j < tokens.size()) {
      if (is_power_token(tokens[j], spec)) {
        ++j;
      } else if (is_digit_token(tokens[j], spec.base)) {
        digit_at.push_back(j++);
      } else {
        break;
      }
    }
    const int n = static_cast<int>(digit_at.size());
    for (int k = 0; k < n; ++k) {
      const int significance = spec.order == Order::Regular ? n - k : k + 1;
      out[digit_at[static_cast<std::size_t>(k)]] = DigitSlot{significance, n};
    }
    i = j;
  }
  return out;
}

namespace {

Eigen::MatrixXd masked_rows(const std::vector<std::optional<DigitSlot>>& slots, int width) {
  Eigen::MatrixXd pe = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slots.size()), width);
  for (std::size_t t = 0; t < slots.size(); ++t) {
    if (!slots[t]) continue;
    auto s = masked_slice(slots[t]->index, slots[t]->count, width);
    pe.row(static_cast<Eigen::Index>(t)).segment(s.begin, s.end - s.begin).setOnes();
  }
  return pe;
}

Eigen::MatrixXd sinusoidal_rows(std::size_t length, int width) {
  Eigen::MatrixXd pe(static_cast<Eigen::Index>(length), width);
  for (std::size_t t = 0; t < length; ++t) {
    pe.row(static_cast<Eigen::Index>(t)) = sinusoidal_encoding(static_cast<int>(t), width).transpose();
  }
  return pe;
}

}  // namespace

Eigen::MatrixXd source_position_features(const std::vector<std::string>& tokens, const ModelConfig& cfg) {
  if (cfg.position_mode == PositionMode::Sinusoidal) return sinusoidal_rows(tokens.size(), cfg.model_width);
  return masked_rows(digit_slots(tokens, cfg.orthography), cfg.model_width);
}

Eigen::MatrixXd target_position_features(const std::vector<std::string>& answer_tokens,
                                         const ModelConfig& cfg) {
  const std::size_t len = answer_tokens.size() + 1;
  if (cfg.position_mode == PositionMode::Sinusoidal) return sinusoidal_rows(len, cfg.model_width);
  auto slots = digit_slots(answer_tokens, cfg.orthography);
  slots.insert(slots.begin(), std::nullopt);
  return masked_rows(slots, cfg.model_width);
}

}  // namespace numeracy::microformer
