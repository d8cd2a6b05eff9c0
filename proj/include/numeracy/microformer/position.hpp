#pragma once

// Position features added to token embeddings.
//
// Position-wise masked embedding: digit i (big-endian, i = n for the most
// significant digit) of an n-digit number gets ones on [u, v) with
//   u = floor(d/n) * (n - i),  v = floor(d/n) * (n - i + 1)
// and zeros elsewhere. Every other token gets the zero vector.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "numeracy/microformer/config.hpp"
#include "numeracy/orthography.hpp"

namespace numeracy::microformer {

struct DigitSlot {
  int index = 1;  // i, in [1, n]
  int count = 1;  // n
  friend bool operator==(const DigitSlot&, const DigitSlot&) = default;
};

struct SliceBounds {
  int begin = 0;  // u
  int end = 0;    // v
};

// Throws ConfigError when floor(d/n) == 0 or i is outside [1, n].
SliceBounds masked_slice(int index, int count, int width);
Eigen::VectorXd positionwise_masked_embedding(int index, int count, int width);

Eigen::VectorXd sinusoidal_encoding(int position, int width);

// For each token, its digit slot if it is a digit of a number written in
// `spec`, else nullopt. Significance decides i, so inverse order still gives
// the most significant digit i = n.
std::vector<std::optional<DigitSlot>> digit_slots(const std::vector<std::string>& tokens,
                                                  const OrthographySpec& spec);

// Row t is the feature added to token t.
Eigen::MatrixXd source_position_features(const std::vector<std::string>& tokens, const ModelConfig& cfg);
// Decoder-input position features for training in WITH_TGT mode. Row 0 is
// the BOS slot; row t > 0 belongs to answer token t - 1.
Eigen::MatrixXd target_position_features(const std::vector<std::string>& answer_tokens,
                                         const ModelConfig& cfg);

}  // namespace numeracy::microformer
