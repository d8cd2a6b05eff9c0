#pragma once

#include <string>
#include <vector>

#include "numeracy/microformer/model.hpp"

namespace numeracy::microformer {

struct DecodeResult {
  std::vector<std::string> tokens;  // EOS excluded
  bool truncated = false;           // max_len reached before EOS
};

// Source tokens must end with EOS (see tokenize). Target positions always
// get the zero/none feature: inference never sees target encodings.
template <class S>
DecodeResult greedy_decode(const Model<S>& model, const std::vector<std::string>& source, int max_len);

template <class S>
std::vector<DecodeResult> greedy_decode_batch(const Model<S>& model,
                                              const std::vector<std::vector<std::string>>& sources,
                                              int max_len);

// The decoder-input batch used at step t of inference, exposed for tests.
Batch inference_batch(const std::vector<std::vector<std::string>>& sources,
                      const std::vector<std::vector<int>>& prefixes, const ModelConfig& cfg);

}  // namespace numeracy::microformer
