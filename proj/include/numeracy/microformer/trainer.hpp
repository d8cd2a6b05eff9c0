#pragma once

// Teacher-forced training with Adam and gradient clipping.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeracy/microformer/checkpoint.hpp"
#include "numeracy/microformer/model.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy::microformer {

// Loss became NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TokenizedExample {
  std::vector<std::string> source;  // question tokens followed by EOS
  std::vector<std::string> answer;  // answer tokens, no EOS
};
TokenizedExample tokenize(const Example& e);

// Reserved symbols, every token of the training split, the digits of the
// base and the question template. Throws VocabularyError above max_size.
Vocabulary build_vocabulary(const std::vector<Example>& train, const OrthographySpec& spec, int max_size);

// `with_targets` adds target position features (WITH_TGT training only).
Batch make_batch(std::span<const TokenizedExample* const> items, const ModelConfig& cfg, bool with_targets);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  std::optional<double> dev_accuracy;
};
std::string training_log_csv(const std::vector<EpochLog>& log);

struct TrainResult {
  Checkpoint checkpoint;  // best dev epoch, or the final epoch without a dev set
  std::vector<EpochLog> log;
  double initial_loss = 0;  // mean training loss before the first update
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Trains a fresh model of `model_cfg` (its vocabulary is replaced when
// empty). Deterministic given the configs and the data.
TrainResult train(ModelConfig model_cfg, const TrainConfig& tc, const std::vector<Example>& train_set,
                  const std::vector<Example>* dev_set = nullptr, const EpochCallback& on_epoch = {});

// Exact-match accuracy of greedy decoding over `examples`.
template <class S>
double accuracy(const Model<S>& model, const std::vector<Example>& examples);

// Mean per-token loss over `examples` without updating anything.
template <class S>
double mean_loss(const Model<S>& model, const std::vector<Example>& examples, int batch_size);

}  // namespace numeracy::microformer
