#pragma once

// Checkpoint container; the binary layout is described in docs/checkpoint_format.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeracy/microformer/config.hpp"
#include "numeracy/microformer/model.hpp"

namespace numeracy::microformer {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tensor {
  std::string name;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;  // row-major; exact for both precisions
};

struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  int epoch = 0;
  std::optional<double> dev_accuracy;
  std::vector<Tensor> params;
  // Adam moments, parallel to params; empty when not saved.
  std::vector<Tensor> adam_m;
  std::vector<Tensor> adam_v;
  std::int64_t adam_step = 0;
};

template <class S>
std::vector<Tensor> export_params(const Model<S>& model);

// Builds a model of checkpoint precision S; throws CheckpointError when the
// tensors do not match the configuration.
template <class S>
Model<S> load_model(const Checkpoint& ckpt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace numeracy::microformer
