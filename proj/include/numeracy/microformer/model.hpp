#pragma once

// Encoder-decoder transformer (post-layer-norm, as in the original
// architecture) with a hand-written backward pass.
//
// Sequences in a batch are packed row-wise: the linear layers run on all
// tokens of the batch at once and attention runs per sequence, so no
// padding is ever materialized. PAD tokens that do appear in a source are
// masked out as attention keys.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "numeracy/microformer/config.hpp"

namespace numeracy::microformer {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ParamGroup { Embedding, Attention, FeedForward, LayerNorm, OutputHead };
std::string_view param_group_name(ParamGroup g);

template <class S>
struct Param {
  std::string name;
  ParamGroup group = ParamGroup::Attention;
  Matrix<S> value;
  Matrix<S> grad;

  void init(std::string n, ParamGroup g, Eigen::Index rows, Eigen::Index cols) {
    name = std::move(n);
    group = g;
    value = Matrix<S>::Zero(rows, cols);
    grad = Matrix<S>::Zero(rows, cols);
  }
};

// Packed token ids plus the position features added to their embeddings.
struct Batch {
  std::vector<int> src_ids;
  std::vector<int> src_offsets{0};  // sequence b occupies [offsets[b], offsets[b+1])
  Eigen::MatrixXd src_pos;          // one row per source token
  std::vector<int> tgt_ids;         // decoder inputs (BOS + prefix)
  std::vector<int> tgt_offsets{0};
  Eigen::MatrixXd tgt_pos;          // empty: zero features for every target token
  std::vector<int> labels;          // next-token targets, aligned with tgt_ids (training only)

  int size() const { return static_cast<int>(src_offsets.size()) - 1; }
};

template <class S>
class Model {
 public:
  Model() = default;
  Model(const ModelConfig& cfg, std::uint64_t init_seed);
  Model(const Model&);
  Model& operator=(const Model&);
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;
  ~Model();

  const ModelConfig& config() const { return cfg_; }

  // Logits, one row per decoder input token (rows packed like tgt_ids).
  Matrix<S> forward(const Batch& batch) const;
  // Mean token cross-entropy against batch.labels.
  double loss(const Batch& batch) const;
  // Same loss; adds its gradient to every Param::grad.
  double loss_and_gradients(const Batch& batch);

  // Encoder output for a batch; used by incremental greedy decoding.
  Matrix<S> encode(const Batch& batch) const;
  Matrix<S> decode_logits(const Batch& batch, const Matrix<S>& memory) const;

  void zero_grad();
  void for_each_param(const std::function<void(Param<S>&)>& f);
  void for_each_param(const std::function<void(const Param<S>&)>& f) const;
  std::size_t parameter_count() const;

 private:
  struct Layers;

  ModelConfig cfg_;
  std::unique_ptr<Layers> layers_;
};

// Mean token cross-entropy of logits against labels; fills dlogits with its
// gradient when non-null.
template <class S>
double cross_entropy(const Matrix<S>& logits, const std::vector<int>& labels, Matrix<S>* dlogits);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace numeracy::microformer
