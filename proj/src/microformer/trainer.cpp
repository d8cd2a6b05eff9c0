#include "numeracy/microformer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numeracy/evaluator.hpp"
#include "numeracy/microformer/decode.hpp"
#include "numeracy/microformer/position.hpp"

namespace numeracy::microformer {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(std::move(t));
  return out;
}

// Everything a batch needs from one example, computed once.
struct Prepared {
  std::vector<int> src_ids;
  Eigen::MatrixXd src_pos;
  std::vector<int> tgt_ids;  // BOS + answer
  std::vector<int> labels;   // answer + EOS
  Eigen::MatrixXd tgt_pos;   // empty unless WITH_TGT
};

Prepared prepare(const TokenizedExample& e, const ModelConfig& cfg, bool with_targets) {
  Prepared p;
  for (const auto& t : e.source) p.src_ids.push_back(cfg.vocabulary.id(t));
  p.src_pos = source_position_features(e.source, cfg);
  p.tgt_ids.push_back(Vocabulary::kBos);
  for (const auto& t : e.answer) {
    const int id = cfg.vocabulary.id(t);
    p.tgt_ids.push_back(id);
    p.labels.push_back(id);
  }
  p.labels.push_back(Vocabulary::kEos);
  if (with_targets && cfg.target_position_mode == TargetPositionMode::WithTarget) {
    p.tgt_pos = target_position_features(e.answer, cfg);
  }
  if (static_cast<int>(p.src_ids.size()) > cfg.max_sequence_length ||
      static_cast<int>(p.tgt_ids.size()) > cfg.max_sequence_length) {
    throw ConfigError("example longer than max_sequence_length " + std::to_string(cfg.max_sequence_length));
  }
  return p;
}

Batch assemble(std::span<const Prepared* const> items, int width) {
  Batch b;
  std::size_t src_total = 0, tgt_total = 0;
  bool any_tgt_pos = false;
  for (const auto* p : items) {
    src_total += p->src_ids.size();
    tgt_total += p->tgt_ids.size();
    any_tgt_pos = any_tgt_pos || p->tgt_pos.size() != 0;
  }
  b.src_pos.resize(static_cast<Eigen::Index>(src_total), width);
  if (any_tgt_pos) b.tgt_pos = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tgt_total), width);
  for (const auto* p : items) {
    const auto srow = static_cast<Eigen::Index>(b.src_ids.size());
    b.src_ids.insert(b.src_ids.end(), p->src_ids.begin(), p->src_ids.end());
    b.src_offsets.push_back(static_cast<int>(b.src_ids.size()));
    b.src_pos.middleRows(srow, p->src_pos.rows()) = p->src_pos;
    const auto trow = static_cast<Eigen::Index>(b.tgt_ids.size());
    b.tgt_ids.insert(b.tgt_ids.end(), p->tgt_ids.begin(), p->tgt_ids.end());
    b.tgt_offsets.push_back(static_cast<int>(b.tgt_ids.size()));
    b.labels.insert(b.labels.end(), p->labels.begin(), p->labels.end());
    if (p->tgt_pos.size() != 0) b.tgt_pos.middleRows(trow, p->tgt_pos.rows()) = p->tgt_pos;
  }
  return b;
}

template <class S>
struct AdamState {
  std::vector<Matrix<S>> m, v;
  std::int64_t step = 0;
};

template <class S>
void adam_step(Model<S>& model, AdamState<S>& st, const TrainConfig& tc) {
  double sq = 0;
  model.for_each_param([&](const Param<S>& p) { sq += static_cast<double>(p.grad.squaredNorm()); });
  const double norm = std::sqrt(sq);
  const S clip = (tc.clip_norm > 0 && norm > tc.clip_norm) ? static_cast<S>(tc.clip_norm / norm) : S(1);
  ++st.step;
  const double t = static_cast<double>(st.step);
  const S b1 = static_cast<S>(tc.adam_beta1), b2 = static_cast<S>(tc.adam_beta2);
  const S c1 = static_cast<S>(1.0 - std::pow(tc.adam_beta1, t));
  const S c2 = static_cast<S>(1.0 - std::pow(tc.adam_beta2, t));
  const S lr = static_cast<S>(tc.learning_rate), eps = static_cast<S>(tc.adam_epsilon);
  std::size_t k = 0;
  model.for_each_param([&](Param<S>& p) {
    Matrix<S>& m = st.m[k];
    Matrix<S>& v = st.v[k];
    ++k;
    auto g = (p.grad.array() * clip);
    m.array() = b1 * m.array() + (S(1) - b1) * g;
    v.array() = b2 * v.array() + (S(1) - b2) * g.square();
    p.value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  });
}

template <class S>
std::vector<Tensor> export_moments(const std::vector<Matrix<S>>& ms, const Model<S>& model) {
  std::vector<Tensor> out;
  std::size_t k = 0;
  model.for_each_param([&](const Param<S>& p) {
    const Matrix<S>& m = ms[k++];
    Tensor t{p.name, m.rows(), m.cols(), std::vector<double>(static_cast<std::size_t>(m.size()))};
    for (Eigen::Index i = 0; i < m.size(); ++i) t.data[static_cast<std::size_t>(i)] = static_cast<double>(m.data()[i]);
    out.push_back(std::move(t));
  });
  return out;
}

template <class S>
TrainResult train_impl(const ModelConfig& cfg, const TrainConfig& tc, const std::vector<Example>& train_set,
                       const std::vector<Example>* dev_set, const EpochCallback& on_epoch) {
  Model<S> model(cfg, derive_seed(tc.seed, 0x6d6f64656cULL));
  std::vector<Prepared> prep;
  prep.reserve(train_set.size());
  for (const auto& e : train_set) prep.push_back(prepare(tokenize(e), cfg, true));

  AdamState<S> adam;
  model.for_each_param([&](const Param<S>& p) {
    adam.m.push_back(Matrix<S>::Zero(p.value.rows(), p.value.cols()));
    adam.v.push_back(Matrix<S>::Zero(p.value.rows(), p.value.cols()));
  });

  TrainResult result;
  result.initial_loss = mean_loss(model, train_set, std::max(tc.batch_size, 64));
  auto snapshot = [&](int epoch, std::optional<double> dev) {
    Checkpoint& c = result.checkpoint;
    c.model = cfg;
    c.train = tc;
    c.epoch = epoch;
    c.dev_accuracy = dev;
    c.params = export_params(model);
    c.adam_m = export_moments(adam.m, model);
    c.adam_v = export_moments(adam.v, model);
    c.adam_step = adam.step;
  };
  snapshot(0, std::nullopt);

  std::vector<std::size_t> order(prep.size());
  std::optional<double> best_dev;
  const auto bs = static_cast<std::size_t>(tc.batch_size);
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    seeded_shuffle(order, derive_seed(tc.seed, 0x100000000ULL + static_cast<std::uint64_t>(epoch)));
    double loss_sum = 0;
    std::size_t batches = 0;
    std::vector<const Prepared*> items;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      items.clear();
      for (std::size_t j = start; j < std::min(order.size(), start + bs); ++j) items.push_back(&prep[order[j]]);
      const Batch batch = assemble(items, cfg.model_width);
      model.zero_grad();
      const double loss = model.loss_and_gradients(batch);
      if (!std::isfinite(loss)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batches) + ": loss is " + std::to_string(loss) +
                              " (try a lower learning rate or enable clipping)");
      }
      adam_step(model, adam, tc);
      loss_sum += loss;
      ++batches;
    }
    EpochLog entry{epoch, batches ? loss_sum / static_cast<double>(batches) : 0.0, std::nullopt};
    const bool eval_now = dev_set && !dev_set->empty() && (epoch % tc.eval_every == 0 || epoch == tc.epochs);
    if (eval_now) {
      entry.dev_accuracy = accuracy(model, *dev_set);
      if (!best_dev || *entry.dev_accuracy > *best_dev) {
        best_dev = entry.dev_accuracy;
        snapshot(epoch, best_dev);
      }
    } else if (!dev_set || dev_set->empty()) {
      if (epoch == tc.epochs) snapshot(epoch, std::nullopt);
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return result;
}

}  // namespace

TokenizedExample tokenize(const Example& e) {
  TokenizedExample t{split_ws(e.question), split_ws(e.answer)};
  t.source.emplace_back(Vocabulary::kEosToken);
  return t;
}

Vocabulary build_vocabulary(const std::vector<Example>& train, const OrthographySpec& spec, int max_size) {
  std::vector<std::string> tokens = {"What", "is", "plus", "minus", "?", "-"};
  if (spec.scheme != Scheme::Words) {
    for (int d = 0; d < spec.base; ++d) tokens.push_back(std::to_string(d));
  }
  for (const auto& e : train) {
    for (auto& t : split_ws(e.question)) tokens.push_back(std::move(t));
    for (auto& t : split_ws(e.answer)) tokens.push_back(std::move(t));
  }
  Vocabulary v = Vocabulary::from_tokens(std::move(tokens));
  if (v.size() > max_size) {
    throw VocabularyError("vocabulary of " + std::to_string(v.size()) + " tokens exceeds the limit of " +
                          std::to_string(max_size) + "; whole-number orthographies are not trainable here");
  }
  return v;
}

Batch make_batch(std::span<const TokenizedExample* const> items, const ModelConfig& cfg, bool with_targets) {
  std::vector<Prepared> prep;
  prep.reserve(items.size());
  for (const auto* e : items) prep.push_back(prepare(*e, cfg, with_targets));
  std::vector<const Prepared*> ptrs;
  for (const auto& p : prep) ptrs.push_back(&p);
  return assemble(ptrs, cfg.model_width);
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out.precision(10);
  out << "epoch,train_loss,dev_accuracy\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << e.train_loss << ',';
    if (e.dev_accuracy) out << *e.dev_accuracy;
    out << '\n';
  }
  return out.str();
}

TrainResult train(ModelConfig model_cfg, const TrainConfig& tc, const std::vector<Example>& train_set,
                  const std::vector<Example>* dev_set, const EpochCallback& on_epoch) {
  tc.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (model_cfg.vocabulary.size() <= 3) {
    model_cfg.vocabulary = build_vocabulary(train_set, model_cfg.orthography, tc.max_vocabulary);
  } else if (model_cfg.vocabulary.size() > tc.max_vocabulary) {
    throw VocabularyError("vocabulary of " + std::to_string(model_cfg.vocabulary.size()) +
                          " tokens exceeds the limit of " + std::to_string(tc.max_vocabulary));
  }
  model_cfg.validate();
  if (tc.precision == Precision::F64) return train_impl<double>(model_cfg, tc, train_set, dev_set, on_epoch);
  return train_impl<float>(model_cfg, tc, train_set, dev_set, on_epoch);
}

template <class S>
double accuracy(const Model<S>& model, const std::vector<Example>& examples) {
  if (examples.empty()) return 0;
  constexpr std::size_t kChunk = 64;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < examples.size(); start += kChunk) {
    const std::size_t end = std::min(examples.size(), start + kChunk);
    std::vector<std::vector<std::string>> sources;
    std::size_t longest = 0;
    for (std::size_t i = start; i < end; ++i) {
      auto t = tokenize(examples[i]);
      longest = std::max(longest, t.answer.size());
      sources.push_back(std::move(t.source));
    }
    // Anything longer than the gold answer plus EOS is wrong anyway.
    auto out = greedy_decode_batch(model, sources, static_cast<int>(longest) + 1);
    for (std::size_t i = start; i < end; ++i) {
      const auto& r = out[i - start];
      if (r.truncated) continue;
      std::string wire;
      for (const auto& t : r.tokens) wire += (wire.empty() ? "" : " ") + t;
      correct += static_cast<std::size_t>(exact_match(wire, examples[i].answer));
    }
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

template <class S>
double mean_loss(const Model<S>& model, const std::vector<Example>& examples, int batch_size) {
  double total = 0;
  std::size_t tokens = 0;
  const auto bs = static_cast<std::size_t>(std::max(batch_size, 1));
  for (std::size_t start = 0; start < examples.size(); start += bs) {
    std::vector<Prepared> prep;
    for (std::size_t i = start; i < std::min(examples.size(), start + bs); ++i) {
      prep.push_back(prepare(tokenize(examples[i]), model.config(), true));
    }
    std::vector<const Prepared*> ptrs;
    for (const auto& p : prep) ptrs.push_back(&p);
    const Batch b = assemble(ptrs, model.config().model_width);
    total += model.loss(b) * static_cast<double>(b.labels.size());
    tokens += b.labels.size();
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

template double accuracy<float>(const Model<float>&, const std::vector<Example>&);
template double accuracy<double>(const Model<double>&, const std::vector<Example>&);
template double mean_loss<float>(const Model<float>&, const std::vector<Example>&, int);
template double mean_loss<double>(const Model<double>&, const std::vector<Example>&, int);

}  // namespace numeracy::microformer
