#include "numeracy/microformer/model.hpp"

#include <cmath>
#include <limits>

#include "numeracy/taskgen.hpp"

namespace numeracy::microformer {

std::string_view param_group_name(ParamGroup g) {
  switch (g) {
    case ParamGroup::Embedding: return "embedding";
    case ParamGroup::Attention: return "attention";
    case ParamGroup::FeedForward: return "feedforward";
    case ParamGroup::LayerNorm: return "layernorm";
    case ParamGroup::OutputHead: return "output";
  }
  return "?";
}

namespace {

template <class S>
using Mat = Matrix<S>;
template <class S>
using Col = Eigen::Matrix<S, Eigen::Dynamic, 1>;

constexpr double kLayerNormEps = 1e-5;

template <class S>
void uniform_fill(Param<S>& p, double limit, SplitRng& rng) {
  for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      p.value(r, c) = static_cast<S>((2.0 * rng.unit() - 1.0) * limit);
    }
  }
}

template <class S>
struct Linear {
  Param<S> w;
  Param<S> b;
  bool has_bias = true;

  void init(const std::string& name, int in, int out, ParamGroup g, SplitRng& rng, bool bias = true) {
    has_bias = bias;
    w.init(name + ".weight", g, in, out);
    if (has_bias) b.init(name + ".bias", g, 1, out);
    uniform_fill(w, std::sqrt(6.0 / (in + out)), rng);
  }

  Mat<S> forward(const Mat<S>& x) const {
    Mat<S> y = x * w.value;
    if (has_bias) y.rowwise() += b.value.row(0);
    return y;
  }

  void backward(const Mat<S>& x, const Mat<S>& dy, Mat<S>* dx) {
    w.grad.noalias() += x.transpose() * dy;
    if (has_bias) b.grad.row(0) += dy.colwise().sum();
    if (dx) dx->noalias() = dy * w.value.transpose();
  }

  template <class F>
  void visit(F&& f) {
    f(w);
    if (has_bias) f(b);
  }
};

template <class S>
struct LayerNorm {
  Param<S> gamma;
  Param<S> beta;

  struct Cache {
    Mat<S> xhat;
    Col<S> inv_std;
  };

  void init(const std::string& name, int width) {
    gamma.init(name + ".gamma", ParamGroup::LayerNorm, 1, width);
    beta.init(name + ".beta", ParamGroup::LayerNorm, 1, width);
    gamma.value.setOnes();
  }

  Mat<S> forward(const Mat<S>& x, Cache& c) const {
    Col<S> mean = x.rowwise().mean();
    Mat<S> centered = x.colwise() - mean;
    Col<S> var = centered.array().square().rowwise().mean();
    c.inv_std = (var.array() + static_cast<S>(kLayerNormEps)).rsqrt();
    c.xhat = (centered.array().colwise() * c.inv_std.array()).matrix();
    Mat<S> y = (c.xhat.array().rowwise() * gamma.value.row(0).array()).matrix();
    y.rowwise() += beta.value.row(0);
    return y;
  }

  Mat<S> backward(const Mat<S>& dy, const Cache& c) {
    gamma.grad.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
    beta.grad.row(0) += dy.colwise().sum();
    Mat<S> dxhat = (dy.array().rowwise() * gamma.value.row(0).array()).matrix();
    Col<S> m1 = dxhat.rowwise().mean();
    Col<S> m2 = (dxhat.array() * c.xhat.array()).rowwise().mean();
    Mat<S> dx = dxhat.colwise() - m1;
    dx.array() -= c.xhat.array().colwise() * m2.array();
    dx.array().colwise() *= c.inv_std.array();
    return dx;
  }

  template <class F>
  void visit(F&& f) {
    f(gamma);
    f(beta);
  }
};

template <class S>
struct Attention {
  Linear<S> q, k, v, o;
  int heads = 1;

  struct Cache {
    Mat<S> xq, xkv, Q, K, V, concat;
    std::vector<Mat<S>> probs;  // [segment * heads + head]
  };

  void init(const std::string& name, int width, int h, SplitRng& rng) {
    heads = h;
    q.init(name + ".q", width, width, ParamGroup::Attention, rng);
    // A key bias only shifts every score of a query by the same amount,
    // which softmax ignores, so the key projection has none.
    k.init(name + ".k", width, width, ParamGroup::Attention, rng, false);
    v.init(name + ".v", width, width, ParamGroup::Attention, rng);
    o.init(name + ".o", width, width, ParamGroup::Attention, rng);
  }

  // Queries of segment b are rows [qoff[b], qoff[b+1]) of xq; keys likewise in xkv.
  Mat<S> forward(const Mat<S>& xq, const Mat<S>& xkv, const std::vector<int>& qoff,
                 const std::vector<int>& kvoff, bool causal, const std::vector<char>* key_valid,
                 Cache& c) const {
    c.xq = xq;
    c.xkv = xkv;
    c.Q = q.forward(xq);
    c.K = k.forward(xkv);
    c.V = v.forward(xkv);
    const Eigen::Index width = xq.cols();
    const Eigen::Index dk = width / heads;
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dk)));
    c.concat = Mat<S>::Zero(xq.rows(), width);
    const std::size_t segments = qoff.size() - 1;
    c.probs.assign(segments * static_cast<std::size_t>(heads), Mat<S>());
    for (std::size_t b = 0; b < segments; ++b) {
      const int qs = qoff[b], ql = qoff[b + 1] - qoff[b];
      const int ks = kvoff[b], kl = kvoff[b + 1] - kvoff[b];
      for (int h = 0; h < heads; ++h) {
        Mat<S> scores = (c.Q.block(qs, h * dk, ql, dk) * c.K.block(ks, h * dk, kl, dk).transpose()) * scale;
        Mat<S>& p = c.probs[b * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
        p.resize(ql, kl);
        for (int i = 0; i < ql; ++i) {
          S mx = -std::numeric_limits<S>::infinity();
          for (int j = 0; j < kl; ++j) {
            bool allowed = !(causal && j > i) && (!key_valid || (*key_valid)[static_cast<std::size_t>(ks + j)]);
            if (allowed) mx = std::max(mx, scores(i, j));
          }
          S sum = 0;
          for (int j = 0; j < kl; ++j) {
            bool allowed = !(causal && j > i) && (!key_valid || (*key_valid)[static_cast<std::size_t>(ks + j)]);
            S e = allowed ? std::exp(scores(i, j) - mx) : S(0);
            p(i, j) = e;
            sum += e;
          }
          if (sum > 0) p.row(i) /= sum;
        }
        c.concat.block(qs, h * dk, ql, dk).noalias() = p * c.V.block(ks, h * dk, kl, dk);
      }
    }
    return o.forward(c.concat);
  }

  // Adds the gradients w.r.t. queries and keys/values to dxq and dxkv.
  void backward(const Mat<S>& dout, const std::vector<int>& qoff, const std::vector<int>& kvoff,
                const Cache& c, Mat<S>& dxq, Mat<S>& dxkv) {
    Mat<S> dconcat;
    o.backward(c.concat, dout, &dconcat);
    const Eigen::Index width = c.xq.cols();
    const Eigen::Index dk = width / heads;
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dk)));
    Mat<S> dQ = Mat<S>::Zero(c.Q.rows(), width);
    Mat<S> dK = Mat<S>::Zero(c.K.rows(), width);
    Mat<S> dV = Mat<S>::Zero(c.V.rows(), width);
    const std::size_t segments = qoff.size() - 1;
    for (std::size_t b = 0; b < segments; ++b) {
      const int qs = qoff[b], ql = qoff[b + 1] - qoff[b];
      const int ks = kvoff[b], kl = kvoff[b + 1] - kvoff[b];
      for (int h = 0; h < heads; ++h) {
        const Mat<S>& p = c.probs[b * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
        auto dOh = dconcat.block(qs, h * dk, ql, dk);
        dV.block(ks, h * dk, kl, dk).noalias() += p.transpose() * dOh;
        Mat<S> dp = dOh * c.V.block(ks, h * dk, kl, dk).transpose();
        Col<S> rowdot = (dp.array() * p.array()).rowwise().sum();
        Mat<S> ds = (p.array() * (dp.array().colwise() - rowdot.array())).matrix() * scale;
        dQ.block(qs, h * dk, ql, dk).noalias() += ds * c.K.block(ks, h * dk, kl, dk);
        dK.block(ks, h * dk, kl, dk).noalias() += ds.transpose() * c.Q.block(qs, h * dk, ql, dk);
      }
    }
    Mat<S> tmp;
    q.backward(c.xq, dQ, &tmp);
    dxq += tmp;
    k.backward(c.xkv, dK, &tmp);
    dxkv += tmp;
    v.backward(c.xkv, dV, &tmp);
    dxkv += tmp;
  }

  template <class F>
  void visit(F&& f) {
    q.visit(f);
    k.visit(f);
    v.visit(f);
    o.visit(f);
  }
};

template <class S>
struct FeedForward {
  Linear<S> inner, outer;

  struct Cache {
    Mat<S> x, h;
  };

  void init(const std::string& name, int width, int hidden, SplitRng& rng) {
    inner.init(name + ".inner", width, hidden, ParamGroup::FeedForward, rng);
    outer.init(name + ".outer", hidden, width, ParamGroup::FeedForward, rng);
  }

  Mat<S> forward(const Mat<S>& x, Cache& c) const {
    c.x = x;
    c.h = inner.forward(x).cwiseMax(S(0));
    return outer.forward(c.h);
  }

  Mat<S> backward(const Mat<S>& dy, const Cache& c) {
    Mat<S> dh;
    outer.backward(c.h, dy, &dh);
    dh.array() *= (c.h.array() > S(0)).template cast<S>();
    Mat<S> dx;
    inner.backward(c.x, dh, &dx);
    return dx;
  }

  template <class F>
  void visit(F&& f) {
    inner.visit(f);
    outer.visit(f);
  }
};

template <class S>
struct EncoderLayer {
  Attention<S> attn;
  LayerNorm<S> ln1, ln2;
  FeedForward<S> ff;

  struct Cache {
    typename Attention<S>::Cache attn;
    typename LayerNorm<S>::Cache ln1, ln2;
    typename FeedForward<S>::Cache ff;
  };

  void init(const std::string& name, const ModelConfig& cfg, SplitRng& rng) {
    attn.init(name + ".self_attn", cfg.model_width, cfg.heads, rng);
    ln1.init(name + ".norm1", cfg.model_width);
    ff.init(name + ".ff", cfg.model_width, cfg.feedforward_width, rng);
    ln2.init(name + ".norm2", cfg.model_width);
  }

  Mat<S> forward(const Mat<S>& x, const std::vector<int>& off, const std::vector<char>& key_valid,
                 Cache& c) const {
    Mat<S> a = ln1.forward(x + attn.forward(x, x, off, off, false, &key_valid, c.attn), c.ln1);
    return ln2.forward(a + ff.forward(a, c.ff), c.ln2);
  }

  Mat<S> backward(const Mat<S>& dy, const std::vector<int>& off, const Cache& c) {
    Mat<S> dsum2 = ln2.backward(dy, c.ln2);
    Mat<S> da = dsum2 + ff.backward(dsum2, c.ff);
    Mat<S> dsum1 = ln1.backward(da, c.ln1);
    Mat<S> dx = dsum1;
    attn.backward(dsum1, off, off, c.attn, dx, dx);
    return dx;
  }

  template <class F>
  void visit(F&& f) {
    attn.visit(f);
    ln1.visit(f);
    ff.visit(f);
    ln2.visit(f);
  }
};

template <class S>
struct DecoderLayer {
  Attention<S> self_attn, cross_attn;
  LayerNorm<S> ln1, ln2, ln3;
  FeedForward<S> ff;

  struct Cache {
    typename Attention<S>::Cache self_attn, cross_attn;
    typename LayerNorm<S>::Cache ln1, ln2, ln3;
    typename FeedForward<S>::Cache ff;
  };

  void init(const std::string& name, const ModelConfig& cfg, SplitRng& rng) {
    self_attn.init(name + ".self_attn", cfg.model_width, cfg.heads, rng);
    ln1.init(name + ".norm1", cfg.model_width);
    cross_attn.init(name + ".cross_attn", cfg.model_width, cfg.heads, rng);
    ln2.init(name + ".norm2", cfg.model_width);
    ff.init(name + ".ff", cfg.model_width, cfg.feedforward_width, rng);
    ln3.init(name + ".norm3", cfg.model_width);
  }

  Mat<S> forward(const Mat<S>& x, const Mat<S>& memory, const std::vector<int>& toff,
                 const std::vector<int>& soff, const std::vector<char>& key_valid, Cache& c) const {
    Mat<S> a = ln1.forward(x + self_attn.forward(x, x, toff, toff, true, nullptr, c.self_attn), c.ln1);
    Mat<S> b = ln2.forward(a + cross_attn.forward(a, memory, toff, soff, false, &key_valid, c.cross_attn), c.ln2);
    return ln3.forward(b + ff.forward(b, c.ff), c.ln3);
  }

  // Returns d/dx and adds d/dmemory to dmemory.
  Mat<S> backward(const Mat<S>& dy, const std::vector<int>& toff, const std::vector<int>& soff,
                  const Cache& c, Mat<S>& dmemory) {
    Mat<S> dsum3 = ln3.backward(dy, c.ln3);
    Mat<S> db = dsum3 + ff.backward(dsum3, c.ff);
    Mat<S> dsum2 = ln2.backward(db, c.ln2);
    Mat<S> da = dsum2;
    cross_attn.backward(dsum2, toff, soff, c.cross_attn, da, dmemory);
    Mat<S> dsum1 = ln1.backward(da, c.ln1);
    Mat<S> dx = dsum1;
    self_attn.backward(dsum1, toff, toff, c.self_attn, dx, dx);
    return dx;
  }

  template <class F>
  void visit(F&& f) {
    self_attn.visit(f);
    ln1.visit(f);
    cross_attn.visit(f);
    ln2.visit(f);
    ff.visit(f);
    ln3.visit(f);
  }
};

}  // namespace

template <class S>
struct Model<S>::Layers {
  Param<S> embedding;
  std::vector<EncoderLayer<S>> encoder;
  std::vector<DecoderLayer<S>> decoder;
  Linear<S> output;

  template <class F>
  void visit(F&& f) {
    f(embedding);
    for (auto& l : encoder) l.visit(f);
    for (auto& l : decoder) l.visit(f);
    output.visit(f);
  }
};

namespace {

template <class S>
struct ForwardCache {
  std::vector<char> key_valid;
  std::vector<typename EncoderLayer<S>::Cache> encoder;
  std::vector<typename DecoderLayer<S>::Cache> decoder;
  Mat<S> memory;
  Mat<S> decoder_out;
};

void check_batch(const Batch& batch, const ModelConfig& cfg) {
  const int vocab = cfg.vocabulary.size();
  auto check_ids = [&](const std::vector<int>& ids) {
    for (int id : ids) {
      if (id < 0 || id >= vocab) throw VocabularyError("token id " + std::to_string(id) + " out of range");
    }
  };
  check_ids(batch.src_ids);
  check_ids(batch.tgt_ids);
  if (batch.src_offsets.size() != batch.tgt_offsets.size()) throw ConfigError("source/target batch sizes differ");
  if (batch.src_offsets.back() != static_cast<int>(batch.src_ids.size()) ||
      batch.tgt_offsets.back() != static_cast<int>(batch.tgt_ids.size())) {
    throw ConfigError("batch offsets do not cover the packed ids");
  }
  for (std::size_t b = 0; b + 1 < batch.src_offsets.size(); ++b) {
    if (batch.src_offsets[b + 1] - batch.src_offsets[b] > cfg.max_sequence_length ||
        batch.tgt_offsets[b + 1] - batch.tgt_offsets[b] > cfg.max_sequence_length) {
      throw ConfigError("sequence longer than max_sequence_length");
    }
  }
  if (batch.src_pos.rows() != static_cast<Eigen::Index>(batch.src_ids.size()) ||
      batch.src_pos.cols() != cfg.model_width) {
    throw ConfigError("source position features have the wrong shape");
  }
  if (batch.tgt_pos.size() != 0 && (batch.tgt_pos.rows() != static_cast<Eigen::Index>(batch.tgt_ids.size()) ||
                                    batch.tgt_pos.cols() != cfg.model_width)) {
    throw ConfigError("target position features have the wrong shape");
  }
}

template <class S>
Mat<S> embed(const Param<S>& table, const std::vector<int>& ids, const Eigen::MatrixXd& pos, int width) {
  const S scale = static_cast<S>(std::sqrt(static_cast<double>(width)));
  Mat<S> x(static_cast<Eigen::Index>(ids.size()), width);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    x.row(static_cast<Eigen::Index>(t)) = table.value.row(ids[t]) * scale;
  }
  if (pos.size() != 0) x += pos.cast<S>();
  return x;
}

template <class S>
void embed_backward(Param<S>& table, const std::vector<int>& ids, const Mat<S>& dx, int width) {
  const S scale = static_cast<S>(std::sqrt(static_cast<double>(width)));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    table.grad.row(ids[t]) += dx.row(static_cast<Eigen::Index>(t)) * scale;
  }
}

}  // namespace

template <class S>
Model<S>::Model(const ModelConfig& cfg, std::uint64_t init_seed) : cfg_(cfg), layers_(std::make_unique<Layers>()) {
  cfg_.validate();
  SplitRng rng(init_seed);
  const int d = cfg_.model_width;
  layers_->embedding.init("embedding", ParamGroup::Embedding, cfg_.vocabulary.size(), d);
  uniform_fill(layers_->embedding, std::sqrt(3.0 / d), rng);
  layers_->encoder.resize(static_cast<std::size_t>(cfg_.layers_encoder));
  for (int l = 0; l < cfg_.layers_encoder; ++l) {
    layers_->encoder[static_cast<std::size_t>(l)].init("encoder." + std::to_string(l), cfg_, rng);
  }
  layers_->decoder.resize(static_cast<std::size_t>(cfg_.layers_decoder));
  for (int l = 0; l < cfg_.layers_decoder; ++l) {
    layers_->decoder[static_cast<std::size_t>(l)].init("decoder." + std::to_string(l), cfg_, rng);
  }
  layers_->output.init("output", d, cfg_.vocabulary.size(), ParamGroup::OutputHead, rng);
}

template <class S>
Model<S>::Model(const Model& other)
    : cfg_(other.cfg_), layers_(other.layers_ ? std::make_unique<Layers>(*other.layers_) : nullptr) {}

template <class S>
Model<S>& Model<S>::operator=(const Model& other) {
  if (this != &other) {
    cfg_ = other.cfg_;
    layers_ = other.layers_ ? std::make_unique<Layers>(*other.layers_) : nullptr;
  }
  return *this;
}

template <class S>
Model<S>::Model(Model&&) noexcept = default;
template <class S>
Model<S>& Model<S>::operator=(Model&&) noexcept = default;
template <class S>
Model<S>::~Model() = default;

namespace {

template <class S, class L>
Mat<S> run_encoder(L& layers, const ModelConfig& cfg, const Batch& batch, ForwardCache<S>& c) {
  c.key_valid.resize(batch.src_ids.size());
  for (std::size_t t = 0; t < batch.src_ids.size(); ++t) c.key_valid[t] = batch.src_ids[t] != Vocabulary::kPad;
  Mat<S> x = embed(layers.embedding, batch.src_ids, batch.src_pos, cfg.model_width);
  c.encoder.resize(layers.encoder.size());
  for (std::size_t l = 0; l < layers.encoder.size(); ++l) {
    x = layers.encoder[l].forward(x, batch.src_offsets, c.key_valid, c.encoder[l]);
  }
  return x;
}

template <class S, class L>
Mat<S> run_decoder(L& layers, const ModelConfig& cfg, const Batch& batch, const Mat<S>& memory,
                   ForwardCache<S>& c) {
  Mat<S> y = embed(layers.embedding, batch.tgt_ids, batch.tgt_pos, cfg.model_width);
  c.decoder.resize(layers.decoder.size());
  for (std::size_t l = 0; l < layers.decoder.size(); ++l) {
    y = layers.decoder[l].forward(y, memory, batch.tgt_offsets, batch.src_offsets, c.key_valid, c.decoder[l]);
  }
  c.decoder_out = y;
  return layers.output.forward(y);
}

}  // namespace

template <class S>
Matrix<S> Model<S>::forward(const Batch& batch) const {
  check_batch(batch, cfg_);
  ForwardCache<S> c;
  c.memory = run_encoder<S>(*layers_, cfg_, batch, c);
  return run_decoder<S>(*layers_, cfg_, batch, c.memory, c);
}

template <class S>
Matrix<S> Model<S>::encode(const Batch& batch) const {
  check_batch(batch, cfg_);
  ForwardCache<S> c;
  return run_encoder<S>(*layers_, cfg_, batch, c);
}

template <class S>
Matrix<S> Model<S>::decode_logits(const Batch& batch, const Matrix<S>& memory) const {
  check_batch(batch, cfg_);
  ForwardCache<S> c;
  c.key_valid.resize(batch.src_ids.size());
  for (std::size_t t = 0; t < batch.src_ids.size(); ++t) c.key_valid[t] = batch.src_ids[t] != Vocabulary::kPad;
  return run_decoder<S>(*layers_, cfg_, batch, memory, c);
}

template <class S>
double cross_entropy(const Matrix<S>& logits, const std::vector<int>& labels, Matrix<S>* dlogits) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw ConfigError("label count does not match logits rows");
  }
  const Eigen::Index n = logits.rows();
  double total = 0;
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < n; ++r) {
    const S mx = logits.row(r).maxCoeff();
    Eigen::Matrix<S, 1, Eigen::Dynamic> e = (logits.row(r).array() - mx).exp().matrix();
    const S sum = e.sum();
    total += static_cast<double>(std::log(sum) + mx - logits(r, labels[static_cast<std::size_t>(r)]));
    if (dlogits) {
      dlogits->row(r) = e / (sum * static_cast<S>(n));
      (*dlogits)(r, labels[static_cast<std::size_t>(r)]) -= S(1) / static_cast<S>(n);
    }
  }
  return total / static_cast<double>(n);
}

template <class S>
double Model<S>::loss(const Batch& batch) const {
  return cross_entropy<S>(forward(batch), batch.labels, nullptr);
}

template <class S>
double Model<S>::loss_and_gradients(const Batch& batch) {
  check_batch(batch, cfg_);
  ForwardCache<S> c;
  c.memory = run_encoder<S>(*layers_, cfg_, batch, c);
  Mat<S> logits = run_decoder<S>(*layers_, cfg_, batch, c.memory, c);
  Mat<S> dlogits;
  const double value = cross_entropy<S>(logits, batch.labels, &dlogits);

  Mat<S> dy;
  layers_->output.backward(c.decoder_out, dlogits, &dy);
  Mat<S> dmemory = Mat<S>::Zero(c.memory.rows(), c.memory.cols());
  for (std::size_t l = layers_->decoder.size(); l-- > 0;) {
    dy = layers_->decoder[l].backward(dy, batch.tgt_offsets, batch.src_offsets, c.decoder[l], dmemory);
  }
  embed_backward(layers_->embedding, batch.tgt_ids, dy, cfg_.model_width);
  Mat<S> dx = dmemory;
  for (std::size_t l = layers_->encoder.size(); l-- > 0;) {
    dx = layers_->encoder[l].backward(dx, batch.src_offsets, c.encoder[l]);
  }
  embed_backward(layers_->embedding, batch.src_ids, dx, cfg_.model_width);
  return value;
}

template <class S>
void Model<S>::zero_grad() {
  layers_->visit([](Param<S>& p) { p.grad.setZero(); });
}

template <class S>
void Model<S>::for_each_param(const std::function<void(Param<S>&)>& f) {
  layers_->visit([&](Param<S>& p) { f(p); });
}

template <class S>
void Model<S>::for_each_param(const std::function<void(const Param<S>&)>& f) const {
  layers_->visit([&](Param<S>& p) { f(p); });
}

template <class S>
std::size_t Model<S>::parameter_count() const {
  std::size_t n = 0;
  for_each_param([&](const Param<S>& p) { n += static_cast<std::size_t>(p.value.size()); });
  return n;
}

template class Model<float>;
template class Model<double>;
template double cross_entropy<float>(const Matrix<float>&, const std::vector<int>&, Matrix<float>*);
template double cross_entropy<double>(const Matrix<double>&, const std::vector<int>&, Matrix<double>*);

}  // namespace numeracy::microformer
