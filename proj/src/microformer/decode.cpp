#include "numeracy/microformer/decode.hpp"

#include "numeracy/microformer/position.hpp"

namespace numeracy::microformer {

Batch inference_batch(const std::vector<std::vector<std::string>>& sources,
                      const std::vector<std::vector<int>>& prefixes, const ModelConfig& cfg) {
  Batch b;
  const int d = cfg.model_width;
  std::size_t total = 0;
  for (const auto& s : sources) total += s.size();
  b.src_pos = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), d);
  for (const auto& s : sources) {
    const auto row = static_cast<Eigen::Index>(b.src_ids.size());
    for (const auto& t : s) b.src_ids.push_back(cfg.vocabulary.id(t));
    b.src_offsets.push_back(static_cast<int>(b.src_ids.size()));
    b.src_pos.middleRows(row, static_cast<Eigen::Index>(s.size())) = source_position_features(s, cfg);
  }
  for (const auto& p : prefixes) {
    b.tgt_ids.insert(b.tgt_ids.end(), p.begin(), p.end());
    b.tgt_offsets.push_back(static_cast<int>(b.tgt_ids.size()));
  }
  return b;
}

namespace {

// Sequences `keep` of the source side of `full`, with their encoder rows.
template <class S>
void select_sources(const Batch& full, const Matrix<S>& memory, const std::vector<std::size_t>& keep, Batch& out,
                    Matrix<S>& out_memory) {
  out = Batch{};
  std::size_t total = 0;
  for (auto k : keep) total += static_cast<std::size_t>(full.src_offsets[k + 1] - full.src_offsets[k]);
  out.src_pos.resize(static_cast<Eigen::Index>(total), full.src_pos.cols());
  out_memory.resize(static_cast<Eigen::Index>(total), memory.cols());
  for (auto k : keep) {
    const int begin = full.src_offsets[k];
    const int len = full.src_offsets[k + 1] - begin;
    const auto row = static_cast<Eigen::Index>(out.src_ids.size());
    out.src_ids.insert(out.src_ids.end(), full.src_ids.begin() + begin, full.src_ids.begin() + begin + len);
    out.src_offsets.push_back(static_cast<int>(out.src_ids.size()));
    out.src_pos.middleRows(row, len) = full.src_pos.middleRows(begin, len);
    out_memory.middleRows(row, len) = memory.middleRows(begin, len);
  }
}

}  // namespace

template <class S>
std::vector<DecodeResult> greedy_decode_batch(const Model<S>& model,
                                              const std::vector<std::vector<std::string>>& sources,
                                              int max_len) {
  const ModelConfig& cfg = model.config();
  std::vector<DecodeResult> results(sources.size());
  if (sources.empty()) return results;
  max_len = std::min(max_len, cfg.max_sequence_length - 1);

  std::vector<std::vector<int>> prefixes(sources.size(), std::vector<int>{Vocabulary::kBos});
  Batch full = inference_batch(sources, {}, cfg);
  full.tgt_offsets.assign(sources.size() + 1, 0);  // encoder-only use
  const Matrix<S> memory = model.encode(full);

  std::vector<std::size_t> active(sources.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
  for (int step = 0; step < max_len && !active.empty(); ++step) {
    Batch b;
    Matrix<S> mem;
    select_sources(full, memory, active, b, mem);
    for (auto k : active) {
      b.tgt_ids.insert(b.tgt_ids.end(), prefixes[k].begin(), prefixes[k].end());
      b.tgt_offsets.push_back(static_cast<int>(b.tgt_ids.size()));
    }
    const Matrix<S> logits = model.decode_logits(b, mem);
    std::vector<std::size_t> still;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto k = active[j];
      Eigen::Index best = 0;
      logits.row(b.tgt_offsets[j + 1] - 1).maxCoeff(&best);
      const int id = static_cast<int>(best);
      if (id == Vocabulary::kEos) continue;
      prefixes[k].push_back(id);
      results[k].tokens.push_back(cfg.vocabulary.token(id));
      still.push_back(k);
    }
    active = std::move(still);
  }
  for (auto k : active) results[k].truncated = true;
  return results;
}

template <class S>
DecodeResult greedy_decode(const Model<S>& model, const std::vector<std::string>& source, int max_len) {
  return greedy_decode_batch(model, {source}, max_len).front();
}

template DecodeResult greedy_decode<float>(const Model<float>&, const std::vector<std::string>&, int);
template DecodeResult greedy_decode<double>(const Model<double>&, const std::vector<std::string>&, int);
template std::vector<DecodeResult> greedy_decode_batch<float>(const Model<float>&,
                                                              const std::vector<std::vector<std::string>>&, int);
template std::vector<DecodeResult> greedy_decode_batch<double>(const Model<double>&,
                                                               const std::vector<std::vector<std::string>>&, int);

}  // namespace numeracy::microformer
