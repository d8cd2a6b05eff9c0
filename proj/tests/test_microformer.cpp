#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "numeracy/microformer/checkpoint.hpp"
#include "numeracy/microformer/decode.hpp"
#include "numeracy/microformer/gradcheck.hpp"
#include "numeracy/microformer/model.hpp"
#include "numeracy/microformer/position.hpp"
#include "numeracy/microformer/trainer.hpp"
#include "numeracy/taskgen.hpp"

using namespace numeracy;
using namespace numeracy::microformer;

namespace {

const OrthographySpec kChar{Scheme::Character, Order::Regular, 10, std::nullopt};
const OrthographySpec kTenE{Scheme::TenEBased, Order::Regular, 10, std::nullopt};

std::vector<Example> small_dataset(const OrthographySpec& spec, std::size_t n, std::uint64_t seed, int D = 3) {
  SamplingConfig c;
  c.method = SamplingMethod::Balanced;
  c.max_digits = D;
  c.count = n;
  c.seed = seed;
  c.operation = OperationMix::Mixed;
  return generate_dataset(c, spec, "train").examples;
}

ModelConfig tiny_config(const std::vector<Example>& data, const OrthographySpec& spec, PositionMode pm,
                        TargetPositionMode tm) {
  ModelConfig m;
  m.layers_encoder = 1;
  m.layers_decoder = 1;
  m.model_width = 16;
  m.heads = 2;
  m.feedforward_width = 32;
  m.position_mode = pm;
  m.target_position_mode = tm;
  m.max_sequence_length = 64;
  m.orthography = spec;
  m.vocabulary = build_vocabulary(data, spec, 1000);
  return m;
}

Batch batch_of(const std::vector<Example>& data, const ModelConfig& cfg, std::size_t n, bool with_targets) {
  static std::vector<TokenizedExample> storage;
  storage.clear();
  for (std::size_t i = 0; i < n; ++i) storage.push_back(tokenize(data[i]));
  std::vector<const TokenizedExample*> ptrs;
  for (const auto& t : storage) ptrs.push_back(&t);
  return make_batch(ptrs, cfg, with_targets);
}

// A one-sequence batch built by hand.
Batch manual_batch(const std::vector<std::string>& src, const std::vector<std::string>& tgt, const ModelConfig& cfg) {
  Batch b;
  for (const auto& t : src) b.src_ids.push_back(cfg.vocabulary.id(t));
  b.src_offsets.push_back(static_cast<int>(b.src_ids.size()));
  b.src_pos = source_position_features(src, cfg);
  b.tgt_ids.push_back(Vocabulary::kBos);
  for (const auto& t : tgt) b.tgt_ids.push_back(cfg.vocabulary.id(t));
  b.tgt_offsets.push_back(static_cast<int>(b.tgt_ids.size()));
  return b;
}

template <class S>
bool bitwise_equal(const Matrix<S>& a, const Matrix<S>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace

TEST_CASE("masked slice examples") {
  SliceBounds s = masked_slice(3, 3, 6);
  CHECK(s.begin == 0);
  CHECK(s.end == 2);
  s = masked_slice(1, 3, 6);
  CHECK(s.begin == 4);
  CHECK(s.end == 6);
  s = masked_slice(1, 1, 6);
  CHECK(s.begin == 0);
  CHECK(s.end == 6);
  CHECK_THROWS_AS(masked_slice(1, 7, 6), ConfigError);
  CHECK_THROWS_AS(masked_slice(0, 3, 6), ConfigError);
  CHECK_THROWS_AS(masked_slice(4, 3, 6), ConfigError);
}

TEST_CASE("masked slice properties") {
  for (int d : {6, 16, 64, 128}) {
    for (int n = 1; n <= d && n <= 70; ++n) {
      std::vector<int> cover(static_cast<std::size_t>(d), 0);
      const int w = d / n;
      for (int i = 1; i <= n; ++i) {
        const auto e = positionwise_masked_embedding(i, n, d);
        const auto s = masked_slice(i, n, d);
        REQUIRE(s.begin == w * (n - i));
        REQUIRE(s.end == w * (n - i + 1));
        REQUIRE(e.sum() == doctest::Approx(s.end - s.begin));
        REQUIRE((e.array() == 0.0 || e.array() == 1.0).all());
        if (i > 1) REQUIRE(masked_slice(i - 1, n, d).begin == s.end);  // adjacent, disjoint
        for (int k = s.begin; k < s.end; ++k) ++cover[static_cast<std::size_t>(k)];
      }
      for (int k = 0; k < d; ++k) REQUIRE(cover[static_cast<std::size_t>(k)] == (k < w * n ? 1 : 0));
    }
  }
}

TEST_CASE("sinusoidal encoding") {
  const auto p0 = sinusoidal_encoding(0, 16);
  for (int k = 0; k < 16; ++k) CHECK(p0[k] == (k % 2 == 0 ? 0.0 : 1.0));
  for (int d : {16, 64}) {
    std::vector<Eigen::VectorXd> seen;
    for (int p = 0; p < 256; ++p) {
      const auto e = sinusoidal_encoding(p, d);
      REQUIRE(e.size() == d);
      REQUIRE(e.cwiseAbs().maxCoeff() <= 1.0);
      for (const auto& q : seen) REQUIRE((q - e).norm() > 1e-6);
      seen.push_back(e);
    }
  }
}

TEST_CASE("digit slots follow significance") {
  auto slots = digit_slots({"What", "is", "2", "7", "1", "plus", "5", "?", "</s>"}, kChar);
  REQUIRE(slots.size() == 9);
  CHECK_FALSE(slots[0]);
  CHECK(slots[2] == DigitSlot{3, 3});
  CHECK(slots[4] == DigitSlot{1, 3});
  CHECK(slots[6] == DigitSlot{1, 1});
  CHECK_FALSE(slots[7]);

  slots = digit_slots({"2", "10e2", "7", "10e1", "1", "10e0"}, kTenE);
  CHECK(slots[0] == DigitSlot{3, 3});
  CHECK_FALSE(slots[1]);
  CHECK(slots[4] == DigitSlot{1, 3});

  const OrthographySpec inv{Scheme::Character, Order::Inverse, 10, std::nullopt};
  slots = digit_slots({"1", "7", "2"}, inv);
  CHECK(slots[0] == DigitSlot{1, 3});
  CHECK(slots[2] == DigitSlot{3, 3});

  slots = digit_slots({"-", "4", "2"}, kChar);
  CHECK_FALSE(slots[0]);
  CHECK(slots[1] == DigitSlot{2, 2});
}

TEST_CASE("position features by mode") {
  const auto data = small_dataset(kChar, 20, 1);
  ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::WithTarget);
  const std::vector<std::string> src = {"What", "is", "2", "7", "plus", "5", "?", "</s>"};
  Eigen::MatrixXd f = source_position_features(src, cfg);
  CHECK(f.rows() == 8);
  CHECK(f.cols() == 16);
  CHECK(f.row(0).isZero());
  CHECK(f.row(2).transpose() == positionwise_masked_embedding(2, 2, 16));
  Eigen::MatrixXd t = target_position_features({"3", "2"}, cfg);
  CHECK(t.rows() == 3);
  CHECK(t.row(0).isZero());
  CHECK(t.row(1).transpose() == positionwise_masked_embedding(2, 2, 16));

  cfg.position_mode = PositionMode::Sinusoidal;
  f = source_position_features(src, cfg);
  for (int p = 0; p < 8; ++p) CHECK(f.row(p).transpose() == sinusoidal_encoding(p, 16));
}

TEST_CASE("logits shape, PAD masking, output-head linearity") {
  const auto data = small_dataset(kChar, 30, 2);
  for (PositionMode pm : {PositionMode::PosMasked, PositionMode::Sinusoidal}) {
    const ModelConfig cfg = tiny_config(data, kChar, pm, TargetPositionMode::NoTarget);
    Model<double> model(cfg, 5);
    const std::vector<std::string> src = {"What", "is", "4", "2", "plus", "7", "?", "</s>"};
    const std::vector<std::string> tgt = {"4", "9"};
    const Batch b = manual_batch(src, tgt, cfg);
    const Matrix<double> logits = model.forward(b);
    CHECK(logits.rows() == 3);
    CHECK(logits.cols() == cfg.vocabulary.size());

    auto padded_src = src;
    for (int k = 0; k < 4; ++k) padded_src.push_back("<pad>");
    Batch padded = manual_batch(padded_src, tgt, cfg);
    const Matrix<double> lp = model.forward(padded);
    CHECK((lp - logits).cwiseAbs().maxCoeff() < 1e-12);
    // Shuffle the PAD suffix's feature rows.
    Batch shuffled = padded;
    shuffled.src_pos.row(8).swap(shuffled.src_pos.row(11));
    shuffled.src_pos.row(9).swap(shuffled.src_pos.row(10));
    CHECK(bitwise_equal(model.forward(shuffled), lp));

    Model<double> doubled = model;
    doubled.for_each_param([](Param<double>& p) {
      if (p.name.rfind("output.", 0) == 0) p.value *= 2.0;
    });
    CHECK((doubled.forward(b) - 2.0 * logits).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("causal decoder") {
  const auto data = small_dataset(kChar, 30, 2);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  Model<double> model(cfg, 6);
  const std::vector<std::string> src = {"What", "is", "4", "2", "plus", "7", "?", "</s>"};
  const Matrix<double> a = model.forward(manual_batch(src, {"4", "9"}, cfg));
  const Matrix<double> b = model.forward(manual_batch(src, {"4", "1"}, cfg));
  CHECK((a.topRows(2) - b.topRows(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.row(2) - b.row(2)).cwiseAbs().maxCoeff() > 1e-9);
}

TEST_CASE("out-of-vocabulary tokens are named") {
  const auto data = small_dataset(kChar, 10, 3);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  try {
    (void)cfg.vocabulary.id("zebra");
    FAIL("expected VocabularyError");
  } catch (const VocabularyError& e) {
    CHECK(std::string(e.what()).find("zebra") != std::string::npos);
  }
  const TokenizedExample odd{{"What", "is", "zebra", "?", "</s>"}, {"1"}};
  const TokenizedExample* one[] = {&odd};
  CHECK_THROWS_AS(make_batch(one, cfg, false), VocabularyError);

  Model<float> model(cfg, 1);
  Batch b = manual_batch({"What", "?"}, {}, cfg);
  b.src_ids[0] = cfg.vocabulary.size();
  CHECK_THROWS_AS(model.forward(b), VocabularyError);
}

TEST_CASE("vocabulary limit") {
  const OrthographySpec dec{Scheme::Decimal, Order::Regular, 10, std::nullopt};
  const auto data = small_dataset(dec, 2000, 4, 20);
  CHECK_THROWS_AS(build_vocabulary(data, dec, 1000), VocabularyError);
  const Vocabulary v = build_vocabulary(small_dataset(kChar, 50, 4), kChar, 1000);
  CHECK(v.token(Vocabulary::kPad) == "<pad>");
  CHECK(v.token(Vocabulary::kBos) == "<s>");
  CHECK(v.token(Vocabulary::kEos) == "</s>");
  for (const char* t : {"What", "is", "plus", "minus", "?", "-", "0", "9"}) CHECK(v.contains(t));
}

TEST_CASE("gradient check") {
  const auto data = small_dataset(kTenE, 12, 7);
  for (TargetPositionMode tm : {TargetPositionMode::NoTarget, TargetPositionMode::WithTarget}) {
    for (PositionMode pm : {PositionMode::PosMasked, PositionMode::Sinusoidal}) {
      const ModelConfig cfg = tiny_config(data, kTenE, pm, tm);
      Model<double> model(cfg, 11);
      const Batch b = batch_of(data, cfg, 4, tm == TargetPositionMode::WithTarget);
      const GradCheckReport r = gradient_check(model, b, 250, 1e-5, 3);
      CHECK(r.checked >= 200);
      CHECK(r.max_relative_error < 1e-4);
      CHECK(r.group_count.size() == 5);
      for (const auto& [g, e] : r.group_max_error) {
        CAPTURE(param_group_name(g));
        CHECK(e < 1e-4);
      }
    }
  }
}

TEST_CASE("parameter inventory") {
  const auto data = small_dataset(kChar, 12, 8);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  const Model<double> model(cfg, 12);
  std::size_t total = 0;
  bool key_bias = false, output_bias = false;
  model.for_each_param([&](const Param<double>& p) {
    total += static_cast<std::size_t>(p.value.size());
    key_bias = key_bias || p.name.find(".k.bias") != std::string::npos;
    output_bias = output_bias || p.name == "output.bias";
  });
  // Softmax ignores a key bias, so none exists.
  CHECK_FALSE(key_bias);
  CHECK(output_bias);
  CHECK(total == model.parameter_count());
}

TEST_CASE("finite-difference error shrinks with the step") {
  const auto data = small_dataset(kChar, 12, 8);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  Model<double> model(cfg, 12);
  const Batch b = batch_of(data, cfg, 4, false);
  const double coarse = gradient_check(model, b, 200, 1e-3, 4).max_relative_error;
  const double fine = gradient_check(model, b, 200, 1e-5, 4).max_relative_error;
  CHECK(fine < coarse);
}

TEST_CASE("decoding") {
  const auto data = small_dataset(kChar, 30, 9);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::WithTarget);
  Model<float> model(cfg, 13);
  const auto src = tokenize(data[0]).source;
  const DecodeResult a = greedy_decode(model, src, 10);
  const DecodeResult b = greedy_decode(model, src, 10);
  CHECK(a.tokens == b.tokens);
  CHECK(a.truncated == b.truncated);
  CHECK(a.tokens.size() <= 10);
  const auto batch = greedy_decode_batch(model, {src, tokenize(data[1]).source}, 10);
  CHECK(batch[0].tokens == a.tokens);
  CHECK(greedy_decode_batch(model, {tokenize(data[1]).source}, 10)[0].tokens == batch[1].tokens);

  // EOS wins the first step.
  Model<float> eos = model;
  eos.for_each_param([](Param<float>& p) {
    if (p.name == "output.bias") p.value(0, Vocabulary::kEos) = 1e4f;
  });
  const DecodeResult e = greedy_decode(eos, src, 10);
  CHECK(e.tokens.empty());
  CHECK_FALSE(e.truncated);

  // Inference never carries target position features.
  const Batch ib = inference_batch({src, src}, {{Vocabulary::kBos}, {Vocabulary::kBos, 5, 6}}, cfg);
  CHECK(ib.tgt_pos.size() == 0);
  CHECK(ib.size() == 2);
  CHECK(ib.tgt_ids.size() == 4);
  CHECK(make_batch(std::vector<const TokenizedExample*>{}, cfg, true).size() == 0);
}

TEST_CASE("checkpoint round trip reproduces logits bit-for-bit") {
  const auto data = small_dataset(kTenE, 20, 10);
  const auto dir = std::filesystem::temp_directory_path() / "numeracy_ckpt_test";
  std::filesystem::create_directories(dir);
  const ModelConfig cfg = tiny_config(data, kTenE, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  const Batch b = batch_of(data, cfg, 5, false);

  Model<float> mf(cfg, 21);
  Checkpoint c;
  c.model = cfg;
  c.epoch = 3;
  c.dev_accuracy = 0.25;
  c.params = export_params(mf);
  save_checkpoint(c, dir / "f.bin");
  const Checkpoint cf = load_checkpoint(dir / "f.bin");
  CHECK(cf.epoch == 3);
  CHECK(cf.dev_accuracy == 0.25);
  CHECK(cf.model.vocabulary == cfg.vocabulary);
  CHECK(bitwise_equal(load_model<float>(cf).forward(b), mf.forward(b)));
  // Widening to double is exact, so the logits agree to float precision.
  const Matrix<double> wide = load_model<double>(cf).forward(b);
  CHECK((wide - mf.forward(b).cast<double>()).cwiseAbs().maxCoeff() < 1e-4);
  Checkpoint broken = cf;
  broken.params.pop_back();
  CHECK_THROWS_AS(load_model<float>(broken), CheckpointError);

  Model<double> md(cfg, 22);
  c.train.precision = Precision::F64;
  c.params = export_params(md);
  c.adam_m = c.params;
  c.adam_v = c.params;
  c.adam_step = 17;
  save_checkpoint(c, dir / "d.bin");
  const Checkpoint cd = load_checkpoint(dir / "d.bin");
  CHECK(cd.adam_step == 17);
  CHECK(cd.adam_m.size() == c.params.size());
  CHECK(bitwise_equal(load_model<double>(cd).forward(b), md.forward(b)));

  // Truncation and bad magic are rejected.
  std::string bytes;
  {
    std::ifstream in(dir / "d.bin", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(dir / "t.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "t.bin"), CheckpointError);
  bytes[0] = 'X';
  {
    std::ofstream out(dir / "m.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "m.bin"), CheckpointError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("training lowers the loss and is reproducible") {
  const auto data = small_dataset(kChar, 400, 11, 2);
  ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::NoTarget);
  TrainConfig tc;
  tc.epochs = 1;
  tc.learning_rate = 1e-3;
  tc.seed = 5;
  const TrainResult a = train(cfg, tc, data);
  const TrainResult b = train(cfg, tc, data);
  REQUIRE(a.log.size() == 1);
  const Model<float> ma = load_model<float>(a.checkpoint);
  CHECK(mean_loss(ma, data, 32) < a.initial_loss);
  CHECK(a.checkpoint.epoch == 1);
  CHECK(a.checkpoint.adam_step == 50);
  REQUIRE(a.checkpoint.params.size() == b.checkpoint.params.size());
  for (std::size_t i = 0; i < a.checkpoint.params.size(); ++i) {
    REQUIRE(a.checkpoint.params[i].data == b.checkpoint.params[i].data);
  }
  CHECK(training_log_csv(a.log).rfind("epoch,train_loss,dev_accuracy\n1,", 0) == 0);

  // A dev set is scored every epoch.
  tc.epochs = 2;
  cfg.target_position_mode = TargetPositionMode::WithTarget;
  const auto dev = small_dataset(kChar, 40, 12, 2);
  const TrainResult c = train(cfg, tc, data, &dev);
  REQUIRE(c.log.size() == 2);
  CHECK(c.log[1].dev_accuracy.has_value());
  CHECK(c.checkpoint.dev_accuracy.has_value());
  const double acc = accuracy(load_model<float>(c.checkpoint), dev);
  CHECK(acc == *c.checkpoint.dev_accuracy);
}

TEST_CASE("configuration validation") {
  ModelConfig m;
  m.model_width = 30;
  m.heads = 4;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  TrainConfig t;
  t.batch_size = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = TrainConfig{};
  t.learning_rate = -1;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  const auto data = small_dataset(kChar, 10, 3);
  const ModelConfig cfg = tiny_config(data, kChar, PositionMode::PosMasked, TargetPositionMode::WithTarget);
  const ModelConfig back = model_config_from_json(model_config_to_json(cfg));
  CHECK(back.vocabulary == cfg.vocabulary);
  CHECK(back.model_width == 16);
  CHECK(back.target_position_mode == TargetPositionMode::WithTarget);
  CHECK(train_config_from_json(train_config_to_json(t)).learning_rate == -1);
}
