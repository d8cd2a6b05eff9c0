#include "numeracy/microformer/config.hpp"

#include <algorithm>

#include "numeracy/json_io.hpp"

namespace numeracy::microformer {

std::string_view position_mode_name(PositionMode m) {
  return m == PositionMode::Sinusoidal ? "sinusoidal" : "pos-masked";
}

PositionMode parse_position_mode(std::string_view s) {
  if (s == "sinusoidal") return PositionMode::Sinusoidal;
  if (s == "pos-masked" || s == "posmasked") return PositionMode::PosMasked;
  throw ConfigError("unknown position mode '" + std::string(s) + "'");
}

std::string_view target_mode_name(TargetPositionMode m) {
  return m == TargetPositionMode::WithTarget ? "with-tgt" : "no-tgt";
}

TargetPositionMode parse_target_mode(std::string_view s) {
  if (s == "with-tgt") return TargetPositionMode::WithTarget;
  if (s == "no-tgt") return TargetPositionMode::NoTarget;
  throw ConfigError("unknown target position mode '" + std::string(s) + "'");
}

std::string_view precision_name(Precision p) { return p == Precision::F32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view s) {
  if (s == "f32") return Precision::F32;
  if (s == "f64") return Precision::F64;
  throw ConfigError("unknown precision '" + std::string(s) + "'");
}

Vocabulary::Vocabulary() {
  tokens_ = {std::string(kPadToken), std::string(kBosToken), std::string(kEosToken)};
  for (int i = 0; i < 3; ++i) ids_.emplace(tokens_[static_cast<std::size_t>(i)], i);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  for (auto& t : tokens) {
    if (v.ids_.count(t)) continue;
    v.ids_.emplace(t, v.size());
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) throw VocabularyError("token '" + std::string(token) + "' is not in the vocabulary");
  return it->second;
}

const std::string& Vocabulary::token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

void ModelConfig::validate() const {
  if (layers_encoder < 1 || layers_decoder < 1) throw ConfigError("need at least one layer per stack");
  if (model_width < 2 || model_width % 2 != 0) throw ConfigError("model_width must be even and >= 2");
  if (heads < 1 || model_width % heads != 0) throw ConfigError("model_width must be divisible by heads");
  if (feedforward_width < 1) throw ConfigError("feedforward_width must be >= 1");
  if (max_sequence_length < 2) throw ConfigError("max_sequence_length must be >= 2");
  if (vocabulary.size() < 4) throw ConfigError("vocabulary holds no data tokens");
  orthography.validate();
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate >= 0)) throw ConfigError("learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(split_ratio > 0 && split_ratio < 1)) throw ConfigError("split_ratio must be in (0, 1)");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
}

nlohmann::ordered_json model_config_to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["layers_encoder"] = c.layers_encoder;
  j["layers_decoder"] = c.layers_decoder;
  j["model_width"] = c.model_width;
  j["heads"] = c.heads;
  j["feedforward_width"] = c.feedforward_width;
  j["position_mode"] = std::string(position_mode_name(c.position_mode));
  j["target_position_mode"] = std::string(target_mode_name(c.target_position_mode));
  j["max_sequence_length"] = c.max_sequence_length;
  j["orthography"] = orthography_to_json(c.orthography);
  j["vocabulary"] = c.vocabulary.tokens();
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.layers_encoder = j.at("layers_encoder").get<int>();
  c.layers_decoder = j.at("layers_decoder").get<int>();
  c.model_width = j.at("model_width").get<int>();
  c.heads = j.at("heads").get<int>();
  c.feedforward_width = j.at("feedforward_width").get<int>();
  c.position_mode = parse_position_mode(j.at("position_mode").get<std::string>());
  c.target_position_mode = parse_target_mode(j.at("target_position_mode").get<std::string>());
  c.max_sequence_length = j.at("max_sequence_length").get<int>();
  c.orthography = orthography_from_json(j.at("orthography"));
  auto toks = j.at("vocabulary").get<std::vector<std::string>>();
  if (toks.size() < 3 || toks[0] != Vocabulary::kPadToken || toks[1] != Vocabulary::kBosToken ||
      toks[2] != Vocabulary::kEosToken) {
    throw ConfigError("vocabulary must start with the reserved symbols");
  }
  c.vocabulary = Vocabulary::from_tokens(std::vector<std::string>(toks.begin() + 3, toks.end()));
  if (c.vocabulary.tokens() != toks) throw ConfigError("vocabulary must be sorted and unique");
  return c;
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["split_ratio"] = c.split_ratio;
  j["seed"] = c.seed;
  j["precision"] = std::string(precision_name(c.precision));
  j["clip_norm"] = c.clip_norm;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["eval_every"] = c.eval_every;
  j["max_vocabulary"] = c.max_vocabulary;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.split_ratio = j.value("split_ratio", c.split_ratio);
  c.seed = j.value("seed", c.seed);
  c.precision = parse_precision(j.value("precision", std::string(precision_name(c.precision))));
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.max_vocabulary = j.value("max_vocabulary", c.max_vocabulary);
  return c;
}

}  // namespace numeracy::microformer
