#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "numeracy/orthography.hpp"

namespace numeracy::microformer {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VocabularyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PositionMode { Sinusoidal, PosMasked };
enum class TargetPositionMode { WithTarget, NoTarget };
enum class Precision { F32, F64 };

std::string_view position_mode_name(PositionMode m);
PositionMode parse_position_mode(std::string_view s);
std::string_view target_mode_name(TargetPositionMode m);
TargetPositionMode parse_target_mode(std::string_view s);
std::string_view precision_name(Precision p);
Precision parse_precision(std::string_view s);

// Token <-> id map. Ids 0, 1, 2 are PAD, BOS, EOS.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kBosToken = "<s>";
  static constexpr std::string_view kEosToken = "</s>";

  Vocabulary();
  // Reserved symbols followed by `tokens` sorted and deduplicated.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  bool contains(std::string_view token) const;
  // Throws VocabularyError naming the token when it is unknown.
  int id(std::string_view token) const;
  const std::string& token(int id) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> ids_;
};

struct ModelConfig {
  int layers_encoder = 4;
  int layers_decoder = 4;
  int model_width = 128;
  int heads = 8;
  int feedforward_width = 512;
  PositionMode position_mode = PositionMode::PosMasked;
  TargetPositionMode target_position_mode = TargetPositionMode::NoTarget;
  int max_sequence_length = 256;
  // The orthography of the data; digit tokens are located through it.
  OrthographySpec orthography{Scheme::Character, Order::Regular, 10, std::nullopt};
  Vocabulary vocabulary;

  void validate() const;
};

struct TrainConfig {
  int epochs = 55;
  double learning_rate = 1e-5;
  int batch_size = 8;
  double split_ratio = 0.9;
  std::uint64_t seed = 1;
  Precision precision = Precision::F32;
  double clip_norm = 1.0;  // <= 0 disables clipping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_epsilon = 1e-9;
  int eval_every = 1;         // epochs between dev evaluations
  int max_vocabulary = 1000;  // larger vocabularies (e.g. whole-number tokens) are rejected

  void validate() const;
};

nlohmann::ordered_json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace numeracy::microformer
