#pragma once

// Named experiment setups: which splits to generate, with what sampling.
// A preset fixes every non-path parameter; command-line flags override it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "numeracy/orthography.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy {

class PresetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SplitPlan {
  std::string split;  // "train", "dev", "test"
  SamplingConfig sampling;
};

struct Preset {
  std::string name;
  std::string description;
  OrthographySpec spec;
  std::vector<SplitPlan> splits;
  int epochs = 55;  // suggested training length for the train split size
};

const std::vector<std::string>& preset_names();
// Seeds of the splits are derived from `seed`, except for exhaustive
// partitions, which must share it to split one shuffled pool.
Preset make_preset(std::string_view name, std::uint64_t seed);

// Training epochs by training-set size: 10^3 -> 200, 10^4 -> 100,
// 10^5 -> 20, 10^6 -> 10, 10^7 -> 1; other sizes use the nearest
// power of ten at or below.
int epochs_for_training_size(std::size_t n);

}  // namespace numeracy
