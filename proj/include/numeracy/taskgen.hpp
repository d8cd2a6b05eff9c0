#pragma once

// Seeded generation of "What is A plus B ?" datasets.
//
// Example i of a dataset draws from its own stream derived from
// (dataset seed, i), so output does not depend on generation order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "numeracy/bignum.hpp"
#include "numeracy/orthography.hpp"

namespace numeracy {

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Per-example random stream: mt19937_64 (whose output sequence is fixed by
// the C++ standard) seeded from derive_seed, with bounded draws done here
// rather than by std:: distributions, whose algorithms are unspecified.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}
  static SplitRng for_index(std::uint64_t seed, std::uint64_t index) {
    return SplitRng(derive_seed(seed, index));
  }

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi].
  int between(int lo, int hi);
  // Uniform in [0, 1).
  double unit();

 private:
  std::mt19937_64 engine_;
};

template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  SplitRng rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

enum class Operation { Plus, Minus };
enum class OperationMix { Plus, Minus, Mixed };
enum class SamplingMethod { Balanced, Random, Exhaustive };

std::string_view operation_name(Operation op);  // "plus" / "minus"
Operation parse_operation(std::string_view s);
std::string_view operation_mix_name(OperationMix op);
OperationMix parse_operation_mix(std::string_view s);
std::string_view method_name(SamplingMethod m);
SamplingMethod parse_method(std::string_view s);

BigNumber apply(Operation op, const BigNumber& a, const BigNumber& b);

// Keep items [n*from/of, n*to/of) of the seeded shuffle of an exhaustive pool.
struct Partition {
  int from = 0;
  int to = 1;
  int of = 1;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct SamplingConfig {
  SamplingMethod method = SamplingMethod::Balanced;
  int max_digits = 60;
  // Lower end of the balanced digit-length range (and of the exhaustive
  // range); unused by random sampling.
  int min_digits = 2;
  int base = 10;
  std::size_t count = 1000;  // ignored by exhaustive sampling
  std::uint64_t seed = 0;
  OperationMix operation = OperationMix::Plus;
  // Resample until max(digits1, digits2) exceeds this value.
  std::optional<int> longer_than;
  std::optional<Partition> partition;  // exhaustive only

  void validate() const;
  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct OperandPair {
  BigNumber n1;
  BigNumber n2;
};

// d uniform in [min_digits, D], then both operands uniform over d-digit
// base-b numbers.
OperandPair sample_balanced(int max_digits, SplitRng& rng, int base = 10, int min_digits = 2);
// Both operands uniform over [0, base^D - 1].
OperandPair sample_random(int max_digits, SplitRng& rng, int base = 10);

struct Example {
  std::string question;
  std::string answer;
  BigNumber n1;
  BigNumber n2;
  Operation op = Operation::Plus;
  int digits1 = 0;  // base-b digit counts of the operands
  int digits2 = 0;
  std::uint64_t seed = 0;  // dataset seed
  std::size_t index = 0;   // position of the draw within the dataset
};

// Digit count of |n| in base b.
int digit_count(const BigNumber& n, int base);

TokenSequence question_tokens(const BigNumber& n1, const BigNumber& n2, Operation op,
                              const OrthographySpec& spec);
Example render_example(const BigNumber& n1, const BigNumber& n2, Operation op,
                       const OrthographySpec& spec);

struct DatasetManifest {
  SamplingConfig config;
  OrthographySpec spec;
  std::string split;
  std::size_t count = 0;
  std::string digest;  // SHA-256 of the JSONL bytes
};

struct Dataset {
  std::vector<Example> examples;
  DatasetManifest manifest;
};

Dataset generate_dataset(const SamplingConfig& cfg, const OrthographySpec& spec,
                         const std::string& split);

// JSONL: one {"question","answer","n1","n2","op","digits1","digits2"} per line.
std::string to_jsonl(const std::vector<Example>& examples);
std::vector<Example> read_jsonl(const std::filesystem::path& path);
std::vector<Example> parse_jsonl(const std::string& text);

std::string manifest_json(const DatasetManifest& m);
DatasetManifest parse_manifest(const std::string& text);
std::filesystem::path manifest_path_for(const std::filesystem::path& dataset);

// Writes the dataset and its manifest next to it. Throws std::runtime_error
// on I/O failure.
void write_dataset(const Dataset& d, const std::filesystem::path& path);

// External prediction files: {"index": i, "prediction": "<wire string>"} per line.
struct Prediction {
  std::size_t index = 0;
  std::string prediction;
};
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
std::string predictions_jsonl(const std::vector<Prediction>& preds);

std::string sha256_hex(std::string_view bytes);

}  // namespace numeracy
