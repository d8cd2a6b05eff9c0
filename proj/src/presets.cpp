#include "numeracy/presets.hpp"

#include "numeracy/bignum.hpp"

namespace numeracy {

namespace {

SamplingConfig sampling(SamplingMethod method, int max_digits, std::size_t count, std::uint64_t seed, int base = 10) {
  SamplingConfig c;
  c.method = method;
  c.max_digits = max_digits;
  c.count = count;
  c.seed = seed;
  c.base = base;
  return c;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t split) { return derive_seed(seed, 0x73706c6974ULL + split); }

const OrthographySpec kTenE{Scheme::TenEBased, Order::Regular, 10, std::nullopt};

Preset train_dev_test(std::string name, std::string description, OrthographySpec spec, SamplingConfig train,
                      SamplingConfig dev, SamplingConfig test, std::uint64_t seed) {
  train.seed = split_seed(seed, 0);
  dev.seed = split_seed(seed, 1);
  test.seed = split_seed(seed, 2);
  Preset p{std::move(name), std::move(description), spec, {{"train", train}, {"dev", dev}, {"test", test}}, 55};
  p.epochs = epochs_for_training_size(train.count);
  return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "interpolation-60", "extrapolation-50-60", "figure2-smoke",  "bases-2",         "bases-3",
      "bases-10",         "bases-19",            "mismatch-balxbal", "mismatch-balxrand", "mismatch-randxbal",
      "mismatch-randxrand"};
  return names;
}

int epochs_for_training_size(std::size_t n) {
  if (n >= 10'000'000) return 1;
  if (n >= 1'000'000) return 10;
  if (n >= 100'000) return 20;
  if (n >= 10'000) return 100;
  return 200;
}

Preset make_preset(std::string_view name, std::uint64_t seed) {
  using M = SamplingMethod;
  if (name == "interpolation-60") {
    return train_dev_test(std::string(name), "train and test on up to 60-digit numbers", kTenE,
                          sampling(M::Balanced, 60, 100'000, 0), sampling(M::Balanced, 60, 10'000, 0),
                          sampling(M::Random, 60, 10'000, 0), seed);
  }
  if (name == "extrapolation-50-60") {
    SamplingConfig test = sampling(M::Random, 60, 10'000, 0);
    test.longer_than = 50;
    return train_dev_test(std::string(name), "train on up to 50 digits, test on operands longer than 50", kTenE,
                          sampling(M::Balanced, 50, 100'000, 0), sampling(M::Balanced, 50, 10'000, 0), test,
                          seed);
  }
  if (name == "figure2-smoke") {
    // All pairs of 2-digit addends, one shuffle, 9:1 split.
    SamplingConfig c = sampling(M::Exhaustive, 2, 0, seed);
    c.min_digits = 2;
    SamplingConfig train = c, test = c;
    train.partition = Partition{0, 9, 10};
    test.partition = Partition{9, 10, 10};
    return Preset{std::string(name), "2-digit addition, every addend pair in [10, 99], 9:1 split",
                  OrthographySpec{Scheme::Character, Order::Regular, 10, std::nullopt},
                  {{"train", train}, {"test", test}}, 55};
  }
  for (int base : {2, 3, 10, 19}) {
    if (name == "bases-" + std::to_string(base)) {
      const int digits = digit_count_for_equivalent(15, base);
      Preset p = train_dev_test(std::string(name),
                                "addition of numbers equivalent to 15 decimal digits in base " + std::to_string(base),
                                OrthographySpec{Scheme::TenEBased, Order::Inverse, base, std::nullopt},
                                sampling(M::Balanced, digits, 1'000, 0, base),
                                sampling(M::Balanced, digits, 1'000, 0, base),
                                sampling(M::Random, digits, 10'000, 0, base), seed);
      p.epochs = 100;
      return p;
    }
  }
  const std::pair<std::string_view, std::pair<M, M>> mismatch[] = {
      {"mismatch-balxbal", {M::Balanced, M::Balanced}},
      {"mismatch-balxrand", {M::Balanced, M::Random}},
      {"mismatch-randxbal", {M::Random, M::Balanced}},
      {"mismatch-randxrand", {M::Random, M::Random}},
  };
  for (const auto& [n, methods] : mismatch) {
    if (name == n) {
      return train_dev_test(std::string(name), "60-digit addition, train and test length distributions crossed",
                            kTenE, sampling(methods.first, 60, 100'000, 0), sampling(methods.first, 60, 10'000, 0),
                            sampling(methods.second, 60, 10'000, 0), seed);
    }
  }
  throw PresetError("unknown preset '" + std::string(name) + "'");
}

}  // namespace numeracy
