#include "numeracy/taskgen.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "numeracy/json_io.hpp"

namespace numeracy {

using ordered_json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0x6A09E667F3BCC908ULL));
}

std::uint64_t SplitRng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("SplitRng::below(0)");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int SplitRng::between(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("SplitRng::between: empty range");
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double SplitRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::string_view operation_name(Operation op) { return op == Operation::Plus ? "plus" : "minus"; }

Operation parse_operation(std::string_view s) {
  if (s == "plus") return Operation::Plus;
  if (s == "minus") return Operation::Minus;
  throw std::invalid_argument("unknown operation '" + std::string(s) + "'");
}

std::string_view operation_mix_name(OperationMix op) {
  switch (op) {
    case OperationMix::Plus: return "plus";
    case OperationMix::Minus: return "minus";
    case OperationMix::Mixed: return "mixed";
  }
  return "?";
}

OperationMix parse_operation_mix(std::string_view s) {
  if (s == "plus") return OperationMix::Plus;
  if (s == "minus") return OperationMix::Minus;
  if (s == "mixed") return OperationMix::Mixed;
  throw std::invalid_argument("unknown operation '" + std::string(s) + "'");
}

std::string_view method_name(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::Balanced: return "balanced";
    case SamplingMethod::Random: return "random";
    case SamplingMethod::Exhaustive: return "exhaustive";
  }
  return "?";
}

SamplingMethod parse_method(std::string_view s) {
  if (s == "balanced") return SamplingMethod::Balanced;
  if (s == "random") return SamplingMethod::Random;
  if (s == "exhaustive") return SamplingMethod::Exhaustive;
  throw std::invalid_argument("unknown sampling method '" + std::string(s) + "'");
}

BigNumber apply(Operation op, const BigNumber& a, const BigNumber& b) {
  return op == Operation::Plus ? add(a, b) : sub(a, b);
}

void SamplingConfig::validate() const {
  if (base < 2) throw std::invalid_argument("base must be >= 2");
  if (max_digits < 1) throw std::invalid_argument("max_digits must be >= 1");
  if (method != SamplingMethod::Random) {
    if (min_digits < 1) throw std::invalid_argument("min_digits must be >= 1");
    if (min_digits > max_digits) throw std::invalid_argument("min_digits exceeds max_digits");
  }
  if (method == SamplingMethod::Balanced && max_digits < 2) {
    throw std::invalid_argument("balanced sampling needs max_digits >= 2");
  }
  if (method != SamplingMethod::Exhaustive && count < 1) {
    throw std::invalid_argument("count must be >= 1");
  }
  if (longer_than && *longer_than >= max_digits) {
    throw std::invalid_argument("longer_than filter excludes every example");
  }
  if (partition) {
    if (method != SamplingMethod::Exhaustive) {
      throw std::invalid_argument("partition applies only to exhaustive sampling");
    }
    if (partition->of < 1 || partition->from < 0 || partition->from >= partition->to ||
        partition->to > partition->of) {
      throw std::invalid_argument("invalid partition");
    }
  }
  if (method == SamplingMethod::Exhaustive) {
    // Pool size grows as base^(2*max_digits); keep it enumerable.
    double pool = 0;
    for (int d = min_digits; d <= max_digits; ++d) {
      double span = std::pow(static_cast<double>(base), d) - std::pow(static_cast<double>(base), d - 1);
      pool += span * span;
    }
    if (pool > 5e7) throw std::invalid_argument("exhaustive pool too large");
  }
}

namespace {

// Uniform number with exactly `digits` base-b digits (leading digit non-zero)
// or, when leading_zero_ok, uniform over [0, base^digits - 1].
BigNumber draw_digits(int digits, int base, bool leading_zero_ok, SplitRng& rng) {
  RadixDigits r;
  r.base = base;
  r.digits.resize(static_cast<std::size_t>(digits));
  for (int k = 0; k < digits; ++k) {
    int lo = (k == 0 && !leading_zero_ok) ? 1 : 0;
    r.digits[static_cast<std::size_t>(k)] = rng.between(lo, base - 1);
  }
  return from_radix(r);
}

Operation pick_operation(OperationMix mix, SplitRng& rng) {
  switch (mix) {
    case OperationMix::Plus: return Operation::Plus;
    case OperationMix::Minus: return Operation::Minus;
    case OperationMix::Mixed: return rng.below(2) == 0 ? Operation::Plus : Operation::Minus;
  }
  return Operation::Plus;
}

std::vector<OperandPair> exhaustive_pool(const SamplingConfig& cfg) {
  std::vector<OperandPair> pool;
  for (int d = cfg.min_digits; d <= cfg.max_digits; ++d) {
    const long long lo = static_cast<long long>(std::llround(std::pow(cfg.base, d - 1)));
    const long long hi = static_cast<long long>(std::llround(std::pow(cfg.base, d))) - 1;
    for (long long a = lo; a <= hi; ++a) {
      for (long long b = lo; b <= hi; ++b) {
        pool.push_back({BigNumber::from_int(a), BigNumber::from_int(b)});
      }
    }
  }
  return pool;
}

ordered_json example_json(const Example& e) {
  ordered_json j;
  j["question"] = e.question;
  j["answer"] = e.answer;
  j["n1"] = e.n1.to_decimal_string();
  j["n2"] = e.n2.to_decimal_string();
  j["op"] = std::string(operation_name(e.op));
  j["digits1"] = e.digits1;
  j["digits2"] = e.digits2;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

OperandPair sample_balanced(int max_digits, SplitRng& rng, int base, int min_digits) {
  if (max_digits < 2) throw std::invalid_argument("balanced sampling needs D >= 2");
  int d = rng.between(min_digits, max_digits);
  BigNumber a = draw_digits(d, base, false, rng);
  BigNumber b = draw_digits(d, base, false, rng);
  return {std::move(a), std::move(b)};
}

OperandPair sample_random(int max_digits, SplitRng& rng, int base) {
  if (max_digits < 1) throw std::invalid_argument("random sampling needs D >= 1");
  BigNumber a = draw_digits(max_digits, base, true, rng);
  BigNumber b = draw_digits(max_digits, base, true, rng);
  return {std::move(a), std::move(b)};
}

int digit_count(const BigNumber& n, int base) {
  if (base == 10) return static_cast<int>(n.digit_count());
  return static_cast<int>(to_radix(n, base).digits.size());
}

TokenSequence question_tokens(const BigNumber& n1, const BigNumber& n2, Operation op,
                              const OrthographySpec& spec) {
  std::vector<std::string> toks = {"What", "is"};
  const TokenSequence a = encode(n1, spec), b = encode(n2, spec);
  toks.insert(toks.end(), a.tokens().begin(), a.tokens().end());
  toks.emplace_back(operation_name(op));
  toks.insert(toks.end(), b.tokens().begin(), b.tokens().end());
  toks.emplace_back("?");
  return TokenSequence(std::move(toks));
}

Example render_example(const BigNumber& n1, const BigNumber& n2, Operation op,
                       const OrthographySpec& spec) {
  Example e;
  e.question = question_tokens(n1, n2, op, spec).wire();
  e.answer = encode(apply(op, n1, n2), spec).wire();
  e.n1 = n1;
  e.n2 = n2;
  e.op = op;
  e.digits1 = digit_count(n1, spec.base);
  e.digits2 = digit_count(n2, spec.base);
  return e;
}

Dataset generate_dataset(const SamplingConfig& cfg, const OrthographySpec& spec,
                         const std::string& split) {
  cfg.validate();
  spec.validate();
  if (cfg.base != spec.base) throw std::invalid_argument("sampling base differs from orthography base");

  Dataset out;
  if (cfg.method == SamplingMethod::Exhaustive) {
    auto pool = exhaustive_pool(cfg);
    if (cfg.partition) {
      seeded_shuffle(pool, derive_seed(cfg.seed, ~std::uint64_t{0}));
      const std::size_t n = pool.size();
      const std::size_t lo = n * static_cast<std::size_t>(cfg.partition->from) / cfg.partition->of;
      const std::size_t hi = n * static_cast<std::size_t>(cfg.partition->to) / cfg.partition->of;
      pool = std::vector<OperandPair>(pool.begin() + static_cast<std::ptrdiff_t>(lo),
                                      pool.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    out.examples.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      auto rng = SplitRng::for_index(cfg.seed, i);
      Operation op = pick_operation(cfg.operation, rng);
      Example e = render_example(pool[i].n1, pool[i].n2, op, spec);
      e.seed = cfg.seed;
      e.index = i;
      out.examples.push_back(std::move(e));
    }
  } else {
    out.examples.reserve(cfg.count);
    for (std::size_t i = 0; i < cfg.count; ++i) {
      auto rng = SplitRng::for_index(cfg.seed, i);
      while (true) {
        OperandPair p = cfg.method == SamplingMethod::Balanced
                            ? sample_balanced(cfg.max_digits, rng, cfg.base, cfg.min_digits)
                            : sample_random(cfg.max_digits, rng, cfg.base);
        if (cfg.longer_than) {
          int longest = std::max(digit_count(p.n1, cfg.base), digit_count(p.n2, cfg.base));
          if (longest <= *cfg.longer_than) continue;
        }
        Operation op = pick_operation(cfg.operation, rng);
        Example e = render_example(p.n1, p.n2, op, spec);
        e.seed = cfg.seed;
        e.index = i;
        out.examples.push_back(std::move(e));
        break;
      }
    }
  }

  out.manifest.config = cfg;
  out.manifest.spec = spec;
  out.manifest.split = split;
  out.manifest.count = out.examples.size();
  out.manifest.digest = sha256_hex(to_jsonl(out.examples));
  return out;
}

std::string to_jsonl(const std::vector<Example>& examples) {
  std::string s;
  for (const auto& e : examples) {
    s += example_json(e).dump();
    s += '\n';
  }
  return s;
}

std::vector<Example> parse_jsonl(const std::string& text) {
  std::vector<Example> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Example e;
      e.question = j.at("question").get<std::string>();
      e.answer = j.at("answer").get<std::string>();
      e.n1 = BigNumber::from_decimal_string(j.at("n1").get<std::string>());
      e.n2 = BigNumber::from_decimal_string(j.at("n2").get<std::string>());
      e.op = parse_operation(j.at("op").get<std::string>());
      e.digits1 = j.at("digits1").get<int>();
      e.digits2 = j.at("digits2").get<int>();
      e.index = out.size();
      out.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

std::vector<Example> read_jsonl(const std::filesystem::path& path) { return parse_jsonl(read_file(path)); }

std::string manifest_json(const DatasetManifest& m) {
  ordered_json j;
  j["format"] = "numeracy-dataset-manifest/1";
  j["split"] = m.split;
  j["count"] = m.count;
  j["digest"] = "sha256:" + m.digest;
  j["sampling"] = sampling_to_json(m.config);
  j["orthography"] = orthography_to_json(m.spec);
  return j.dump(2) + "\n";
}

DatasetManifest parse_manifest(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  DatasetManifest m;
  m.split = j.at("split").get<std::string>();
  m.count = j.at("count").get<std::size_t>();
  std::string digest = j.at("digest").get<std::string>();
  if (digest.rfind("sha256:", 0) == 0) digest = digest.substr(7);
  m.digest = digest;
  m.config = sampling_from_json(j.at("sampling"));
  m.spec = orthography_from_json(j.at("orthography"));
  return m;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& dataset) {
  auto p = dataset;
  p.replace_extension(".manifest.json");
  return p;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file(path, to_jsonl(d.examples));
  write_file(manifest_path_for(path), manifest_json(d.manifest));
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("index").get<std::size_t>(), j.at("prediction").get<std::string>()});
    } catch (const std::exception& ex) {
      throw std::runtime_error("prediction line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

std::string predictions_jsonl(const std::vector<Prediction>& preds) {
  std::string s;
  for (const auto& p : preds) {
    ordered_json j;
    j["index"] = p.index;
    j["prediction"] = p.prediction;
    s += j.dump();
    s += '\n';
  }
  return s;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace numeracy
