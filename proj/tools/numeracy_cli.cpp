// numeracy: dataset generation, orthography codec, scoring, skip analysis,
// and microformer training/inference behind one subcommand-style binary.
//
// Exit codes: 0 ok, 1 internal error, 2 bad command line, 3 invalid
// parameter combination, 4 missing file or I/O failure, 5 malformed input,
// 6 training diverged, 7 vocabulary error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "numeracy/bignum.hpp"
#include "numeracy/evaluator.hpp"
#include "numeracy/json_io.hpp"
#include "numeracy/microformer/checkpoint.hpp"
#include "numeracy/microformer/decode.hpp"
#include "numeracy/microformer/trainer.hpp"
#include "numeracy/orthography.hpp"
#include "numeracy/presets.hpp"
#include "numeracy/taskgen.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace numeracy;
namespace mf = numeracy::microformer;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kInvalid = 3, kIo = 4, kMalformed = 5, kDiverged = 6, kVocab = 7 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: " + p.string());
}

std::string read_text(const fs::path& p) {
  require_file(p);
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in && !in.eof()) throw IoError("cannot read " + p.string());
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

std::vector<Example> load_examples(const fs::path& p) {
  require_file(p);
  try {
    return read_jsonl(p);
  } catch (const std::runtime_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

// "dir/stem.jsonl" + ".config.json" -> "dir/stem.config.json"
fs::path sibling(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

// ---- config echo ----------------------------------------------------------

const std::vector<std::string> kNotEchoed = {"help", "config", "echo-config"};

// Only options given explicitly are echoed: defaults and presets live in the
// binary, and an echoed default would wrongly override a preset on replay.
ordered_json echo_config(const CLI::App* sub) {
  ordered_json opts = ordered_json::object();
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (std::find(kNotEchoed.begin(), kNotEchoed.end(), name) != kNotEchoed.end()) continue;
    const bool flag = o->get_type_size() == 0;
    if (o->count() > 0) {
      if (flag) {
        opts[name] = true;
      } else if (o->get_items_expected_max() > 1 || !o->nonpositional()) {
        opts[name] = o->results();
      } else {
        opts[name] = o->results().back();
      }
    }
  }
  ordered_json j;
  j["subcommand"] = sub->get_name();
  j["options"] = opts;
  return j;
}

// Rewrites `--config FILE` into the echoed arguments; later flags override.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string file;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config needs a file");
    file = *(it + 1);
    args.erase(it, it + 2);
  } else {
    file = it->substr(9);
    args.erase(it);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(file));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + file + ": " + e.what());
  }
  const std::string subname = j.at("subcommand").get<std::string>();
  CLI::App* sub = app.get_subcommand(subname);
  // args[0] is the program name; drop a repeated subcommand name.
  std::vector<std::string> user(args.begin() + 1, args.end());
  if (!user.empty() && user.front() == subname) user.erase(user.begin());

  std::vector<std::string> out = {args.front(), subname};
  std::vector<std::string> positionals;
  const bool user_positionals =
      std::any_of(user.begin(), user.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  for (const auto& [name, value] : j.at("options").items()) {
    const CLI::Option* o = sub->get_option_no_throw("--" + name);
    if (!o) o = sub->get_option_no_throw(name);
    if (!o) throw InputError("config " + file + ": unknown option '" + name + "'");
    std::vector<std::string> values;
    if (value.is_array()) {
      values = value.get<std::vector<std::string>>();
    } else if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + name);
      continue;
    } else {
      values = {value.get<std::string>()};
    }
    if (!o->nonpositional()) {
      if (!user_positionals) positionals.insert(positionals.end(), values.begin(), values.end());
      continue;
    }
    for (const auto& v : values) {
      out.push_back("--" + name);
      out.push_back(v);
    }
  }
  out.insert(out.end(), user.begin(), user.end());
  if (!positionals.empty()) {
    out.push_back("--");
    out.insert(out.end(), positionals.begin(), positionals.end());
  }
  return out;
}

void emit(const ordered_json& j, bool json, const std::string& human) {
  if (json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << human;
  }
}

// ---- shared option groups ---------------------------------------------------

struct SpecFlags {
  std::string scheme = "10ebased";
  std::string order = "regular";
  int base = 10;
  int max_digits = 0;
  CLI::Option* scheme_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* base_opt = nullptr;
  CLI::Option* max_digits_opt = nullptr;

  void add(CLI::App* sub, const std::string& max_digits_help) {
    scheme_opt = sub->add_option("--scheme", scheme, "decimal|char|fixedchar|underscore|words|10based|10ebased")
                     ->capture_default_str();
    order_opt = sub->add_option("--order", order, "regular|inverse")->capture_default_str();
    base_opt = sub->add_option("--base", base, "number base")->capture_default_str();
    max_digits_opt = sub->add_option("--max-digits", max_digits, max_digits_help);
  }

  // Flags given on the command line override `base_spec`.
  OrthographySpec resolve(OrthographySpec spec, bool max_digits_is_width) const {
    if (scheme_opt->count()) spec.scheme = parse_scheme(scheme);
    if (order_opt->count()) spec.order = parse_order(order);
    if (base_opt->count()) spec.base = base;
    if (max_digits_is_width && max_digits_opt->count()) spec.max_digits = max_digits;
    if (spec.scheme != Scheme::FixedCharacter && !max_digits_is_width) spec.max_digits.reset();
    return spec;
  }
};

OrthographySpec spec_from_manifest_or(const fs::path& dataset, const OrthographySpec& fallback) {
  const fs::path m = manifest_path_for(dataset);
  if (!fs::is_regular_file(m)) return fallback;
  try {
    return parse_manifest(read_text(m)).spec;
  } catch (const std::exception& e) {
    throw InputError(m.string() + ": " + e.what());
  }
}

// ---- gen -----------------------------------------------------------------------

struct GenArgs {
  SpecFlags spec;
  std::string preset, method = "balanced", operation = "plus", split = "train", out;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  int min_digits = 2, longer_than = 0, pad_width = 0;
  std::string partition;
  bool json = false;
  CLI::Option *method_opt, *count_opt, *operation_opt, *min_opt, *longer_opt, *partition_opt, *pad_opt;
};

Partition parse_partition(const std::string& s) {
  Partition p;
  char slash1 = 0, slash2 = 0;
  std::istringstream in(s);
  if (!(in >> p.from >> slash1 >> p.to >> slash2 >> p.of) || slash1 != '/' || slash2 != '/' || !in.eof()) {
    throw std::invalid_argument("partition must look like FROM/TO/OF, e.g. 0/9/10");
  }
  return p;
}

int run_gen(const GenArgs& a, const CLI::App* sub) {
  Preset plan;
  if (!a.preset.empty()) {
    plan = make_preset(a.preset, a.seed);
  } else {
    SamplingConfig c;
    c.seed = a.seed;
    plan.name = "custom";
    plan.spec = OrthographySpec{};
    plan.splits = {{a.split, c}};
  }
  OrthographySpec spec = a.spec.resolve(plan.spec, false);
  for (auto& s : plan.splits) {
    SamplingConfig& c = s.sampling;
    if (a.method_opt->count()) c.method = parse_method(a.method);
    if (a.count_opt->count() || a.preset.empty()) c.count = a.count;
    if (a.operation_opt->count()) c.operation = parse_operation_mix(a.operation);
    if (a.min_opt->count()) c.min_digits = a.min_digits;
    if (a.longer_opt->count()) c.longer_than = a.longer_than;
    if (a.partition_opt->count()) c.partition = parse_partition(a.partition);
    if (a.spec.max_digits_opt->count()) c.max_digits = a.spec.max_digits;
    c.base = spec.base;
  }
  if (spec.scheme == Scheme::FixedCharacter) {
    int widest = 0;
    for (const auto& s : plan.splits) widest = std::max(widest, s.sampling.max_digits);
    spec.max_digits = a.pad_opt->count() ? a.pad_width : widest + 1;  // sums can carry one extra digit
  }
  spec.validate();

  const bool multi = plan.splits.size() > 1;
  ordered_json summary;
  summary["preset"] = plan.name;
  summary["orthography"] = orthography_to_json(spec);
  summary["splits"] = ordered_json::array();
  std::ostringstream human;
  for (const auto& s : plan.splits) {
    s.sampling.validate();
    Dataset d = generate_dataset(s.sampling, spec, s.split);
    const fs::path path = multi ? sibling(a.out, "." + s.split + ".jsonl") : fs::path(a.out);
    try {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      write_dataset(d, path);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    ordered_json js;
    js["split"] = s.split;
    js["path"] = path.string();
    js["count"] = d.examples.size();
    js["digest"] = d.manifest.digest;
    js["sampling"] = sampling_to_json(s.sampling);
    summary["splits"].push_back(js);
    human << s.split << ": " << d.examples.size() << " examples -> " << path.string() << " (" << d.manifest.digest
          << ")\n";
  }
  ordered_json echo = echo_config(sub);
  write_text(sibling(a.out, ".config.json"), echo.dump(2) + "\n");
  summary["config"] = echo;
  emit(summary, a.json, human.str());
  return kOk;
}

// ---- encode / decode ---------------------------------------------------------------

struct CodecArgs {
  SpecFlags spec;
  std::vector<std::string> values;
  bool json = false;
};

int run_encode(const CodecArgs& a) {
  const OrthographySpec spec = a.spec.resolve(OrthographySpec{}, true);
  spec.validate();
  ordered_json out = ordered_json::array();
  std::ostringstream human;
  for (const auto& v : a.values) {
    const TokenSequence t = encode(BigNumber::from_decimal_string(v), spec);
    out.push_back({{"input", v}, {"wire", t.wire()}, {"tokens", t.tokens()}});
    human << t.wire() << '\n';
  }
  emit(out, a.json, human.str());
  return kOk;
}

int run_decode(const CodecArgs& a) {
  const OrthographySpec spec = a.spec.resolve(OrthographySpec{}, true);
  spec.validate();
  std::string wire;
  for (const auto& v : a.values) wire += (wire.empty() ? "" : " ") + v;
  const BigNumber n = decode(TokenSequence::from_wire(wire), spec);
  ordered_json out = {{"wire", TokenSequence::from_wire(wire).wire()}, {"value", n.to_decimal_string()}};
  emit(out, a.json, n.to_decimal_string() + "\n");
  return kOk;
}

// ---- eval ------------------------------------------------------------------------

struct EvalArgs {
  SpecFlags spec;
  std::string gold, out, csv;
  std::vector<std::string> preds;
  bool json = false;
};

int run_eval(const EvalArgs& a, const CLI::App* sub) {
  const auto gold = load_examples(a.gold);
  OrthographySpec spec = a.spec.resolve(spec_from_manifest_or(a.gold, OrthographySpec{}), true);
  spec.validate();
  ordered_json result;
  std::ostringstream human;
  std::vector<double> accs;
  ordered_json runs = ordered_json::array();
  for (const auto& p : a.preds) {
    require_file(p);
    std::vector<Prediction> preds;
    try {
      preds = read_predictions(p);
    } catch (const std::runtime_error& e) {
      throw InputError(p + ": " + e.what());
    }
    const EvalReport r = evaluate_dataset(gold, preds, spec);
    accs.push_back(r.overall_accuracy);
    runs.push_back(ordered_json::parse(report_json(r)));
    if (a.preds.size() > 1) human << "== " << p << '\n';
    human << report_table(r);
    if (!a.csv.empty()) {
      const fs::path csv = a.preds.size() == 1 ? fs::path(a.csv) : sibling(a.csv, "." + std::to_string(accs.size()) + ".csv");
      write_text(csv, report_csv(r));
    }
  }
  if (accs.size() == 1) {
    result = runs.front();
  } else {
    const CISummary ci = confidence_interval(accs);
    result["runs"] = runs;
    result["mean_accuracy"] = ci.mean;
    result["ci95_half_width"] = ci.half_width;
    human << "mean accuracy " << ci.mean << " +/- " << ci.half_width << " (95% CI, " << accs.size() << " runs)\n";
  }
  if (!a.out.empty()) {
    write_text(a.out, result.dump(2) + "\n");
    write_text(sibling(a.out, ".config.json"), echo_config(sub).dump(2) + "\n");
  }
  emit(result, a.json, human.str());
  return kOk;
}

// ---- analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
  std::string order = "regular", pred;
  std::vector<std::string> tokens;
  bool json = false;
};

ordered_json skip_json(const SkipReport& r) {
  return {{"max_exponent_seen", r.max_exponent_seen}, {"missing_exponents", r.missing_exponents},
          {"duplicated_exponents", r.duplicated_exponents}, {"out_of_order", r.out_of_order},
          {"alternating", r.alternating}, {"well_formed", r.well_formed}};
}

std::string skip_human(const SkipReport& r) {
  std::ostringstream out;
  out << "max exponent " << r.max_exponent_seen << ", missing {";
  for (std::size_t i = 0; i < r.missing_exponents.size(); ++i) out << (i ? "," : "") << r.missing_exponents[i];
  out << "}, duplicated {";
  for (std::size_t i = 0; i < r.duplicated_exponents.size(); ++i) out << (i ? "," : "") << r.duplicated_exponents[i];
  out << "}, out_of_order " << (r.out_of_order ? "yes" : "no") << ", well_formed " << (r.well_formed ? "yes" : "no")
      << '\n';
  return out.str();
}

int run_analyze(const AnalyzeArgs& a) {
  const Order order = parse_order(a.order);
  if (a.pred.empty() == a.tokens.empty()) throw std::invalid_argument("give either a token sequence or --pred");
  if (!a.tokens.empty()) {
    std::string wire;
    for (const auto& t : a.tokens) wire += (wire.empty() ? "" : " ") + t;
    const SkipReport r = analyze_position_skips(TokenSequence::from_wire(wire), order);
    emit(skip_json(r), a.json, skip_human(r));
    return kOk;
  }
  require_file(a.pred);
  std::vector<Prediction> preds;
  try {
    preds = read_predictions(a.pred);
  } catch (const std::runtime_error& e) {
    throw InputError(a.pred + ": " + e.what());
  }
  ordered_json items = ordered_json::array();
  std::size_t well = 0, skipping = 0;
  for (const auto& p : preds) {
    const SkipReport r = analyze_position_skips(TokenSequence::from_wire(p.prediction), order);
    well += r.well_formed;
    skipping += !r.missing_exponents.empty();
    ordered_json j = skip_json(r);
    j["index"] = p.index;
    items.push_back(j);
  }
  ordered_json out = {{"n", preds.size()}, {"well_formed", well}, {"with_missing_exponents", skipping},
                      {"predictions", items}};
  std::ostringstream human;
  human << preds.size() << " predictions: " << well << " well-formed ladders, " << skipping
        << " with skipped position tokens\n";
  emit(out, a.json, human.str());
  return kOk;
}

// ---- train / infer -------------------------------------------------------------------

struct TrainArgs {
  SpecFlags spec;
  std::string train, dev, test, out, log, preset;
  std::string position_mode = "pos-masked", target_mode = "no-tgt", precision = "f32";
  int layers = 4, width = 128, heads = 8, ff = 512, epochs = 55, batch_size = 8, max_len = 256;
  double lr = 1e-5, clip = 1.0;
  std::uint64_t seed = 1;
  bool json = false, quiet = false;
  CLI::Option* epochs_opt = nullptr;
};

int run_train(const TrainArgs& a, const CLI::App* sub) {
  const auto train_set = load_examples(a.train);
  std::vector<Example> dev_set, test_set;
  if (!a.dev.empty()) dev_set = load_examples(a.dev);
  if (!a.test.empty()) test_set = load_examples(a.test);

  mf::ModelConfig mc;
  mc.orthography = a.spec.resolve(spec_from_manifest_or(a.train, OrthographySpec{Scheme::Character, Order::Regular, 10, std::nullopt}), true);
  mc.layers_encoder = mc.layers_decoder = a.layers;
  mc.model_width = a.width;
  mc.heads = a.heads;
  mc.feedforward_width = a.ff;
  mc.position_mode = mf::parse_position_mode(a.position_mode);
  mc.target_position_mode = mf::parse_target_mode(a.target_mode);
  mc.max_sequence_length = a.max_len;
  mf::TrainConfig tc;
  tc.epochs = a.epochs;
  if (!a.preset.empty() && !a.epochs_opt->count()) tc.epochs = make_preset(a.preset, a.seed).epochs;
  tc.learning_rate = a.lr;
  tc.batch_size = a.batch_size;
  tc.seed = a.seed;
  tc.precision = mf::parse_precision(a.precision);
  tc.clip_norm = a.clip;

  const fs::path log_path = a.log.empty() ? sibling(a.out, ".log.csv") : fs::path(a.log);
  auto progress = [&](const mf::EpochLog& e) {
    if (a.quiet) return;
    std::cerr << "epoch " << e.epoch << " loss " << e.train_loss;
    if (e.dev_accuracy) std::cerr << " dev_accuracy " << *e.dev_accuracy;
    std::cerr << '\n';
  };
  const mf::TrainResult r = mf::train(mc, tc, train_set, dev_set.empty() ? nullptr : &dev_set, progress);
  fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  try {
    mf::save_checkpoint(r.checkpoint, out);
  } catch (const mf::CheckpointError& e) {
    throw IoError(e.what());
  }
  write_text(log_path, mf::training_log_csv(r.log));

  ordered_json summary;
  summary["checkpoint"] = out.string();
  summary["log"] = log_path.string();
  summary["epoch"] = r.checkpoint.epoch;
  summary["initial_loss"] = r.initial_loss;
  summary["final_train_loss"] = r.log.empty() ? r.initial_loss : r.log.back().train_loss;
  summary["dev_accuracy"] = r.checkpoint.dev_accuracy ? ordered_json(*r.checkpoint.dev_accuracy) : ordered_json();
  std::ostringstream human;
  human << "saved " << out.string() << " (epoch " << r.checkpoint.epoch << ")\n";
  if (!test_set.empty()) {
    double acc = 0;
    if (tc.precision == mf::Precision::F64) {
      acc = mf::accuracy(mf::load_model<double>(r.checkpoint), test_set);
    } else {
      acc = mf::accuracy(mf::load_model<float>(r.checkpoint), test_set);
    }
    summary["test_accuracy"] = acc;
    human << "test accuracy " << acc << '\n';
  }
  ordered_json echo = echo_config(sub);
  summary["config"] = echo;
  summary["model"] = mf::model_config_to_json(r.checkpoint.model);
  summary["train"] = mf::train_config_to_json(tc);
  write_text(sibling(out, ".config.json"), echo.dump(2) + "\n");
  write_text(sibling(out, ".summary.json"), summary.dump(2) + "\n");
  emit(summary, a.json, human.str());
  return kOk;
}

struct InferArgs {
  std::string checkpoint, data, out;
  std::vector<std::string> questions;
  int max_len = 0;
  bool json = false;
};

template <class S>
std::vector<mf::DecodeResult> infer_all(const mf::Checkpoint& c, const std::vector<std::vector<std::string>>& src,
                                        int max_len) {
  const mf::Model<S> model = mf::load_model<S>(c);
  std::vector<mf::DecodeResult> out;
  constexpr std::size_t kChunk = 64;
  for (std::size_t i = 0; i < src.size(); i += kChunk) {
    std::vector<std::vector<std::string>> part(src.begin() + static_cast<std::ptrdiff_t>(i),
                                               src.begin() + static_cast<std::ptrdiff_t>(std::min(src.size(), i + kChunk)));
    auto r = mf::greedy_decode_batch(model, part, max_len);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

int run_infer(const InferArgs& a, const CLI::App* sub) {
  require_file(a.checkpoint);
  mf::Checkpoint c;
  try {
    c = mf::load_checkpoint(a.checkpoint);
  } catch (const mf::CheckpointError& e) {
    throw InputError(e.what());
  }
  if (a.data.empty() == a.questions.empty()) throw std::invalid_argument("give either --data or --question");
  std::vector<Example> examples;
  std::vector<std::vector<std::string>> sources;
  if (!a.data.empty()) {
    examples = load_examples(a.data);
    for (const auto& e : examples) sources.push_back(mf::tokenize(e).source);
  } else {
    for (const auto& q : a.questions) {
      Example e;
      e.question = q;
      sources.push_back(mf::tokenize(e).source);
    }
  }
  const int max_len = a.max_len > 0 ? a.max_len : c.model.max_sequence_length - 1;
  const auto results = c.train.precision == mf::Precision::F64 ? infer_all<double>(c, sources, max_len)
                                                               : infer_all<float>(c, sources, max_len);
  std::vector<Prediction> preds;
  std::size_t truncated = 0;
  std::ostringstream human;
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::string wire;
    for (const auto& t : results[i].tokens) wire += (wire.empty() ? "" : " ") + t;
    preds.push_back({i, wire});
    truncated += results[i].truncated;
    if (a.out.empty()) human << wire << '\n';
  }
  ordered_json summary;
  summary["n"] = preds.size();
  summary["truncated"] = truncated;
  if (!examples.empty()) {
    const EvalReport r = evaluate_dataset(examples, preds, c.model.orthography);
    summary["overall_accuracy"] = r.overall_accuracy;
    human << "accuracy " << r.overall_accuracy << " on " << r.n << " examples\n";
  }
  if (!a.out.empty()) {
    write_text(a.out, predictions_jsonl(preds));
    write_text(sibling(a.out, ".config.json"), echo_config(sub).dump(2) + "\n");
    summary["predictions"] = a.out;
    human << "wrote " << preds.size() << " predictions to " << a.out << '\n';
  } else {
    ordered_json list = ordered_json::array();
    for (const auto& p : preds) list.push_back(p.prediction);
    summary["predictions"] = list;
  }
  emit(summary, a.json, human.str());
  return kOk;
}

void add_common(CLI::App* sub, bool& json, std::string& echo_path) {
  sub->add_flag("--json", json, "print machine-readable JSON instead of text");
  sub->add_option("--config", "re-run from a config echo (flags given alongside override it)");
  sub->add_option("--echo-config", echo_path, "also write the config echo to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numeracy toolkit: datasets, orthographies, scoring and a small transformer"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string echo_path;

  GenArgs gen;
  auto* gsub = app.add_subcommand("gen", "generate addition/subtraction datasets");
  gen.spec.add(gsub, "maximum operand digits D");
  gsub->add_option("--preset", gen.preset, "named setup: " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  gen.method_opt = gsub->add_option("--method", gen.method, "balanced|random|exhaustive")->capture_default_str();
  gen.count_opt = gsub->add_option("--count", gen.count, "examples per split")->capture_default_str();
  gsub->add_option("--seed", gen.seed, "seed for every random choice")->capture_default_str();
  gen.operation_opt = gsub->add_option("--operation", gen.operation, "plus|minus|mixed")->capture_default_str();
  gen.min_opt = gsub->add_option("--min-digits", gen.min_digits, "smallest digit length (balanced, exhaustive)");
  gen.longer_opt = gsub->add_option("--longer-than", gen.longer_than, "keep examples with an operand longer than N digits");
  gen.partition_opt = gsub->add_option("--partition", gen.partition, "FROM/TO/OF slice of a shuffled exhaustive pool");
  gen.pad_opt = gsub->add_option("--pad-width", gen.pad_width, "fixedchar width (default D + 1)");
  gsub->add_option("--split", gen.split, "split name without a preset")->capture_default_str();
  gsub->add_option("--out", gen.out, "output JSONL path (split names are inserted for presets)")->required();
  add_common(gsub, gen.json, echo_path);

  CodecArgs enc, dec;
  auto* esub = app.add_subcommand("encode", "write decimal numbers in an orthography");
  enc.spec.add(esub, "fixedchar width");
  esub->add_option("numbers", enc.values, "decimal integers (put -- before negative ones)")->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_common(esub, enc.json, echo_path);
  auto* dsub = app.add_subcommand("decode", "read a token sequence back into a decimal number");
  dec.spec.add(dsub, "fixedchar width");
  dsub->add_option("tokens", dec.values, "token sequence")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_common(dsub, dec.json, echo_path);

  EvalArgs ev;
  auto* vsub = app.add_subcommand("eval", "score predictions against a gold dataset");
  ev.spec.add(vsub, "fixedchar width");
  vsub->add_option("--gold", ev.gold, "gold dataset JSONL")->required();
  vsub->add_option("--pred", ev.preds, "prediction JSONL (repeat for a multi-run confidence interval)")
      ->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  vsub->add_option("--out", ev.out, "write the JSON report here");
  vsub->add_option("--csv", ev.csv, "write the per-length CSV here");
  add_common(vsub, ev.json, echo_path);

  AnalyzeArgs an;
  auto* asub = app.add_subcommand("analyze", "position-token skip analysis of 10ebased outputs");
  asub->add_option("tokens", an.tokens, "token sequence")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  asub->add_option("--pred", an.pred, "analyze every prediction in this JSONL file");
  asub->add_option("--order", an.order, "regular|inverse")->capture_default_str();
  add_common(asub, an.json, echo_path);

  TrainArgs tr;
  auto* tsub = app.add_subcommand("train", "train the microformer on a dataset");
  tr.spec.add(tsub, "fixedchar width");
  tsub->add_option("--train", tr.train, "training JSONL")->required();
  tsub->add_option("--dev", tr.dev, "dev JSONL; keeps the best-dev checkpoint");
  tsub->add_option("--test", tr.test, "report test accuracy of the result");
  tsub->add_option("--out", tr.out, "checkpoint path")->required();
  tsub->add_option("--log", tr.log, "training log CSV (default next to the checkpoint)");
  tsub->add_option("--preset", tr.preset, "take the epoch count from a preset");
  tsub->add_option("--position-mode", tr.position_mode, "sinusoidal|pos-masked")->capture_default_str();
  tsub->add_option("--target-mode", tr.target_mode, "with-tgt|no-tgt")->capture_default_str();
  tsub->add_option("--layers", tr.layers, "layers per stack")->capture_default_str();
  tsub->add_option("--width", tr.width, "model width d")->capture_default_str();
  tsub->add_option("--heads", tr.heads, "attention heads")->capture_default_str();
  tsub->add_option("--ff", tr.ff, "feed-forward width")->capture_default_str();
  tsub->add_option("--max-len", tr.max_len, "max sequence length")->capture_default_str();
  tr.epochs_opt = tsub->add_option("--epochs", tr.epochs, "training epochs")->capture_default_str();
  tsub->add_option("--lr", tr.lr, "learning rate")->capture_default_str();
  tsub->add_option("--batch-size", tr.batch_size, "examples per update")->capture_default_str();
  tsub->add_option("--clip-norm", tr.clip, "gradient clipping norm, <= 0 disables")->capture_default_str();
  tsub->add_option("--precision", tr.precision, "f32|f64")->capture_default_str();
  tsub->add_option("--seed", tr.seed, "initialization and shuffling seed")->capture_default_str();
  tsub->add_flag("--quiet", tr.quiet, "no per-epoch progress on stderr");
  add_common(tsub, tr.json, echo_path);

  InferArgs inf;
  auto* isub = app.add_subcommand("infer", "greedy-decode answers with a trained checkpoint");
  isub->add_option("--checkpoint", inf.checkpoint, "checkpoint file")->required();
  isub->add_option("--data", inf.data, "dataset JSONL to answer");
  isub->add_option("--question", inf.questions, "a question such as \"What is 1 2 plus 3 4 ?\"")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  isub->add_option("--out", inf.out, "write predictions JSONL here");
  isub->add_option("--max-len", inf.max_len, "decode at most this many tokens");
  add_common(isub, inf.json, echo_path);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(app, args);
    // CLI11 wants the arguments without the program name, in reverse.
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMalformed;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    if (!echo_path.empty()) write_text(echo_path, echo_config(sub).dump(2) + "\n");
    const std::string name = sub->get_name();
    if (name == "gen") return run_gen(gen, sub);
    if (name == "encode") return run_encode(enc);
    if (name == "decode") return run_decode(dec);
    if (name == "eval") return run_eval(ev, sub);
    if (name == "analyze") return run_analyze(an);
    if (name == "train") return run_train(tr, sub);
    if (name == "infer") return run_infer(inf, sub);
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InputError& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kMalformed;
  } catch (const MalformedSequence& e) {
    std::cerr << "error: malformed sequence: " << e.what() << '\n';
    return kMalformed;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMalformed;
  } catch (const mf::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const mf::VocabularyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVocab;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid parameters: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
