#include "numeracy/microformer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace numeracy::microformer {

namespace {

constexpr char kMagic[8] = {'N', 'U', 'M', 'X', 'F', 'M', 'R', '\0'};
constexpr std::uint32_t kVersion = 1;

enum Role : std::uint8_t { kParam = 0, kAdamM = 1, kAdamV = 2 };

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated");
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

void put_tensor(std::string& out, Role role, const Tensor& t, Precision p) {
  put<std::uint8_t>(out, role);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
  out += t.name;
  put<std::uint64_t>(out, static_cast<std::uint64_t>(t.rows));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(t.cols));
  for (double x : t.data) {
    if (p == Precision::F32) {
      put<float>(out, static_cast<float>(x));
    } else {
      put<double>(out, x);
    }
  }
}

}  // namespace

template <class S>
std::vector<Tensor> export_params(const Model<S>& model) {
  std::vector<Tensor> out;
  model.for_each_param([&](const Param<S>& p) {
    Tensor t{p.name, p.value.rows(), p.value.cols(), std::vector<double>(static_cast<std::size_t>(p.value.size()))};
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      t.data[static_cast<std::size_t>(i)] = static_cast<double>(p.value.data()[i]);
    }
    out.push_back(std::move(t));
  });
  return out;
}

template <class S>
Model<S> load_model(const Checkpoint& ckpt) {
  Model<S> model(ckpt.model, 0);
  std::size_t k = 0;
  model.for_each_param([&](Param<S>& p) {
    if (k >= ckpt.params.size()) throw CheckpointError("checkpoint lacks parameter " + p.name);
    const Tensor& t = ckpt.params[k++];
    if (t.name != p.name || t.rows != p.value.rows() || t.cols != p.value.cols()) {
      throw CheckpointError("checkpoint tensor " + t.name + " does not match parameter " + p.name);
    }
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<S>(t.data[static_cast<std::size_t>(i)]);
  });
  if (k != ckpt.params.size()) throw CheckpointError("checkpoint has extra tensors");
  return model;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["model"] = model_config_to_json(ckpt.model);
  header["train"] = train_config_to_json(ckpt.train);
  header["epoch"] = ckpt.epoch;
  header["dev_accuracy"] = ckpt.dev_accuracy ? nlohmann::ordered_json(*ckpt.dev_accuracy) : nlohmann::ordered_json();
  header["adam_step"] = ckpt.adam_step;
  const std::string text = header.dump();
  const Precision p = ckpt.train.precision;

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, p == Precision::F32 ? 0u : 1u);
  put<std::uint64_t>(out, text.size());
  out += text;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.params.size() + ckpt.adam_m.size() + ckpt.adam_v.size()));
  for (const auto& t : ckpt.params) put_tensor(out, kParam, t, p);
  for (const auto& t : ckpt.adam_m) put_tensor(out, kAdamM, t, p);
  for (const auto& t : ckpt.adam_v) put_tensor(out, kAdamV, t, p);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw CheckpointError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  Reader r(ss.str());
  if (r.get_bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw CheckpointError(path.string() + " is not a checkpoint");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto prec = r.get<std::uint32_t>();
  if (prec > 1) throw CheckpointError("unknown precision code in checkpoint");
  const auto header_len = r.get<std::uint64_t>();
  Checkpoint c;
  try {
    auto header = nlohmann::json::parse(r.get_bytes(header_len));
    c.model = model_config_from_json(header.at("model"));
    c.train = train_config_from_json(header.at("train"));
    c.epoch = header.at("epoch").get<int>();
    if (!header.at("dev_accuracy").is_null()) c.dev_accuracy = header.at("dev_accuracy").get<double>();
    c.adam_step = header.at("adam_step").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  if ((prec == 0) != (c.train.precision == Precision::F32)) {
    throw CheckpointError("checkpoint precision code disagrees with its header");
  }
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto role = r.get<std::uint8_t>();
    Tensor t;
    t.name = r.get_bytes(r.get<std::uint32_t>());
    t.rows = static_cast<std::int64_t>(r.get<std::uint64_t>());
    t.cols = static_cast<std::int64_t>(r.get<std::uint64_t>());
    if (t.rows < 0 || t.cols < 0 || t.rows > (1 << 24) || t.cols > (1 << 24)) {
      throw CheckpointError("implausible tensor shape for " + t.name);
    }
    t.data.resize(static_cast<std::size_t>(t.rows * t.cols));
    for (auto& x : t.data) x = prec == 0 ? static_cast<double>(r.get<float>()) : r.get<double>();
    switch (role) {
      case kParam: c.params.push_back(std::move(t)); break;
      case kAdamM: c.adam_m.push_back(std::move(t)); break;
      case kAdamV: c.adam_v.push_back(std::move(t)); break;
      default: throw CheckpointError("unknown tensor role in checkpoint");
    }
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint tensors");
  return c;
}

template std::vector<Tensor> export_params<float>(const Model<float>&);
template std::vector<Tensor> export_params<double>(const Model<double>&);
template Model<float> load_model<float>(const Checkpoint&);
template Model<double> load_model<double>(const Checkpoint&);

}  // namespace numeracy::microformer
