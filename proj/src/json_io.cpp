#include "numeracy/json_io.hpp"

namespace numeracy {

nlohmann::ordered_json orthography_to_json(const OrthographySpec& s) {
  nlohmann::ordered_json j;
  j["scheme"] = std::string(scheme_name(s.scheme));
  j["order"] = std::string(order_name(s.order));
  j["base"] = s.base;
  if (s.max_digits) {
    j["max_digits"] = *s.max_digits;
  } else {
    j["max_digits"] = nullptr;
  }
  return j;
}

OrthographySpec orthography_from_json(const nlohmann::json& j) {
  OrthographySpec s;
  s.scheme = parse_scheme(j.at("scheme").get<std::string>());
  s.order = parse_order(j.value("order", std::string("regular")));
  s.base = j.value("base", 10);
  if (j.contains("max_digits") && !j["max_digits"].is_null()) s.max_digits = j["max_digits"].get<int>();
  return s;
}

nlohmann::ordered_json sampling_to_json(const SamplingConfig& c) {
  nlohmann::ordered_json j;
  j["method"] = std::string(method_name(c.method));
  j["max_digits"] = c.max_digits;
  j["min_digits"] = c.min_digits;
  j["base"] = c.base;
  j["count"] = c.count;
  j["seed"] = c.seed;
  j["operation"] = std::string(operation_mix_name(c.operation));
  if (c.longer_than) {
    j["longer_than"] = *c.longer_than;
  } else {
    j["longer_than"] = nullptr;
  }
  if (c.partition) {
    j["partition"] = {{"from", c.partition->from}, {"to", c.partition->to}, {"of", c.partition->of}};
  } else {
    j["partition"] = nullptr;
  }
  return j;
}

SamplingConfig sampling_from_json(const nlohmann::json& j) {
  SamplingConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.max_digits = j.at("max_digits").get<int>();
  c.min_digits = j.value("min_digits", 2);
  c.base = j.value("base", 10);
  c.count = j.value("count", std::size_t{1000});
  c.seed = j.value("seed", std::uint64_t{0});
  c.operation = parse_operation_mix(j.value("operation", std::string("plus")));
  if (j.contains("longer_than") && !j["longer_than"].is_null()) c.longer_than = j["longer_than"].get<int>();
  if (j.contains("partition") && !j["partition"].is_null()) {
    const auto& p = j["partition"];
    c.partition = Partition{p.at("from").get<int>(), p.at("to").get<int>(), p.at("of").get<int>()};
  }
  return c;
}

}  // namespace numeracy
