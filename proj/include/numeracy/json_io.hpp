#pragma once

// JSON echoes of configuration records, shared by manifests, checkpoints and
// the CLI.

#include "json.hpp"
#include "numeracy/orthography.hpp"
#include "numeracy/taskgen.hpp"

namespace numeracy {

nlohmann::ordered_json orthography_to_json(const OrthographySpec& s);
OrthographySpec orthography_from_json(const nlohmann::json& j);

nlohmann::ordered_json sampling_to_json(const SamplingConfig& c);
SamplingConfig sampling_from_json(const nlohmann::json& j);

}  // namespace numeracy
