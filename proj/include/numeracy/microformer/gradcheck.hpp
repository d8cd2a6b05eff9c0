#pragma once

#include <cstdint>
#include <map>

#include "numeracy/microformer/model.hpp"

namespace numeracy::microformer {

struct GradCheckReport {
  double max_relative_error = 0;
  std::size_t checked = 0;
  std::map<ParamGroup, double> group_max_error;
  std::map<ParamGroup, std::size_t> group_count;
};

// Compares analytic gradients with central differences on `samples`
// parameter entries, spread evenly across parameter groups. Relative error
// is |a - n| / max(|a| + |n|, 1e-8).
GradCheckReport gradient_check(Model<double>& model, const Batch& batch, std::size_t samples, double step,
                               std::uint64_t seed);

}  // namespace numeracy::microformer
