#include "numeracy/microformer/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "numeracy/taskgen.hpp"

namespace numeracy::microformer {

GradCheckReport gradient_check(Model<double>& model, const Batch& batch, std::size_t samples, double step,
                               std::uint64_t seed) {
  std::map<ParamGroup, std::vector<Param<double>*>> groups;
  model.for_each_param([&](Param<double>& p) { groups[p.group].push_back(&p); });

  model.zero_grad();
  model.loss_and_gradients(batch);

  SplitRng rng(seed);
  GradCheckReport report;
  const std::size_t per_group = (samples + groups.size() - 1) / groups.size();
  for (auto& [group, params] : groups) {
    std::size_t total = 0;
    for (auto* p : params) total += static_cast<std::size_t>(p->value.size());
    for (std::size_t s = 0; s < per_group; ++s) {
      // Uniform over all entries of the group.
      auto flat = rng.below(total);
      Param<double>* p = params.front();
      for (auto* q : params) {
        const auto n = static_cast<std::size_t>(q->value.size());
        if (flat < n) {
          p = q;
          break;
        }
        flat -= n;
      }
      double& x = p->value.data()[flat];
      const double analytic = p->grad.data()[flat];
      const double saved = x;
      x = saved + step;
      const double up = model.loss(batch);
      x = saved - step;
      const double down = model.loss(batch);
      x = saved;
      const double numeric = (up - down) / (2 * step);
      const double err = std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-8);
      report.max_relative_error = std::max(report.max_relative_error, err);
      report.group_max_error[group] = std::max(report.group_max_error[group], err);
      ++report.group_count[group];
      ++report.checked;
    }
  }
  return report;
}

}  // namespace numeracy::microformer
