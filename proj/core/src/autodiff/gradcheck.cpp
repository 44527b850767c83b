#include "sst/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sst/rng.hpp"

namespace sst::ad {

double GradCheckReport::fraction_within(double tolerance) const {
  if (rel_errors.empty()) return 1.0;
  const auto ok = std::count_if(rel_errors.begin(), rel_errors.end(),
                                [tolerance](double e) { return e < tolerance; });
  return static_cast<double>(ok) / static_cast<double>(rel_errors.size());
}

GradCheckReport finite_difference_check(ParameterStore& store,
                                        const std::function<Var(Graph&)>& build_loss,
                                        const GradCheckOptions& options) {
  Gradients analytic(store);
  {
    Graph g(&store);
    Var loss = build_loss(g);
    g.backward(loss);
    g.collect_gradients(analytic);
  }
  auto eval = [&] {
    Graph g(&store);
    return build_loss(g).value().item();
  };

  GradCheckReport report;
  Rng rng(options.seed);
  for (std::size_t p = 0; p < store.size(); ++p) {
    Tensor& values = store.value(p);
    std::vector<std::size_t> coords(values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.coords_per_parameter > 0 && coords.size() > options.coords_per_parameter) {
      rng.shuffle(coords);
      coords.resize(options.coords_per_parameter);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t c : coords) {
      const double original = values[c];
      values[c] = original + options.epsilon;
      const double up = eval();
      values[c] = original - options.epsilon;
      const double down = eval();
      values[c] = original;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = analytic.at(p).empty() ? 0.0 : analytic.at(p)[c];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      report.rel_errors.push_back(rel);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.offending_parameter = store.name(p);
        report.offending_index = c;
      }
    }
  }
  return report;
}

}  // namespace sst::ad
