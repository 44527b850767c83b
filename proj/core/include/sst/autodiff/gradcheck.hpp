#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sst/autodiff/graph.hpp"

namespace sst::ad {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string offending_parameter;
  std::size_t offending_index = 0;
  std::vector<double> rel_errors;

  std::size_t coords_checked() const { return rel_errors.size(); }
  double fraction_within(double tolerance) const;
};

struct GradCheckOptions {
  double epsilon = 1e-3;
  // Coordinates sampled per parameter; 0 checks every coordinate.
  std::size_t coords_per_parameter = 0;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double abs_floor = 1e-6;
  std::uint64_t seed = 0;
};

// Builds a fresh graph per evaluation through `build_loss` and compares the
// analytic gradient of every store parameter against central differences.
// The store is restored to its original values before returning.
GradCheckReport finite_difference_check(ParameterStore& store,
                                        const std::function<Var(Graph&)>& build_loss,
                                        const GradCheckOptions& options = {});

}  // namespace sst::ad
