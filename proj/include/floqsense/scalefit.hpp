#pragma once

#include <utility>
#include <vector>

#include "floqsense/types.hpp"

namespace floqsense {

struct ScalingFit {
  Real a = 0.0;
  Real eta = 0.0;
  Real r_squared = 0.0;
  std::vector<std::pair<Real, Real>> points;
};

/// Ordinary least squares of log F against log x: F ~ a x^eta.
ScalingFit fit_power_law(const std::vector<std::pair<Real, Real>>& points);

}  // namespace floqsense
