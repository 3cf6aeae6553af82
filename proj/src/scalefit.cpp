#include "floqsense/scalefit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/QR>

namespace floqsense {

ScalingFit fit_power_law(const std::vector<std::pair<Real, Real>>& points) {
  if (points.size() < 3) {
    throw InsufficientData("power-law fit needs at least 3 points, got " + std::to_string(points.size()));
  }
  std::set<Real> xs;
  for (const auto& [x, f] : points) {
    if (!(x > 0.0) || !(f > 0.0) || !std::isfinite(x) || !std::isfinite(f)) {
      throw InvalidData("power-law fit needs strictly positive finite data");
    }
    xs.insert(x);
  }
  if (xs.size() != points.size()) {
    throw InvalidData("power-law fit needs distinct x values");
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  MatrixXr A(n, 2);
  VectorXr y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(points[static_cast<std::size_t>(i)].first);
    y(i) = std::log(points[static_cast<std::size_t>(i)].second);
  }
  const VectorXr coef = A.colPivHouseholderQr().solve(y);
  const VectorXr resid = y - A * coef;
  const Real ss_res = resid.squaredNorm();
  const Real ss_tot = (y.array() - y.mean()).matrix().squaredNorm();

  ScalingFit fit;
  fit.a = std::exp(coef(0));
  fit.eta = coef(1);
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.points = points;
  return fit;
}

}  // namespace floqsense
