#include "floqsense/lattice.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace floqsense {

void ChainParams::validate() const {
  if (N < 2 || N % 2 != 0) {
    throw InvalidParameter("N must be even and >= 2, got " + std::to_string(N));
  }
  if (!(std::abs(gamma) <= 1.0)) {
    throw InvalidParameter("|gamma| must be <= 1, got " + std::to_string(gamma));
  }
  if (!std::isfinite(J) || !std::isfinite(h0)) {
    throw InvalidParameter("J and h0 must be finite");
  }
}

DriveParams DriveParams::make(Real h1, Real omega) {
  DriveParams dp;
  dp.h1 = h1;
  dp.omega = omega;
  dp.tau = 2.0 * kPi / omega;
  dp.validate();
  return dp;
}

void DriveParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidParameter("drive frequency must be positive, got " + std::to_string(omega));
  }
  if (!std::isfinite(h1)) {
    throw InvalidParameter("drive amplitude must be finite");
  }
  if (std::abs(tau * omega - 2.0 * kPi) > 1e-12) {
    throw InvalidParameter("drive period inconsistent with frequency");
  }
}

Real DriveParams::field(Real t) const { return h1 * std::sin(omega * t); }

std::vector<Real> momentum_grid(const ChainParams& params) {
  params.validate();
  const int modes = params.N / 2;
  std::vector<Real> ks(static_cast<std::size_t>(modes));
  for (int m = 1; m <= modes; ++m) {
    ks[static_cast<std::size_t>(m - 1)] = (2.0 * m - 1.0) * kPi / params.N;
  }
  return ks;
}

Real mode_field(Real k, Real t, const ChainParams& cp, const DriveParams& dp) {
  return cp.h0 - cp.J * std::cos(k) + dp.field(t);
}

Matrix2c mode_hamiltonian(Real k, Real t, const ChainParams& cp, const DriveParams& dp) {
  const Real eps = mode_field(k, t, cp, dp);
  const Real pair = cp.J * cp.gamma * std::sin(k);
  Matrix2c h;
  h << -eps, -pair, -pair, eps;
  return h;
}

Real instantaneous_energy(Real k, Real t, const ChainParams& cp, const DriveParams& dp) {
  return std::hypot(mode_field(k, t, cp, dp), cp.J * cp.gamma * std::sin(k));
}

Real bogoliubov_angle(Real k, const ChainParams& cp) {
  const Real y = cp.J * cp.gamma * std::sin(k);
  const Real x = cp.h0 - cp.J * std::cos(k);
  if (y == 0.0 && x == 0.0) {
    throw DegenerateAngle("Bogoliubov angle undefined at k=" + std::to_string(k));
  }
  return std::atan2(y, x);
}

Real bogoliubov_angle_derivative(Real k, const ChainParams& cp) {
  const Real y = cp.J * cp.gamma * std::sin(k);
  const Real x = cp.h0 - cp.J * std::cos(k);
  const Real e2 = x * x + y * y;
  if (e2 == 0.0) {
    throw DegenerateAngle("Bogoliubov angle derivative undefined at k=" + std::to_string(k));
  }
  return -y / e2;
}

ModeState ground_mode(Real k, const ChainParams& cp) {
  const Matrix2c h = mode_hamiltonian(k, 0.0, cp, DriveParams::none());
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(h);
  const auto& vals = es.eigenvalues();
  if (vals(1) - vals(0) <= 0.0) {
    throw DegenerateAngle("k-mode has a degenerate ground state at k=" + std::to_string(k));
  }
  Vector2c g = es.eigenvectors().col(0).normalized();
  // Global phase: v real and nonnegative (u real positive when v vanishes).
  const bool has_vacuum = std::abs(g(0)) > 0.0;
  const Complex ref = has_vacuum ? g(0) : g(1);
  g *= std::conj(ref) / std::abs(ref);
  ModeState s;
  s.k = k;
  s.v = has_vacuum ? Complex(g(0).real(), 0.0) : g(0);
  s.u = has_vacuum ? g(1) : Complex(g(1).real(), 0.0);
  return s;
}

std::vector<ModeState> ground_state(const ChainParams& cp) {
  const auto ks = momentum_grid(cp);
  std::vector<ModeState> out;
  out.reserve(ks.size());
  for (Real k : ks) out.push_back(ground_mode(k, cp));
  return out;
}

}  // namespace floqsense
