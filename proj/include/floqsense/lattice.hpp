#pragma once

// Driven XY chain in momentum space.
//
// Each positive momentum k couples the fermionic vacuum |0> and the pair
// state c+_k c+_-k |0> of the Jordan-Wigner fermions. Within that two-level
// space the mode Hamiltonian is
//
//     H_k(t) = -eps_k(t) Z - J gamma sin(k) X,   eps_k(t) = h0 - J cos(k) + h(t)
//
// in the ordered basis {|0>, pair}, with the pair state carrying a phase i
// relative to c+_k c+_-k |0>. With this basis choice the lowest eigenvector of
// H_k(0) is (cos(theta/2), sin(theta/2)) with theta = atan2(J gamma sin k, h0 - J cos k).

#include <vector>

#include "floqsense/types.hpp"

namespace floqsense {

struct ChainParams {
  int N = 2;
  Real J = 1.0;
  Real gamma = 1.0;
  Real h0 = 0.0;

  /// Throws InvalidParameter unless N is even and >= 2 and |gamma| <= 1.
  void validate() const;

  /// Critical field h_c = J.
  Real critical_field() const { return J; }
};

struct DriveParams {
  Real h1 = 0.0;
  Real omega = 1.0;
  Real tau = 2.0 * kPi;

  static DriveParams make(Real h1, Real omega);
  static DriveParams none() { return make(0.0, 1.0); }

  void validate() const;

  Real field(Real t) const;
};

struct ModeState {
  Real k = 0.0;
  Complex v{1.0, 0.0};
  Complex u{0.0, 0.0};

  Vector2c amplitudes() const { return Vector2c(v, u); }
  Real norm_squared() const { return std::norm(u) + std::norm(v); }
};

/// Positive momenta (2m-1) pi / N, m = 1..N/2, ascending.
std::vector<Real> momentum_grid(const ChainParams& params);

/// eps_k(t) = h0 - J cos k + h(t).
Real mode_field(Real k, Real t, const ChainParams& cp, const DriveParams& dp);

Matrix2c mode_hamiltonian(Real k, Real t, const ChainParams& cp, const DriveParams& dp);

/// Positive branch sqrt(eps_k(t)^2 + J^2 gamma^2 sin^2 k).
Real instantaneous_energy(Real k, Real t, const ChainParams& cp, const DriveParams& dp);

Real bogoliubov_angle(Real k, const ChainParams& cp);

/// d(theta_k)/d(h0) of the static Bogoliubov angle.
Real bogoliubov_angle_derivative(Real k, const ChainParams& cp);

ModeState ground_mode(Real k, const ChainParams& cp);

std::vector<ModeState> ground_state(const ChainParams& cp);

}  // namespace floqsense
