#pragma once

// One-period propagators of the k-modes, Floquet decomposition and the
// closed-form boundary-mode resonance conditions.

#include <span>
#include <vector>

#include "floqsense/lattice.hpp"

namespace floqsense {

enum class StepScheme {
  /// exp(-i H(t_m) dt) at midpoints t_m = (m - 1/2) dt. Second order.
  midpoint,
  /// Two-point Gauss-Legendre Magnus expansion with the commutator term. Fourth order.
  magnus4,
};

struct IntegratorConfig {
  int steps = 4096;
  StepScheme scheme = StepScheme::magnus4;

  void validate() const;
};

struct ModePropagator {
  Real k = 0.0;
  Matrix2c U = Matrix2c::Identity();
  int steps = 0;
};

struct FloquetData {
  Real k = 0.0;
  Real tau = 2.0 * kPi;
  Real mu_plus = 0.0;
  Real mu_minus = 0.0;
  Vector2c phi_plus = Vector2c(1.0, 0.0);
  Vector2c phi_minus = Vector2c(0.0, 1.0);
  Complex r_plus{0.0, 0.0};
  Complex r_minus{0.0, 0.0};
  /// The two Floquet multipliers coincide; phi_plus/phi_minus is then an arbitrary orthonormal basis.
  bool degenerate = false;
};

enum class BoundaryMode { k0, kpi };

struct Resonance {
  Real h0 = 0.0;
  int q = 0;
  BoundaryMode branch = BoundaryMode::kpi;
};

/// Maps mu into [-omega/2, omega/2].
Real fold_quasienergy(Real mu, Real omega);

/// Max entry of |U^dagger U - 1|.
Real unitarity_defect(const Matrix2c& U);

/// Nearest unitary matrix (polar factor).
Matrix2c polar_unitary(const Matrix2c& U);

/// Closed-form exp(-i (n . sigma)) for a real Pauli vector n.
Matrix2c pauli_exponential(const Eigen::Vector3d& n);

/// Drive samples for one period, shared by every mode with the same drive and scheme.
class PeriodStepper {
 public:
  PeriodStepper(const DriveParams& dp, const IntegratorConfig& cfg);

  Matrix2c propagate(Real k, const ChainParams& cp) const;

  const IntegratorConfig& config() const { return cfg_; }

 private:
  DriveParams dp_;
  IntegratorConfig cfg_;
  Real dt_;
  std::vector<Real> drive_;  // midpoint: one sample per step; magnus4: two per step
};

ModePropagator one_period_propagator(Real k, const ChainParams& cp, const DriveParams& dp,
                                     const IntegratorConfig& integrator = {});

FloquetData floquet_modes(const ModePropagator& prop, const DriveParams& dp, const ModeState& initial);

/// Floquet data for every mode of the grid, starting from the ground state of H(0).
std::vector<FloquetData> floquet_spectrum(const ChainParams& cp, const DriveParams& dp,
                                          const IntegratorConfig& integrator = {});

/// Distance between the folded quasienergy ladders +-(h0 -+ hc) + l omega at k = 0 or pi.
Real quasienergy_gap_boundary(BoundaryMode mode, const ChainParams& cp, const DriveParams& dp);

/// All h0 >= 0 with 2(h0 -+ hc) = q omega, |q| <= q_max, sorted by h0 then branch.
std::vector<Resonance> resonance_fields(const DriveParams& dp, Real hc, int q_max);

ModeState stroboscopic_mode_state(const FloquetData& fd, long n, const ModeState& initial);

}  // namespace floqsense
