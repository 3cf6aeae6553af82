#include "floqsense/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace floqsense {

namespace {

constexpr Real kPolarThreshold = 1e-12;
constexpr Real kUnitarityTolerance = 1e-8;
constexpr Real kDegeneracyTolerance = 1e-12;

// Pauli vector of H_k(t) = -(a0 + f) Z - b X.
Eigen::Vector3d mode_pauli_vector(Real a0, Real b, Real f) { return {-b, 0.0, -(a0 + f)}; }

}  // namespace

void IntegratorConfig::validate() const {
  if (steps < 1) {
    throw InvalidParameter("integrator needs at least one step, got " + std::to_string(steps));
  }
}

Real fold_quasienergy(Real mu, Real omega) {
  const Real half = 0.5 * omega;
  Real folded = std::remainder(mu, omega);  // in [-omega/2, omega/2]
  if (folded > half) folded -= omega;
  if (folded < -half) folded += omega;
  return folded;
}

Real unitarity_defect(const Matrix2c& U) {
  return (U.adjoint() * U - Matrix2c::Identity()).cwiseAbs().maxCoeff();
}

Matrix2c polar_unitary(const Matrix2c& U) {
  Eigen::JacobiSVD<Matrix2c> svd(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix2c pauli_exponential(const Eigen::Vector3d& n) {
  const Real theta = n.norm();
  const Real c = std::cos(theta);
  const Real sinc = theta > 1e-8 ? std::sin(theta) / theta : 1.0 - theta * theta / 6.0;
  const Real x = sinc * n.x();
  const Real y = sinc * n.y();
  const Real z = sinc * n.z();
  Matrix2c m;
  m << Complex(c, -z), Complex(-y, -x), Complex(y, -x), Complex(c, z);
  return m;
}

PeriodStepper::PeriodStepper(const DriveParams& dp, const IntegratorConfig& cfg)
    : dp_(dp), cfg_(cfg), dt_(0.0) {
  dp_.validate();
  cfg_.validate();
  dt_ = dp_.tau / cfg_.steps;
  const auto steps = static_cast<std::size_t>(cfg_.steps);
  if (cfg_.scheme == StepScheme::midpoint) {
    drive_.resize(steps);
    for (std::size_t m = 0; m < steps; ++m) {
      drive_[m] = dp_.field((static_cast<Real>(m) + 0.5) * dt_);
    }
  } else {
    const Real offset = std::sqrt(3.0) / 6.0;
    drive_.resize(2 * steps);
    for (std::size_t m = 0; m < steps; ++m) {
      drive_[2 * m] = dp_.field((static_cast<Real>(m) + 0.5 - offset) * dt_);
      drive_[2 * m + 1] = dp_.field((static_cast<Real>(m) + 0.5 + offset) * dt_);
    }
  }
}

Matrix2c PeriodStepper::propagate(Real k, const ChainParams& cp) const {
  const Real a0 = cp.h0 - cp.J * std::cos(k);
  const Real b = cp.J * cp.gamma * std::sin(k);
  Matrix2c U = Matrix2c::Identity();
  if (cfg_.scheme == StepScheme::midpoint) {
    for (Real f : drive_) {
      U = pauli_exponential(mode_pauli_vector(a0, b, f) * dt_) * U;
    }
  } else {
    const Real commutator_weight = std::sqrt(3.0) / 6.0 * dt_ * dt_;
    for (std::size_t m = 0; m < drive_.size(); m += 2) {
      const Eigen::Vector3d h1 = mode_pauli_vector(a0, b, drive_[m]);
      const Eigen::Vector3d h2 = mode_pauli_vector(a0, b, drive_[m + 1]);
      const Eigen::Vector3d omega = 0.5 * dt_ * (h1 + h2) + commutator_weight * h2.cross(h1);
      U = pauli_exponential(omega) * U;
    }
  }

  Real defect = unitarity_defect(U);
  if (defect > kPolarThreshold) {
    U = polar_unitary(U);
    defect = unitarity_defect(U);
  }
  if (defect > kUnitarityTolerance) {
    throw IntegratorFailure("one-period propagator lost unitarity at k=" + std::to_string(k) +
                            " (defect " + std::to_string(defect) + ")");
  }
  return U;
}

ModePropagator one_period_propagator(Real k, const ChainParams& cp, const DriveParams& dp,
                                     const IntegratorConfig& integrator) {
  PeriodStepper stepper(dp, integrator);
  return {k, stepper.propagate(k, cp), integrator.steps};
}

FloquetData floquet_modes(const ModePropagator& prop, const DriveParams& dp, const ModeState& initial) {
  const Matrix2c& U = prop.U;
  // U = e^{i alpha} (a0 - i a.sigma) with a0^2 + |a|^2 = 1.
  const Real alpha = 0.5 * std::arg(U.determinant());
  const Matrix2c W = std::exp(Complex(0.0, -alpha)) * U;
  const Real a0 = 0.5 * W.trace().real();
  Matrix2c A = kI * (W - a0 * Matrix2c::Identity());
  A = 0.5 * (A + A.adjoint()).eval();
  const Real az = A(0, 0).real();
  const Real ax = A(1, 0).real();
  const Real ay = A(1, 0).imag();
  const Real amag = std::sqrt(ax * ax + ay * ay + az * az);
  const Real phi = std::atan2(amag, a0);

  FloquetData fd;
  fd.k = prop.k;
  fd.tau = dp.tau;

  Vector2c up;
  Vector2c down;
  Real mu_up = 0.0;
  Real mu_down = 0.0;
  if (amag < kDegeneracyTolerance) {
    fd.degenerate = true;
    up = Vector2c(1.0, 0.0);
    down = Vector2c(0.0, 1.0);
    // a0 = +-1 here, so U = e^{i alpha} a0.
    const Real mu = -std::arg(std::exp(Complex(0.0, alpha)) * a0) / dp.tau;
    mu_up = mu;
    mu_down = mu;
  } else {
    if (az >= 0.0) {
      up = Vector2c(Complex(amag + az, 0.0), Complex(ax, ay));
    } else {
      up = Vector2c(Complex(ax, -ay), Complex(amag - az, 0.0));
    }
    up.normalize();
    down = Vector2c(-std::conj(up(1)), std::conj(up(0)));
    // eigenvalues of U: e^{i(alpha - phi)} on `up`, e^{i(alpha + phi)} on `down`
    mu_up = (phi - alpha) / dp.tau;
    mu_down = -(phi + alpha) / dp.tau;
  }
  mu_up = fold_quasienergy(mu_up, dp.omega);
  mu_down = fold_quasienergy(mu_down, dp.omega);

  if (mu_up >= mu_down) {
    fd.mu_plus = mu_up;
    fd.phi_plus = up;
    fd.mu_minus = mu_down;
    fd.phi_minus = down;
  } else {
    fd.mu_plus = mu_down;
    fd.phi_plus = down;
    fd.mu_minus = mu_up;
    fd.phi_minus = up;
  }
  const Vector2c psi = initial.amplitudes();
  fd.r_plus = fd.phi_plus.dot(psi);
  fd.r_minus = fd.phi_minus.dot(psi);
  return fd;
}

std::vector<FloquetData> floquet_spectrum(const ChainParams& cp, const DriveParams& dp,
                                          const IntegratorConfig& integrator) {
  const auto initial = ground_state(cp);
  PeriodStepper stepper(dp, integrator);
  std::vector<FloquetData> out;
  out.reserve(initial.size());
  for (const auto& mode : initial) {
    const ModePropagator prop{mode.k, stepper.propagate(mode.k, cp), integrator.steps};
    out.push_back(floquet_modes(prop, dp, mode));
  }
  return out;
}

Real quasienergy_gap_boundary(BoundaryMode mode, const ChainParams& cp, const DriveParams& dp) {
  const Real hc = cp.critical_field();
  const Real splitting = mode == BoundaryMode::k0 ? 2.0 * (cp.h0 - hc) : 2.0 * (cp.h0 + hc);
  return std::abs(splitting - dp.omega * std::round(splitting / dp.omega));
}

std::vector<Resonance> resonance_fields(const DriveParams& dp, Real hc, int q_max) {
  if (q_max < 1) {
    throw InvalidParameter("q_max must be >= 1");
  }
  dp.validate();
  std::vector<Resonance> out;
  for (int q = -q_max; q <= q_max; ++q) {
    const Real shift = 0.5 * q * dp.omega;
    const Real at_k0 = hc + shift;
    const Real at_kpi = shift - hc;
    if (at_k0 >= -1e-12) out.push_back({std::max(at_k0, 0.0), q, BoundaryMode::k0});
    if (at_kpi >= -1e-12) out.push_back({std::max(at_kpi, 0.0), q, BoundaryMode::kpi});
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
    if (a.h0 != b.h0) return a.h0 < b.h0;
    return static_cast<int>(a.branch) < static_cast<int>(b.branch);
  });
  return out;
}

ModeState stroboscopic_mode_state(const FloquetData& fd, long n, const ModeState& initial) {
  if (n < 0) {
    throw InvalidParameter("stroboscopic index must be >= 0");
  }
  if (n == 0) return initial;
  const Real t = static_cast<Real>(n) * fd.tau;
  const Vector2c psi = std::exp(Complex(0.0, -fd.mu_plus * t)) * fd.r_plus * fd.phi_plus +
                       std::exp(Complex(0.0, -fd.mu_minus * t)) * fd.r_minus * fd.phi_minus;
  const Vector2c normalized = psi.normalized();
  return {initial.k, normalized(0), normalized(1)};
}

}  // namespace floqsense
