#include "floqsense/qfi.hpp"

#include <cmath>
#include <string>

namespace floqsense {

QfiResult qfi_from_majorana(const MajoranaMatrix& K_minus, const MajoranaMatrix& K_0, const MajoranaMatrix& K_plus,
                            Real dh0, Real epsilon_cut) {
  if (!(dh0 > 0.0)) {
    throw InvalidParameter("dh0 must be positive");
  }
  if (!(epsilon_cut > 0.0)) {
    throw InvalidParameter("epsilon_cut must be positive");
  }
  if (K_minus.block_size() != K_0.block_size() || K_plus.block_size() != K_0.block_size()) {
    throw IncompatibleInput("Majorana matrices have different block sizes");
  }
  if (!(K_minus.label() == K_0.label()) || !(K_plus.label() == K_0.label())) {
    throw IncompatibleInput("Majorana matrices carry different state labels");
  }

  const MatrixXc dG = (kI / (2.0 * dh0)) * (K_plus.K() - K_minus.K()).cast<Complex>();
  const MatrixXc& R = K_0.eigenvectors();
  const MatrixXc M = R.adjoint() * dG * R;
  const VectorXr& lam = K_0.eigenvalues();

  QfiResult res;
  res.dh0 = dh0;
  res.epsilon_cut = epsilon_cut;
  Real total = 0.0;
  const auto n = lam.size();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index s = 0; s < n; ++s) {
      const Real den = 1.0 - lam(r) * lam(s);
      if (std::abs(den) < epsilon_cut) {
        ++res.dropped_terms;
        continue;
      }
      total += std::norm(M(r, s)) / den;
    }
  }
  res.value = 0.5 * total;
  return res;
}

Real global_pure_qfi(const ChainParams& cp) {
  Real total = 0.0;
  for (Real k : momentum_grid(cp)) {
    const Real d = bogoliubov_angle_derivative(k, cp);
    total += d * d;
  }
  return total;
}

BlockQfiProbe::BlockQfiProbe(const ChainParams& cp, std::optional<DriveParams> dp, Real dh0,
                             const IntegratorConfig& integrator)
    : cp_(cp), dp_(std::move(dp)), dh0_(dh0) {
  cp_.validate();
  if (!(dh0_ > 0.0)) {
    throw InvalidParameter("dh0 must be positive");
  }
  std::optional<PeriodStepper> stepper;
  if (dp_) stepper.emplace(*dp_, integrator);
  for (int side = -1; side <= 1; ++side) {
    Point p;
    p.cp = cp_;
    p.cp.h0 = cp_.h0 + side * dh0_;
    p.initial = ground_state(p.cp);
    if (stepper) {
      p.floquet.reserve(p.initial.size());
      for (const auto& mode : p.initial) {
        const ModePropagator prop{mode.k, stepper->propagate(mode.k, p.cp), integrator.steps};
        p.floquet.push_back(floquet_modes(prop, *dp_, mode));
      }
    }
    points_.push_back(std::move(p));
  }
}

CorrelationSet BlockQfiProbe::correlations(const Point& p, int L, StateLabel label) const {
  if (label.kind == StateKind::ground || (label.kind == StateKind::strobo && label.n == 0)) {
    std::vector<ModeExpectation> modes;
    std::vector<Real> ks;
    for (const auto& m : p.initial) {
      modes.push_back(mode_expectations(m));
      ks.push_back(m.k);
    }
    return correlations_from_modes(p.cp.N, L, ks, modes, label);
  }
  if (!dp_) {
    throw InvalidParameter("state " + label.str() + " needs a drive");
  }
  if (label.kind == StateKind::steady) {
    return steady_state_correlations(L, p.cp, p.floquet, p.initial);
  }
  return correlation_set_at(label.n, L, p.cp, p.floquet, p.initial);
}

std::vector<MajoranaMatrix> BlockQfiProbe::majoranas(int L, StateLabel label) const {
  std::vector<MajoranaMatrix> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(majorana_from_correlations(correlations(p, L, label)));
  return out;
}

QfiResult BlockQfiProbe::evaluate(int L, StateLabel label, Real epsilon_cut) const {
  const auto K = majoranas(L, label);
  return qfi_from_majorana(K[0], K[1], K[2], dh0_, epsilon_cut);
}

QfiResult block_qfi(const ChainParams& cp, const DriveParams& dp, int L, StateLabel label, Real dh0,
                    Real epsilon_cut, const IntegratorConfig& integrator) {
  std::optional<DriveParams> drive;
  if (label.kind != StateKind::ground) drive = dp;
  return BlockQfiProbe(cp, drive, dh0, integrator).evaluate(L, label, epsilon_cut);
}

}  // namespace floqsense
