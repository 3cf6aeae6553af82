#include "floqsense/correlations.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace floqsense {

namespace {

constexpr Real kAntisymmetryTolerance = 1e-8;
constexpr Real kSpectrumTolerance = 1e-9;

void check_inputs(int L, const ChainParams& cp, std::span<const FloquetData> floquet,
                  std::span<const ModeState> initial) {
  cp.validate();
  const auto modes = static_cast<std::size_t>(cp.N / 2);
  if (floquet.size() != modes || initial.size() != modes) {
    throw InvalidParameter("expected " + std::to_string(modes) + " modes, got " +
                           std::to_string(floquet.size()) + " Floquet and " + std::to_string(initial.size()) +
                           " initial");
  }
  if (L < 1 || L > cp.N) {
    throw InvalidParameter("block size must be in [1, N], got " + std::to_string(L));
  }
}

std::vector<Real> grid_of(std::span<const FloquetData> floquet) {
  std::vector<Real> ks;
  ks.reserve(floquet.size());
  for (const auto& fd : floquet) ks.push_back(fd.k);
  return ks;
}

}  // namespace

std::string StateLabel::str() const {
  switch (kind) {
    case StateKind::ground:
      return "ground";
    case StateKind::strobo:
      return "strobo:" + std::to_string(n);
    case StateKind::steady:
      return "steady";
  }
  return "?";
}

ModeExpectation mode_expectations(const ModeState& ms) {
  return {std::norm(ms.u), kI * std::conj(ms.u) * ms.v};
}

ModeExpectation steady_mode_expectations(const FloquetData& fd, const ModeState& initial) {
  if (fd.degenerate) return mode_expectations(initial);
  const auto plus = mode_expectations({fd.k, fd.phi_plus(0), fd.phi_plus(1)});
  const auto minus = mode_expectations({fd.k, fd.phi_minus(0), fd.phi_minus(1)});
  const Real wp = std::norm(fd.r_plus);
  const Real wm = std::norm(fd.r_minus);
  return {wp * plus.occupation + wm * minus.occupation, wp * plus.pairing + wm * minus.pairing};
}

CorrelationSet correlations_from_modes(int N, int L, std::span<const Real> ks,
                                       std::span<const ModeExpectation> modes, StateLabel label) {
  if (ks.size() != modes.size()) {
    throw InvalidParameter("momentum grid and mode expectations differ in length");
  }
  if (L < 1 || L > N) {
    throw InvalidParameter("block size must be in [1, N], got " + std::to_string(L));
  }
  // Both matrices are Toeplitz; compute one value per separation d = i - j.
  const int span_len = 2 * L - 1;
  std::vector<Complex> c(static_cast<std::size_t>(span_len));
  std::vector<Complex> f(static_cast<std::size_t>(span_len));
  const Real norm = 2.0 / N;
  for (int d = -(L - 1); d <= L - 1; ++d) {
    Real csum = 0.0;
    Complex fsum = 0.0;
    for (std::size_t m = 0; m < ks.size(); ++m) {
      const Real phase = ks[m] * d;
      csum += std::cos(phase) * modes[m].occupation;
      fsum += std::sin(phase) * modes[m].pairing;
    }
    c[static_cast<std::size_t>(d + L - 1)] = norm * csum;
    f[static_cast<std::size_t>(d + L - 1)] = kI * norm * fsum;
  }

  CorrelationSet cs;
  cs.L = L;
  cs.label = label;
  cs.C.resize(L, L);
  cs.F.resize(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      cs.C(i, j) = c[static_cast<std::size_t>(i - j + L - 1)];
      cs.F(i, j) = f[static_cast<std::size_t>(i - j + L - 1)];
    }
  }
  return cs;
}

CorrelationSet correlation_set_at(long n, int L, const ChainParams& cp, std::span<const FloquetData> floquet,
                                  std::span<const ModeState> initial) {
  check_inputs(L, cp, floquet, initial);
  std::vector<ModeExpectation> modes;
  modes.reserve(floquet.size());
  for (std::size_t m = 0; m < floquet.size(); ++m) {
    modes.push_back(mode_expectations(stroboscopic_mode_state(floquet[m], n, initial[m])));
  }
  const auto ks = grid_of(floquet);
  return correlations_from_modes(cp.N, L, ks, modes, StateLabel::strobo(n));
}

CorrelationSet steady_state_correlations(int L, const ChainParams& cp, std::span<const FloquetData> floquet,
                                         std::span<const ModeState> initial) {
  check_inputs(L, cp, floquet, initial);
  std::vector<ModeExpectation> modes;
  modes.reserve(floquet.size());
  for (std::size_t m = 0; m < floquet.size(); ++m) {
    modes.push_back(steady_mode_expectations(floquet[m], initial[m]));
  }
  const auto ks = grid_of(floquet);
  return correlations_from_modes(cp.N, L, ks, modes, StateLabel::steady());
}

MatrixXr majorana_increment(const MatrixXc& C, const MatrixXc& F) {
  const auto L = C.rows();
  MatrixXr K(2 * L, 2 * L);
  for (Eigen::Index i = 0; i < L; ++i) {
    for (Eigen::Index j = 0; j < L; ++j) {
      const Complex sum = C(i, j) + F(i, j);
      const Complex diff = C(i, j) - F(i, j);
      K(2 * i, 2 * j) = 2.0 * sum.imag();
      K(2 * i, 2 * j + 1) = -2.0 * diff.real();
      K(2 * i + 1, 2 * j) = 2.0 * sum.real();
      K(2 * i + 1, 2 * j + 1) = 2.0 * diff.imag();
    }
  }
  return K;
}

MajoranaMatrix::MajoranaMatrix(MatrixXr K, StateLabel label) : K_(std::move(K)), label_(label) {
  if (K_.rows() != K_.cols() || K_.rows() % 2 != 0 || K_.rows() == 0) {
    throw InvalidParameter("Majorana matrix must be square with even nonzero size");
  }
  const Real asym = (K_ + K_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kAntisymmetryTolerance) {
    throw ConventionViolation("Majorana matrix is not antisymmetric (error " + std::to_string(asym) + ")");
  }
  const MatrixXc iK = kI * K_.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(iK);
  if (es.info() != Eigen::Success) {
    throw ConventionViolation("eigendecomposition of iK failed");
  }
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  const Real extreme = eigenvalues_.cwiseAbs().maxCoeff();
  if (extreme > 1.0 + kSpectrumTolerance) {
    throw ConventionViolation("iK eigenvalue outside [-1, 1]: " + std::to_string(extreme));
  }
}

MajoranaMatrix majorana_from_correlations(const CorrelationSet& cs) {
  MatrixXr K = majorana_increment(cs.C, cs.F);
  for (Eigen::Index i = 0; i < cs.L; ++i) {
    K(2 * i, 2 * i + 1) += 1.0;
    K(2 * i + 1, 2 * i) -= 1.0;
  }
  return MajoranaMatrix(std::move(K), cs.label);
}

}  // namespace floqsense
