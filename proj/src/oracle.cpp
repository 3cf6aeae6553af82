#include "floqsense/oracle.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace floqsense {

namespace {

constexpr Real kNormDrift = 1e-9;
constexpr Real kSupportCut = 1e-12;

void check_sites(int N) {
  if (N < 2) throw InvalidParameter("dense chain needs N >= 2");
  if (N > kMaxDenseSites) {
    throw ResourceLimit("dense oracle is limited to N <= " + std::to_string(kMaxDenseSites) + ", got " +
                        std::to_string(N));
  }
}

// Bit of site i in basis index b, site 0 most significant.
inline int bit_of(std::size_t b, int i, int N) { return static_cast<int>((b >> (N - 1 - i)) & 1U); }

// Hopping/pairing part of H/2 (no field).
SparseMatrixR bond_part(const ChainParams& cp) {
  const int N = cp.N;
  const std::size_t dim = std::size_t{1} << N;
  std::vector<Eigen::Triplet<Real>> trip;
  trip.reserve(dim * static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    const std::size_t mask = (std::size_t{1} << (N - 1 - i)) | (std::size_t{1} << (N - 1 - j));
    for (std::size_t b = 0; b < dim; ++b) {
      // XX flips both spins with amplitude 1; YY gives -1 on aligned, +1 on anti-aligned pairs.
      const Real yy = bit_of(b, i, N) == bit_of(b, j, N) ? -1.0 : 1.0;
      const Real amp = -0.5 * cp.J * (0.5 * (1.0 + cp.gamma) + 0.5 * (1.0 - cp.gamma) * yy);
      trip.emplace_back(static_cast<int>(b ^ mask), static_cast<int>(b), amp);
    }
  }
  SparseMatrixR H(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

// sum_i sigma^z_i as a diagonal.
VectorXr magnetization(int N) {
  const std::size_t dim = std::size_t{1} << N;
  VectorXr m(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    m(static_cast<Eigen::Index>(b)) = N - 2 * std::popcount(b);
  }
  return m;
}

// c_i |psi> (annihilate) or c+_i |psi> (create).
VectorXc apply_fermion(const VectorXc& psi, int N, int i, bool create) {
  VectorXc out = VectorXc::Zero(psi.size());
  const std::size_t dim = std::size_t{1} << N;
  const std::size_t site = std::size_t{1} << (N - 1 - i);
  const std::size_t higher = ~((site << 1) - 1) & (dim - 1);  // sites l < i
  for (std::size_t b = 0; b < dim; ++b) {
    const bool occupied = (b & site) != 0;
    if (occupied == create) continue;
    const Real sign = (std::popcount(b & higher) % 2 == 0) ? 1.0 : -1.0;
    out(static_cast<Eigen::Index>(b ^ site)) = sign * psi(static_cast<Eigen::Index>(b));
  }
  return out;
}

}  // namespace

SparseMatrixR dense_hamiltonian(const ChainParams& cp, Real t, const DriveParams& dp) {
  cp.validate();
  check_sites(cp.N);
  SparseMatrixR H = bond_part(cp);
  const VectorXr z = magnetization(cp.N);
  const Real field = -0.5 * (cp.h0 + dp.field(t));
  SparseMatrixR D(H.rows(), H.cols());
  D.reserve(Eigen::VectorXi::Constant(H.cols(), 1));
  for (Eigen::Index b = 0; b < z.size(); ++b) D.insert(b, b) = field * z(b);
  return H + D;
}

VectorXr parity_diagonal(int N) {
  check_sites(N);
  const std::size_t dim = std::size_t{1} << N;
  VectorXr p(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) p(static_cast<Eigen::Index>(b)) = std::popcount(b) % 2 == 0 ? 1.0 : -1.0;
  return p;
}

DenseState dense_ground_state(const ChainParams& cp) {
  const SparseMatrixR H = dense_hamiltonian(cp, 0.0, DriveParams::none());
  const VectorXr parity = parity_diagonal(cp.N);
  std::vector<Eigen::Index> even;
  for (Eigen::Index b = 0; b < parity.size(); ++b) {
    if (parity(b) > 0) even.push_back(b);
  }
  std::vector<Eigen::Index> position(static_cast<std::size_t>(parity.size()), -1);
  for (std::size_t m = 0; m < even.size(); ++m) position[static_cast<std::size_t>(even[m])] = static_cast<Eigen::Index>(m);

  const auto dim = static_cast<Eigen::Index>(even.size());
  MatrixXr block = MatrixXr::Zero(dim, dim);
  for (Eigen::Index col = 0; col < H.outerSize(); ++col) {
    for (SparseMatrixR::InnerIterator it(H, col); it; ++it) {
      const auto r = position[static_cast<std::size_t>(it.row())];
      const auto c = position[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) block(r, c) = it.value();
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(block);
  if (es.info() != Eigen::Success) {
    throw IntegratorFailure("dense ground-state diagonalization failed");
  }
  DenseState s;
  s.N = cp.N;
  s.amplitudes = VectorXc::Zero(parity.size());
  for (Eigen::Index m = 0; m < dim; ++m) s.amplitudes(even[static_cast<std::size_t>(m)]) = es.eigenvectors()(m, 0);
  // deterministic sign: largest-magnitude amplitude positive
  Eigen::Index arg = 0;
  s.amplitudes.cwiseAbs().maxCoeff(&arg);
  if (s.amplitudes(arg).real() < 0.0) s.amplitudes = -s.amplitudes;
  return s;
}

DenseState dense_evolve(const DenseState& state, const ChainParams& cp, const DriveParams& dp, Real t0, Real t1,
                        int steps, StepScheme scheme) {
  cp.validate();
  check_sites(cp.N);
  if (state.N != cp.N || state.amplitudes.size() != (Eigen::Index{1} << cp.N)) {
    throw IncompatibleInput("state does not match chain size");
  }
  if (steps < 1) throw InvalidParameter("dense_evolve needs at least one step");
  const SparseMatrixR bonds = bond_part(cp);
  const VectorXr z = magnetization(cp.N);
  const Real dt = (t1 - t0) / steps;
  const Real norm0 = state.amplitudes.norm();

  // H(t) = B + g(t) Z with g = -(h0 + h(t))/2, so [H(t1), H(t2)] = (g2 - g1)[B, Z]
  auto g = [&](Real t) { return -0.5 * (cp.h0 + dp.field(t)); };
  const Real node = std::sqrt(3.0) / 6.0;

  VectorXc psi = state.amplitudes;
  for (int m = 0; m < steps; ++m) {
    const Real t = t0 + (m + 0.5) * dt;
    // generator G, step is exp(-i G)
    std::function<VectorXc(const VectorXc&)> apply;
    if (scheme == StepScheme::midpoint) {
      const Real gm = g(t);
      apply = [&, gm](const VectorXc& v) -> VectorXc { return dt * (bonds * v + (gm * z).cwiseProduct(v)); };
    } else {
      const Real g1 = g(t - node * dt);
      const Real g2 = g(t + node * dt);
      const Complex cw = kI * (std::sqrt(3.0) / 12.0) * dt * dt * (g2 - g1);
      apply = [&, g1, g2, cw](const VectorXc& v) -> VectorXc {
        const VectorXc Bv = bonds * v;
        const VectorXc Zv = z.cwiseProduct(v);
        return dt * Bv + (0.5 * dt * (g1 + g2)) * Zv + cw * (bonds * Zv - z.cwiseProduct(Bv));
      };
    }
    // exp(-i G) psi = sum_n (-i G)^n psi / n!
    VectorXc term = psi;
    VectorXc acc = psi;
    for (int n = 1; n < 60; ++n) {
      term = apply(term) * Complex(0.0, -1.0 / n);
      acc += term;
      if (term.norm() < 1e-17 * acc.norm()) break;
    }
    psi = std::move(acc);
  }
  const Real drift = std::abs(psi.norm() - norm0);
  if (drift > kNormDrift) {
    throw IntegratorFailure("dense evolution norm drift " + std::to_string(drift));
  }
  return {state.N, psi};
}

DenseState translate(const DenseState& state, int shift) {
  const int N = state.N;
  const std::size_t dim = std::size_t{1} << N;
  shift = ((shift % N) + N) % N;
  DenseState out{N, VectorXc::Zero(state.amplitudes.size())};
  for (std::size_t b = 0; b < dim; ++b) {
    // new site i carries old site i + shift
    std::size_t nb = 0;
    for (int i = 0; i < N; ++i) {
      if (bit_of(b, (i + shift) % N, N)) nb |= std::size_t{1} << (N - 1 - i);
    }
    out.amplitudes(static_cast<Eigen::Index>(nb)) = state.amplitudes(static_cast<Eigen::Index>(b));
  }
  return out;
}

DenseBlockState partial_trace(const DenseState& state, int L) {
  if (L < 1 || L > state.N) throw InvalidParameter("block size must be in [1, N]");
  const Eigen::Index kept = Eigen::Index{1} << L;
  const Eigen::Index rest = Eigen::Index{1} << (state.N - L);
  // A(c, r) = psi[r * rest + c], r over the kept sites
  Eigen::Map<const MatrixXc> A(state.amplitudes.data(), rest, kept);
  DenseBlockState out;
  out.L = L;
  out.rho = A.transpose() * A.conjugate();
  return out;
}

CorrelationSet jw_correlations(const DenseState& state, int L, StateLabel label) {
  if (L < 1 || L > state.N) throw InvalidParameter("block size must be in [1, N]");
  std::vector<VectorXc> ann;
  std::vector<VectorXc> cre;
  for (int i = 0; i < L; ++i) {
    ann.push_back(apply_fermion(state.amplitudes, state.N, i, false));
    cre.push_back(apply_fermion(state.amplitudes, state.N, i, true));
  }
  CorrelationSet cs;
  cs.L = L;
  cs.label = label;
  cs.C.resize(L, L);
  cs.F.resize(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      cs.C(i, j) = ann[static_cast<std::size_t>(i)].dot(ann[static_cast<std::size_t>(j)]);
      cs.F(i, j) = ann[static_cast<std::size_t>(i)].dot(cre[static_cast<std::size_t>(j)]);
    }
  }
  return cs;
}

Real sigma_z_expectation(const DenseState& state, int site) {
  if (site < 0 || site >= state.N) throw InvalidParameter("site out of range");
  Real total = 0.0;
  for (Eigen::Index b = 0; b < state.amplitudes.size(); ++b) {
    const Real z = bit_of(static_cast<std::size_t>(b), site, state.N) ? -1.0 : 1.0;
    total += z * std::norm(state.amplitudes(b));
  }
  return total;
}

Real exact_block_qfi(const DenseBlockState& minus, const DenseBlockState& zero, const DenseBlockState& plus,
                     Real dh0) {
  if (!(dh0 > 0.0)) throw InvalidParameter("dh0 must be positive");
  if (minus.L != zero.L || plus.L != zero.L) throw IncompatibleInput("block sizes differ");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(zero.rho);
  const VectorXr& p = es.eigenvalues();
  const MatrixXc dr = es.eigenvectors().adjoint() * ((plus.rho - minus.rho) / (2.0 * dh0)) * es.eigenvectors();
  Real total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const Real s = p(i) + p(j);
      if (s > kSupportCut) total += 2.0 * std::norm(dr(i, j)) / s;
    }
  }
  return total;
}

Real exact_block_qfi(const DenseState& minus, const DenseState& zero, const DenseState& plus, int L, Real dh0) {
  return exact_block_qfi(partial_trace(minus, L), partial_trace(zero, L), partial_trace(plus, L), dh0);
}

Real overlap_qfi(const DenseState& minus, const DenseState& zero, const DenseState& plus, Real dh0) {
  if (!(dh0 > 0.0)) throw InvalidParameter("dh0 must be positive");
  auto aligned = [&](const VectorXc& v) {
    const Complex ov = zero.amplitudes.dot(v);
    return VectorXc(v * (std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : Complex(1.0)));
  };
  const VectorXc d = (aligned(plus.amplitudes) - aligned(minus.amplitudes)) / (2.0 * dh0);
  const Complex proj = zero.amplitudes.dot(d);
  return 4.0 * (d.squaredNorm() - std::norm(proj));
}

}  // namespace floqsense
