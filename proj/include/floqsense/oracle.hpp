#pragma once

// Exact diagonalization of small rings in the full 2^N spin basis. Used as the
// reference for every sign and normalization in the momentum-space pipeline.
//
// Basis: site 1 is the most significant bit, bit 0 = spin up (sigma^z = +1).
// Jordan-Wigner fermions count down spins: c+_i = (prod_{l<i} Z_l) sigma^-_i.
// The spin Hamiltonian is scaled by 1/2 so that its k-space form is exactly
// the mode Hamiltonian of lattice.hpp.

#include <Eigen/SparseCore>

#include "floqsense/correlations.hpp"

namespace floqsense {

constexpr int kMaxDenseSites = 12;

using SparseMatrixR = Eigen::SparseMatrix<Real>;

struct DenseState {
  int N = 0;
  VectorXc amplitudes;
};

struct DenseBlockState {
  int L = 0;
  MatrixXc rho;
};

/// H(t)/2 of the periodic ring, a real symmetric matrix.
SparseMatrixR dense_hamiltonian(const ChainParams& cp, Real t, const DriveParams& dp);

/// prod_i sigma^z_i as a diagonal of +-1.
VectorXr parity_diagonal(int N);

/// Lowest state in the even fermion-parity sector (prod sigma^z = +1), which
/// is the sector whose momenta are (2m-1) pi / N.
DenseState dense_ground_state(const ChainParams& cp);

/// Fixed-step evolution from t0 to t1 with the same step schemes as the
/// mode propagators; each step exponential is applied to the vector by a
/// Taylor series run to machine precision.
DenseState dense_evolve(const DenseState& state, const ChainParams& cp, const DriveParams& dp, Real t0, Real t1,
                        int steps, StepScheme scheme = StepScheme::magnus4);

/// Cyclic relabeling of sites: site i of the result is site i + shift of the input.
DenseState translate(const DenseState& state, int shift);

/// Reduced state of sites 1..L.
DenseBlockState partial_trace(const DenseState& state, int L);

/// C_ij = <c+_i c_j>, F_ij = <c+_i c+_j> for sites 1..L.
CorrelationSet jw_correlations(const DenseState& state, int L, StateLabel label = StateLabel::ground());

/// <sigma^z_i>, i zero based.
Real sigma_z_expectation(const DenseState& state, int site);

/// SLD QFI F = sum_{p_i + p_j > 1e-12} 2 |<i|d rho|j>|^2 / (p_i + p_j).
Real exact_block_qfi(const DenseBlockState& minus, const DenseBlockState& zero, const DenseBlockState& plus,
                     Real dh0);
Real exact_block_qfi(const DenseState& minus, const DenseState& zero, const DenseState& plus, int L, Real dh0);

/// 4 chi_F = 4 (<d psi|d psi> - |<psi|d psi>|^2) with a gauge-aligned central difference.
Real overlap_qfi(const DenseState& minus, const DenseState& zero, const DenseState& plus, Real dh0);

}  // namespace floqsense
