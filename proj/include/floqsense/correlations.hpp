#pragma once

// Block correlators C_ij = <c+_i c_j>, F_ij = <c+_i c+_j> and the Majorana
// covariance matrix built from them.

#include <span>
#include <string>
#include <vector>

#include "floqsense/floquet.hpp"

namespace floqsense {

enum class StateKind { ground, strobo, steady };

struct StateLabel {
  StateKind kind = StateKind::ground;
  long n = 0;

  static StateLabel ground() { return {StateKind::ground, 0}; }
  static StateLabel strobo(long n) { return {StateKind::strobo, n}; }
  static StateLabel steady() { return {StateKind::steady, 0}; }

  std::string str() const;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

struct ModeExpectation {
  Real occupation = 0.0;   // <c+_k c_k>
  Complex pairing{0.0, 0.0};  // <c+_k c+_-k>
};

ModeExpectation mode_expectations(const ModeState& ms);

/// Long-time stroboscopic average of the mode expectations. Off-diagonal
/// Floquet terms are dropped; for a degenerate multiplier pair the state is
/// stationary and its own expectations are returned.
ModeExpectation steady_mode_expectations(const FloquetData& fd, const ModeState& initial);

struct CorrelationSet {
  int L = 0;
  MatrixXc C;
  MatrixXc F;
  StateLabel label;
};

/// Fourier sums (2/N) sum_k cos(k(i-j)) n_k and (2i/N) sum_k sin(k(i-j)) P_k,
/// accumulated in the order of `ks`.
CorrelationSet correlations_from_modes(int N, int L, std::span<const Real> ks,
                                       std::span<const ModeExpectation> modes, StateLabel label);

CorrelationSet correlation_set_at(long n, int L, const ChainParams& cp, std::span<const FloquetData> floquet,
                                  std::span<const ModeState> initial);

CorrelationSet steady_state_correlations(int L, const ChainParams& cp, std::span<const FloquetData> floquet,
                                         std::span<const ModeState> initial);

/// Real antisymmetric K with <a_n a_m> = delta_nm + i K_nm, Majorana operators
/// a_{2i-1} = c_i + c+_i and a_{2i} = -i(c_i - c+_i). Holds the spectral
/// decomposition of the Hermitian matrix iK.
class MajoranaMatrix {
 public:
  MajoranaMatrix(MatrixXr K, StateLabel label);

  int block_size() const { return static_cast<int>(K_.rows() / 2); }
  const MatrixXr& K() const { return K_; }
  const StateLabel& label() const { return label_; }
  /// Eigenvalues of iK, ascending.
  const VectorXr& eigenvalues() const { return eigenvalues_; }
  const MatrixXc& eigenvectors() const { return eigenvectors_; }

 private:
  MatrixXr K_;
  StateLabel label_;
  VectorXr eigenvalues_;
  MatrixXc eigenvectors_;
};

MajoranaMatrix majorana_from_correlations(const CorrelationSet& cs);

/// Linear part of the K assembly: K built from (C, F) with the delta terms removed.
/// Useful for derivatives, d K = majorana_increment(dC, dF).
MatrixXr majorana_increment(const MatrixXc& dC, const MatrixXc& dF);

}  // namespace floqsense
