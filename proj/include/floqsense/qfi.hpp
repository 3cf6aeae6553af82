#pragma once

// Quantum Fisher information with respect to h0.

#include <optional>
#include <vector>

#include "floqsense/correlations.hpp"

namespace floqsense {

constexpr Real kDefaultEpsilonCut = 1e-10;
constexpr Real kGroundDh0 = 1e-2;
constexpr Real kSteadyDh0 = 1e-4;

struct QfiResult {
  Real value = 0.0;
  Real dh0 = 0.0;
  Real epsilon_cut = kDefaultEpsilonCut;
  long dropped_terms = 0;
};

/// Gaussian-state QFI from Majorana matrices at h0 - dh0, h0, h0 + dh0:
///   F = 1/2 sum_{r,s} |<r| i dK |s>|^2 / (1 - l_r l_s)
/// over eigenpairs (l, |r>) of iK_0. Pairs with |1 - l_r l_s| < epsilon_cut are skipped.
QfiResult qfi_from_majorana(const MajoranaMatrix& K_minus, const MajoranaMatrix& K_0, const MajoranaMatrix& K_plus,
                            Real dh0, Real epsilon_cut = kDefaultEpsilonCut);

/// Pure-state QFI of the whole chain in the ground state, sum_k (d theta_k / d h0)^2.
Real global_pure_qfi(const ChainParams& cp);

/// Everything needed to evaluate block QFIs at one (cp, dp): ground states and
/// Floquet data at h0 - dh0, h0 and h0 + dh0. Cheap to query for many L, n.
class BlockQfiProbe {
 public:
  /// Without a drive only the ground label can be evaluated.
  BlockQfiProbe(const ChainParams& cp, std::optional<DriveParams> dp, Real dh0,
                const IntegratorConfig& integrator = {});

  QfiResult evaluate(int L, StateLabel label, Real epsilon_cut = kDefaultEpsilonCut) const;

  /// The three Majorana matrices behind evaluate().
  std::vector<MajoranaMatrix> majoranas(int L, StateLabel label) const;

  const ChainParams& chain() const { return cp_; }
  Real dh0() const { return dh0_; }

 private:
  struct Point {
    ChainParams cp;
    std::vector<ModeState> initial;
    std::vector<FloquetData> floquet;
  };

  CorrelationSet correlations(const Point& p, int L, StateLabel label) const;

  ChainParams cp_;
  std::optional<DriveParams> dp_;
  Real dh0_;
  std::vector<Point> points_;  // h0 - dh0, h0, h0 + dh0
};

QfiResult block_qfi(const ChainParams& cp, const DriveParams& dp, int L, StateLabel label, Real dh0,
                    Real epsilon_cut = kDefaultEpsilonCut, const IntegratorConfig& integrator = {});

}  // namespace floqsense
