#pragma once

// Zero-forcing receivers and the low-complexity designs built on them:
// max-min energy beamforming (suboptimal 1), a single weighted sum-energy
// beam (suboptimal 2) and a random-beam baseline. ZF users transmit with
// their whole harvested budget.

#include "wpcn/downlink.hpp"
#include "wpcn/system.hpp"

#include <cstdint>

namespace wpcn {

struct ZfBank {
  ReceiverBank receivers;
  RealVector equivalent_gains;  // ||Y_k^H h_k||^2
};

/// w_k = Y_k Y_k^H h_k / ||Y_k^H h_k|| with Y_k an orthonormal basis of the
/// null space of the other users' channels. Throws CapabilityError when
/// K > M and RankError when the other channels are rank deficient.
ZfBank zf_receivers(const ChannelSet& ch);

struct ZfOptions {
  double tau_lo = 1e-3;
  double tau_hi = 0.999;
  int golden_iter = 80;
  int bisection_iter = 100;  // SNR target search when circuit energy is present
  EnergyOptions energy;
};

/// Suboptimal 1 at a fixed tau: S maximizes the minimum ZF SNR.
JointSolution suboptimal1_at_tau(double tau, const ChannelSet& ch, const SystemParams& prm,
                                 const ZfOptions& opts = {});
JointSolution suboptimal1(const ChannelSet& ch, const SystemParams& prm,
                          const ZfOptions& opts = {});

/// Suboptimal 2: S = P_sum eta eta^H with alpha_k = 1/(h~_k ||g_k||^2).
JointSolution suboptimal2(const ChannelSet& ch, const SystemParams& prm,
                          const ZfOptions& opts = {});

/// Isotropic random unit beam scaled to P_sum, then the suboptimal 2 tau search.
JointSolution random_beam_baseline(const ChannelSet& ch, const SystemParams& prm,
                                   std::uint64_t seed, const ZfOptions& opts = {});

/// ZF rate pipeline for a given covariance: full-power powers, optimal tau.
JointSolution zf_fixed_beam(const EnergyCovariance& s, const ChannelSet& ch,
                            const SystemParams& prm, const ZfOptions& opts = {});
JointSolution zf_fixed_beam_at_tau(double tau, const EnergyCovariance& s, const ChannelSet& ch,
                                   const SystemParams& prm);

/// Beams used by suboptimal2 and random_beam_baseline.
EnergyCovariance suboptimal2_beam(const ChannelSet& ch, const SystemParams& prm);
EnergyCovariance random_beam(const ChannelSet& ch, const SystemParams& prm, std::uint64_t seed);

}  // namespace wpcn
