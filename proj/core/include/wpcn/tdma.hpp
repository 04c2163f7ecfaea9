#pragma once

// Time-division reference for single-antenna operation: one DL energy slot
// of length tau0 followed by K orthogonal UL slots. Slot lengths equalize
// the users' rates; tau0 is chosen by golden section. Simplified baseline,
// not an optimal TDMA design.

#include "wpcn/system.hpp"

namespace wpcn {

struct TdmaOptions {
  int golden_iter = 60;
  int bisection_iter = 100;
};

/// Minimal slot t in (0, available] with t log2(1 + a / t) >= rate, where
/// a = ||h||^2 E / sigma^2. Returns +inf when even `available` falls short.
double tdma_slot_for_rate(double rate, double snr_energy, double available,
                          int bisection_iter = 100);

/// Equal-rate TDMA allocation. The DL covariance is the channel-weighted
/// sum-energy beam (P_sum itself when M = 1).
JointSolution tdma_reference(const ChannelSet& ch, const SystemParams& prm,
                             const TdmaOptions& opts = {});

/// Same, at a fixed DL slot tau0.
JointSolution tdma_at_tau(double tau0, const ChannelSet& ch, const SystemParams& prm,
                          const TdmaOptions& opts = {});

}  // namespace wpcn
