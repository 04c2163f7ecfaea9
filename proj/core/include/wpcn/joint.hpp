#pragma once

// Joint DL energy beamforming and UL receive beamforming/power control:
// alternating minimization of max_k rho(A_k(W, S)) for a fixed time split,
// the outer search over tau, and the end-to-end optimal pipeline.

#include "wpcn/downlink.hpp"
#include "wpcn/system.hpp"
#include "wpcn/uplink.hpp"

#include <vector>

namespace wpcn {

/// Energy weights of the initial sum-energy beam.
enum class BeamInit {
  kChannelWeighted,  // alpha_k = 1 / (||h_k||^2 ||g_k||^2)
  kUniform,          // alpha_k = 1
};

struct AlternatingOptions {
  double eps = 1e-6;  // stop once rho drops by less than eps * rho
  int max_iter = 50;
  BeamInit init = BeamInit::kChannelWeighted;
  UplinkOptions uplink;
  DownlinkOptions downlink;
};

struct AlternatingResult {
  UplinkSolution uplink;
  DownlinkSolution downlink;
  EnergyCovariance covariance;  // S matching `uplink`
  std::vector<double> rho_trace;  // rho after the initial UL step and after every DL/UL round
  int iterations = 0;
};

RealVector initial_beam_weights(BeamInit init, const ChannelSet& ch);

/// Alternates solve_dl_fixed_w and solve_ul_fixed_v at a fixed tau.
/// Throws NotConvergedError<AlternatingResult> at the iteration cap.
AlternatingResult alternating_optimize(double tau, const ChannelSet& ch, const SystemParams& prm,
                                       const AlternatingOptions& opts = {});

/// alternating_optimize packaged as a validated JointSolution.
JointSolution solve_fixed_tau(double tau, const ChannelSet& ch, const SystemParams& prm,
                              const AlternatingOptions& opts = {});

struct SweepOptions {
  double grid_step = 0.01;
  bool refine = true;
  int golden_iter = 40;
  int workers = 1;
  AlternatingOptions inner;
};

/// R(tau) on {step, 2 step, ...} < 1, then golden-section refinement around
/// the best grid point. Failed points are kept in tau_profile with ok=false.
/// Throws Error if every point fails.
JointSolution tau_sweep_optimize(const ChannelSet& ch, const SystemParams& prm,
                                 const SweepOptions& opts = {});

/// tau_sweep_optimize; a single antenna falls back to the TDMA reference.
JointSolution solve_optimal(const ChannelSet& ch, const SystemParams& prm,
                            const SweepOptions& opts = {});

/// Closed form for K = 1: S = P_sum g g^H / ||g||^2, matched filter, tau by
/// golden section. Throws DomainError unless K = 1.
JointSolution single_user_optimum(const ChannelSet& ch, const SystemParams& prm);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn);

}  // namespace wpcn

#include "wpcn/detail/parallel.hpp"
