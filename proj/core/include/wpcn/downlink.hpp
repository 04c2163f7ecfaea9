#pragma once

// Downlink energy beamforming: the closed-form weighted sum-energy beam, the
// weighted max-min energy covariance (a small SDP solved through its dual,
// an eigenvalue minimization over the simplex), and the fixed-receiver
// downlink step that minimizes max_k rho(A_k(W, S)) over S.

#include "wpcn/system.hpp"
#include "wpcn/uplink.hpp"

#include <optional>

namespace wpcn {

struct DownlinkSolution {
  EnergyCovariance covariance;
  double value = 0.0;       // objective at `covariance`
  double dual_value = 0.0;  // certified bound on the optimum
  RealVector dual_weights;  // simplex vector
  double gap = 0.0;         // |dual_value - value| / |dual_value|
  int iterations = 0;
};

/// S = P_sum eta eta^H with eta the top eigenvector of sum_k alpha_k eps G_k;
/// value = psi P_sum. Throws DomainError for negative or all-zero weights.
DownlinkSolution weighted_sum_energy_beam(const RealVector& weights, const ChannelSet& ch,
                                          const SystemParams& prm);

struct EnergyOptions {
  double tol = 1e-9;  // relative primal-dual gap
  int max_newton = 400;
};

/// max t  s.t.  g_k^H S g_k >= c_k t, Tr(S) <= budget, S PSD.
/// Solved by a log-barrier Newton path on the dual
///   min_{lambda in simplex} budget * lambda_max(sum_k lambda_k G_k / c_k);
/// the central path also yields a feasible primal S. Both bounds are
/// evaluated directly, so `gap` is exact. Throws IterationLimitError when
/// the gap stalls above tol.
DownlinkSolution maxmin_energy_covariance(const RealVector& costs, double budget,
                                          const ChannelSet& ch, const EnergyOptions& opts = {});

struct DownlinkOptions {
  double tol = 1e-9;  // relative bracket width on theta
  int max_steps = 200;
  EnergyOptions energy;
  PerronOptions perron;
  // Covariance known to be feasible; the result never does worse than it.
  std::optional<EnergyCovariance> incumbent;
};

/// Minimizes max_k rho(A_k(W, S)) over Tr(S) <= P_sum by bracketing the
/// target theta: each probe builds p(theta) = (theta I - D Psi)^{-1} D sigma
/// and tests whether some S delivers those budgets (max-min energy t >= 1).
/// `value` is the achieved max_k rho(A_k(W, S)).
DownlinkSolution solve_dl_fixed_w(const ReceiverBank& w, double tau, const ChannelSet& ch,
                                  const SystemParams& prm, const DownlinkOptions& opts = {});

}  // namespace wpcn
