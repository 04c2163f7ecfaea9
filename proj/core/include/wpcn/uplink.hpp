#pragma once

// Uplink SINR balancing under per-user power budgets. For fixed receivers
// the balanced SINR is the reciprocal of max_k rho(A_k), where A_k is the
// (K+1)x(K+1) extended matrix whose last row encodes user k's budget, and
// the optimal powers are read off the Perron vector of the maximizing A_k.

#include "wpcn/perron.hpp"
#include "wpcn/system.hpp"

#include <optional>
#include <vector>

namespace wpcn {

/// kPowerDomain: noise entries sigma^2 ||w_k||^2 against power budgets
/// P_k = (eps tau g^H S g - E^c)/(1-tau).
/// kEnergyDomain: noise entries (1-tau) sigma^2 ||w_k||^2 against energy
/// budgets eps tau g^H S g - E^c; the Perron vector then holds uplink
/// energies (1-tau) p_k. Both give the same SINRs.
enum class NoiseConvention { kPowerDomain, kEnergyDomain };

/// Normalized interference matrix D Psi and noise vector D sigma for fixed
/// receivers: cross(k, j) = |w_k^H h_j|^2 / |w_k^H h_k|^2 (zero diagonal),
/// noise[k] = noise_factor sigma^2 ||w_k||^2 / |w_k^H h_k|^2.
struct InterferenceTerms {
  RealMatrix cross;
  RealVector noise;
};

/// Throws DegenerateError if some |w_k^H h_k| vanishes.
InterferenceTerms interference_terms(const ReceiverBank& w, const ChannelSet& ch,
                                     const SystemParams& prm, double noise_factor = 1.0);

struct BalanceMatrix {
  NonNegMatrix matrix;
  int user;
};

/// A_k = [[D Psi, D sigma], [e_k^T D Psi / b_k, e_k^T D sigma / b_k]].
BalanceMatrix build_balance_matrix(int user, const InterferenceTerms& terms,
                                   const RealVector& budgets);
BalanceMatrix build_balance_matrix(int user, const ReceiverBank& w, const RealVector& budgets,
                                   const ChannelSet& ch, const SystemParams& prm,
                                   double noise_factor = 1.0);

struct UplinkSolution {
  ReceiverBank receivers;
  PowerAllocation powers;  // [W]
  RealVector budgets;      // power budgets [W]
  double gamma = 0.0;
  double rho = 0.0;  // 1 / gamma
  int k_star = -1;
  std::vector<double> trace;  // rho per receiver update
  int iterations = 0;
};

struct UplinkOptions {
  NoiseConvention convention = NoiseConvention::kPowerDomain;
  double tol = 1e-9;  // relative change of rho between receiver updates
  int max_iter = 500;
  PerronOptions perron;
  // Receivers to start from; MMSE at the full budgets when empty.
  std::optional<ReceiverBank> initial_receivers;
};

/// Optimal balanced SINR and powers for fixed receivers and budgets [W].
/// Throws DegenerateError when some budget is not positive.
UplinkSolution balance_value_and_powers(const ReceiverBank& w, const RealVector& budgets,
                                        double tau, const ChannelSet& ch,
                                        const SystemParams& prm, const UplinkOptions& opts = {});
UplinkSolution balance_value_and_powers(const ReceiverBank& w, const EnergyCovariance& s,
                                        double tau, const ChannelSet& ch,
                                        const SystemParams& prm, const UplinkOptions& opts = {});

/// Unit-norm w_k proportional to (sum_{j!=k} p_j h_j h_j^H + sigma^2 I)^{-1} h_k.
ReceiverBank mmse_receivers(const PowerAllocation& p, const ChannelSet& ch,
                            const SystemParams& prm);

/// Minimal powers reaching the common SINR 1/theta with fixed receivers:
/// p = (theta I - D Psi)^{-1} D sigma. Throws InfeasibleError unless
/// theta > rho(D Psi).
PowerAllocation power_fixed_point(double theta, const ReceiverBank& w, const ChannelSet& ch,
                                  const SystemParams& prm, double noise_factor = 1.0);
PowerAllocation power_fixed_point(double theta, const InterferenceTerms& terms);

/// Alternates Perron power updates and MMSE receiver updates until rho
/// settles. Throws NotConvergedError<UplinkSolution> at the iteration cap.
UplinkSolution solve_ul_for_budgets(const RealVector& budgets, double tau, const ChannelSet& ch,
                                    const SystemParams& prm, const UplinkOptions& opts = {});
UplinkSolution solve_ul_fixed_v(const EnergyCovariance& s, double tau, const ChannelSet& ch,
                                const SystemParams& prm, const UplinkOptions& opts = {});

/// max_k rho(A_k(W, S)) in the power domain.
double max_balance_radius(const ReceiverBank& w, const RealVector& budgets, const ChannelSet& ch,
                          const SystemParams& prm, const PerronOptions& perron = {});

}  // namespace wpcn
