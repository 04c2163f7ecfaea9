#pragma once

// Physical-layer quantities of the harvest-then-transmit protocol: energy
// covariance, harvested power budgets, uplink SINR and rate, plus the
// end-to-end solution record and its constraint checker.

#include "wpcn/channel.hpp"
#include "wpcn/perron.hpp"

#include <string>
#include <vector>

namespace wpcn {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct SystemParams {
  double p_sum = 1.0;        // AP transmit sum-power budget [W]
  double noise_power = 1e-8; // sigma^2 [W]
  double efficiency = 0.5;   // harvesting efficiency epsilon in (0, 1]
  RealVector circuit_energy; // E_k^c [J], empty means all zero

  /// Throws DomainError on out-of-range values or a circuit-energy vector
  /// whose length differs from `users` (when non-empty).
  void validate(Eigen::Index users) const;
  double circuit(Eigen::Index k) const {
    return circuit_energy.size() == 0 ? 0.0 : circuit_energy[k];
  }
};

/// Downlink transmit covariance S = sum_i v_i v_i^H.
class EnergyCovariance {
 public:
  EnergyCovariance() = default;
  /// Hermitian-symmetrizes; throws DomainError if the input is not Hermitian
  /// within 1e-10 or has an eigenvalue below -1e-10 (both relative to trace).
  explicit EnergyCovariance(ComplexMatrix s);

  /// p_sum * u u^H for a (not necessarily unit) direction u.
  static EnergyCovariance single_beam(const ComplexVector& direction, double power);

  const ComplexMatrix& matrix() const noexcept { return s_; }
  double trace() const { return s_.trace().real(); }
  double min_eigenvalue() const;
  /// Number of eigenvalues above 1e-9 of the largest.
  int rank() const;
  /// Energy beams v_i = sqrt(lambda_i) u_i for the non-negligible eigenpairs.
  std::vector<ComplexVector> beams() const;
  /// g^H S g
  double energy_gain(const ComplexVector& g) const { return g.dot(s_ * g).real(); }

 private:
  ComplexMatrix s_;
};

/// Receive beamformers w_k, one column per user.
struct ReceiverBank {
  ComplexMatrix weights;  // M x K
};

/// Uplink transmit powers [W].
struct PowerAllocation {
  RealVector watts;
};

/// Average uplink transmit power available to each user,
/// (eps tau g_k^H S g_k - E_k^c) / (1 - tau), clamped at 0.
RealVector harvested_power_budget(const EnergyCovariance& s, const ChannelSet& ch,
                                  const SystemParams& prm, double tau);

/// gamma_k = p_k |w_k^H h_k|^2 / (sum_{j!=k} p_j |w_k^H h_j|^2 + sigma^2 ||w_k||^2).
RealVector uplink_sinr(const PowerAllocation& p, const ReceiverBank& w, const ChannelSet& ch,
                       const SystemParams& prm);

/// R_k = (1 - tau) log2(1 + gamma_k) [bps/Hz].
RealVector achievable_rate(const RealVector& sinr, double tau);

enum class AccessScheme { kSdma, kTdmaReference };

struct TauPoint {
  double tau = 0.0;
  double rate = 0.0;
  bool ok = true;
  std::string error;  // solver error when !ok
};

/// End-to-end answer for one channel realization.
struct JointSolution {
  AccessScheme scheme = AccessScheme::kSdma;
  double tau = 0.0;
  EnergyCovariance covariance;
  ReceiverBank receivers;
  PowerAllocation powers;
  RealVector budgets;  // harvested power budgets at (S, tau)
  double gamma = 0.0;  // balanced SINR
  int k_star = -1;     // user whose budget binds, -1 if none reported
  double rate = 0.0;   // max-min throughput [bps/Hz]
  int iterations = 0;
  std::vector<double> rho_trace;
  std::vector<TauPoint> tau_profile;
  RealVector tdma_slots;  // uplink slot lengths, TDMA reference only
};

struct Violation {
  std::string constraint;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks 0 < tau < 1, trace(S) <= P_sum, S PSD, p_k <= budget_k, and that
/// the reported rate equals the minimum achievable rate.
ValidationReport validate_solution(const JointSolution& sol, const ChannelSet& ch,
                                   const SystemParams& prm);

}  // namespace wpcn
