#include "wpcn/system.hpp"

#include "wpcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wpcn {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void SystemParams::validate(Eigen::Index users) const {
  if (!(p_sum > 0.0) || !std::isfinite(p_sum)) throw DomainError("P_sum must be positive");
  if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
    throw DomainError("noise power must be positive");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw DomainError("harvesting efficiency must lie in (0, 1]");
  }
  if (circuit_energy.size() != 0) {
    if (circuit_energy.size() != users) {
      throw DomainError("circuit energy vector length differs from the user count");
    }
    if ((circuit_energy.array() < 0.0).any() || !circuit_energy.allFinite()) {
      throw DomainError("circuit energy must be finite and non-negative");
    }
  }
}

EnergyCovariance::EnergyCovariance(ComplexMatrix s) {
  if (s.rows() != s.cols()) throw DomainError("energy covariance must be square");
  if (!s.allFinite()) throw DomainError("energy covariance has a non-finite entry");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("energy covariance is not Hermitian");
  }
  s_ = 0.5 * (s + s.adjoint());
  if (s_.rows() > 0 && min_eigenvalue() < -1e-10 * scale) {
    throw DomainError("energy covariance is not positive semidefinite");
  }
}

EnergyCovariance EnergyCovariance::single_beam(const ComplexVector& direction, double power) {
  const double n2 = direction.squaredNorm();
  if (!(n2 > 0.0)) throw DomainError("beam direction must be non-zero");
  return EnergyCovariance(power / n2 * direction * direction.adjoint());
}

double EnergyCovariance::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

int EnergyCovariance::rank() const {
  if (s_.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s_, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  const double top = ev[ev.size() - 1];
  if (!(top > 0.0)) return 0;
  return static_cast<int>((ev.array() > 1e-9 * top).count());
}

std::vector<ComplexVector> EnergyCovariance::beams() const {
  std::vector<ComplexVector> out;
  if (s_.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s_);
  const RealVector& ev = es.eigenvalues();
  const double top = ev[ev.size() - 1];
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
    if (!(ev[i] > 1e-9 * top)) break;
    out.emplace_back(std::sqrt(ev[i]) * es.eigenvectors().col(i));
  }
  return out;
}

RealVector harvested_power_budget(const EnergyCovariance& s, const ChannelSet& ch,
                                  const SystemParams& prm, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (s.matrix().rows() != ch.antennas()) {
    throw DomainError("energy covariance size differs from the antenna count");
  }
  const Eigen::Index users = ch.users();
  RealVector budget(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const double harvested = prm.efficiency * tau * s.energy_gain(ch.downlink.col(k));
    budget[k] = std::max(0.0, (harvested - prm.circuit(k)) / (1.0 - tau));
  }
  return budget;
}

RealVector uplink_sinr(const PowerAllocation& p, const ReceiverBank& w, const ChannelSet& ch,
                       const SystemParams& prm) {
  const Eigen::Index users = ch.users();
  if (p.watts.size() != users || w.weights.cols() != users ||
      w.weights.rows() != ch.antennas()) {
    throw DomainError("dimension mismatch between powers, receivers and channels");
  }
  // gains(k, j) = |w_k^H h_j|^2
  const RealMatrix gains = (w.weights.adjoint() * ch.uplink).cwiseAbs2();
  RealVector sinr(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const double wn = w.weights.col(k).squaredNorm();
    if (!(wn > 0.0)) throw DomainError("receiver column " + std::to_string(k) + " is zero");
    double interference = prm.noise_power * wn;
    for (Eigen::Index j = 0; j < users; ++j) {
      if (j != k) interference += p.watts[j] * gains(k, j);
    }
    sinr[k] = p.watts[k] * gains(k, k) / interference;
  }
  return sinr;
}

RealVector achievable_rate(const RealVector& sinr, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if ((sinr.array() < 0.0).any()) throw DomainError("SINR must be non-negative");
  return ((1.0 - tau) / std::log(2.0) * sinr.array().log1p()).matrix();
}

ValidationReport validate_solution(const JointSolution& sol, const ChannelSet& ch,
                                   const SystemParams& prm) {
  ValidationReport report;
  auto flag = [&](std::string name, double magnitude) {
    report.violations.push_back({std::move(name), magnitude});
  };
  const Eigen::Index users = ch.users();

  if (!(sol.tau > 0.0 && sol.tau < 1.0)) {
    flag("time", sol.tau <= 0.0 ? -sol.tau : sol.tau - 1.0);
  }
  const ComplexMatrix& s = sol.covariance.matrix();
  if (s.rows() != ch.antennas()) {
    flag("covariance-shape", static_cast<double>(s.rows()));
    return report;
  }
  const double trace = sol.covariance.trace();
  if (trace > prm.p_sum + 1e-9) flag("sum-power", trace - prm.p_sum);
  const double min_eig = sol.covariance.min_eigenvalue();
  if (min_eig < -1e-10 * std::max(1.0, trace)) flag("psd", -min_eig);

  if (sol.powers.watts.size() != users) {
    flag("power-shape", static_cast<double>(sol.powers.watts.size()));
    return report;
  }
  if ((sol.powers.watts.array() < 0.0).any()) flag("power-sign", -sol.powers.watts.minCoeff());
  if (!report.ok()) return report;

  double min_rate = std::numeric_limits<double>::infinity();
  if (sol.scheme == AccessScheme::kSdma) {
    const RealVector budget = harvested_power_budget(sol.covariance, ch, prm, sol.tau);
    for (Eigen::Index k = 0; k < users; ++k) {
      const double excess = sol.powers.watts[k] - budget[k];
      if (excess > 1e-9 * budget[k] + 1e-18) {
        flag("power[" + std::to_string(k + 1) + "]", excess);
      }
    }
    const RealVector rates =
        achievable_rate(uplink_sinr(sol.powers, sol.receivers, ch, prm), sol.tau);
    min_rate = rates.minCoeff();
  } else {
    // Each user owns an uplink slot and spends its harvested energy there.
    if (sol.tdma_slots.size() != users) {
      flag("tdma-slots", static_cast<double>(sol.tdma_slots.size()));
      return report;
    }
    const double used = sol.tau + sol.tdma_slots.sum();
    if (used > 1.0 + 1e-9) flag("time", used - 1.0);
    for (Eigen::Index k = 0; k < users; ++k) {
      const double slot = sol.tdma_slots[k];
      const double energy = std::max(
          0.0, prm.efficiency * sol.tau * sol.covariance.energy_gain(ch.downlink.col(k)) -
                   prm.circuit(k));
      const double excess = sol.powers.watts[k] * slot - energy;
      if (excess > 1e-9 * energy + 1e-18) flag("energy[" + std::to_string(k + 1) + "]", excess);
      const double gain = ch.uplink.col(k).squaredNorm();
      const double rate = slot * std::log2(1.0 + gain * sol.powers.watts[k] / prm.noise_power);
      min_rate = std::min(min_rate, rate);
    }
  }
  if (std::abs(min_rate - sol.rate) > 1e-9 * std::max(1.0, std::abs(min_rate))) {
    flag("rate", std::abs(min_rate - sol.rate));
  }
  return report;
}

}  // namespace wpcn
