#include "wpcn/zero_forcing.hpp"

#include "wpcn/channel.hpp"
#include "wpcn/detail/golden.hpp"
#include "wpcn/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wpcn {
namespace {

JointSolution package(double tau, const EnergyCovariance& s, const ZfBank& zf,
                      const ChannelSet& ch, const SystemParams& prm) {
  JointSolution sol;
  sol.tau = tau;
  sol.covariance = s;
  sol.receivers = zf.receivers;
  sol.budgets = harvested_power_budget(s, ch, prm, tau);
  sol.powers.watts = sol.budgets;
  const RealVector sinr = uplink_sinr(sol.powers, sol.receivers, ch, prm);
  Eigen::Index k_star = 0;
  sol.gamma = sinr.minCoeff(&k_star);
  sol.k_star = static_cast<int>(k_star);
  sol.rate = achievable_rate(sinr, tau).minCoeff();
  return sol;
}

// min_k (1 - tau) log2(1 + h~_k (eps tau g^H S g - E^c) / ((1 - tau) sigma^2))
double fixed_beam_rate(double tau, const RealVector& energy_gain, const ZfBank& zf,
                       const SystemParams& prm) {
  double snr = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < energy_gain.size(); ++k) {
    const double budget = std::max(0.0, prm.efficiency * tau * energy_gain[k] - prm.circuit(k));
    snr = std::min(snr, zf.equivalent_gains[k] * budget / ((1.0 - tau) * prm.noise_power));
  }
  return (1.0 - tau) * std::log2(1.0 + snr);
}

}  // namespace

ZfBank zf_receivers(const ChannelSet& ch) {
  ch.validate();
  const Eigen::Index m = ch.antennas();
  const Eigen::Index users = ch.users();
  if (users > m) {
    throw CapabilityError("zero forcing needs K <= M (K = " + std::to_string(users) +
                          ", M = " + std::to_string(m) + ")");
  }
  ZfBank bank{ReceiverBank{ComplexMatrix(m, users)}, RealVector(users)};
  for (Eigen::Index k = 0; k < users; ++k) {
    ComplexMatrix others(users - 1, m);
    for (Eigen::Index j = 0, r = 0; j < users; ++j) {
      if (j != k) others.row(r++) = ch.uplink.col(j).adjoint();
    }
    const ComplexMatrix y = nullspace_basis(others);
    const ComplexVector proj = y.adjoint() * ch.uplink.col(k);
    const double n = proj.norm();
    if (!(n > 1e-12 * ch.uplink.col(k).norm())) {
      throw RankError("user " + std::to_string(k + 1) + " lies in the span of the others",
                      static_cast<int>(users - 1));
    }
    bank.receivers.weights.col(k) = y * proj / n;
    bank.equivalent_gains[k] = n * n;
  }
  return bank;
}

JointSolution suboptimal1_at_tau(double tau, const ChannelSet& ch, const SystemParams& prm,
                                 const ZfOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  prm.validate(ch.users());
  const ZfBank zf = zf_receivers(ch);
  const Eigen::Index users = ch.users();

  // Users need g^H S g >= ((1 - tau) sigma^2 s / h~_k + E^c_k) / (eps tau) for SNR s.
  auto costs_for = [&](double snr) {
    RealVector c(users);
    for (Eigen::Index k = 0; k < users; ++k) {
      c[k] = ((1.0 - tau) * prm.noise_power * snr / zf.equivalent_gains[k] + prm.circuit(k)) /
             (prm.efficiency * tau);
    }
    return c;
  };

  if ((prm.circuit_energy.size() == 0) || prm.circuit_energy.isZero(0.0)) {
    const DownlinkSolution dl = maxmin_energy_covariance(costs_for(1.0), prm.p_sum, ch, opts.energy);
    return package(tau, dl.covariance, zf, ch, prm);
  }

  // With circuit energy the costs are affine in s; bisect on the SNR target.
  double lo = 0.0;
  double hi = 1.0;
  auto feasible = [&](double snr) {
    return maxmin_energy_covariance(costs_for(snr), prm.p_sum, ch, opts.energy);
  };
  DownlinkSolution best;
  bool have = false;
  for (int i = 0; i < 200; ++i, hi *= 2.0) {
    DownlinkSolution dl = feasible(hi);
    if (dl.value < 1.0) break;
    lo = hi;
    best = std::move(dl);
    have = true;
  }
  for (int i = 0; i < opts.bisection_iter && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    DownlinkSolution dl = feasible(mid);
    if (dl.value >= 1.0) {
      lo = mid;
      best = std::move(dl);
      have = true;
    } else {
      hi = mid;
    }
  }
  if (!have) {
    // Circuit energy cannot be covered at this tau; report the max-min energy beam.
    best = maxmin_energy_covariance(costs_for(0.0).cwiseMax(1e-300), prm.p_sum, ch, opts.energy);
  }
  return package(tau, best.covariance, zf, ch, prm);
}

JointSolution suboptimal1(const ChannelSet& ch, const SystemParams& prm, const ZfOptions& opts) {
  auto rate = [&](double tau) { return suboptimal1_at_tau(tau, ch, prm, opts).rate; };
  const double tau = detail::golden_maximize(rate, opts.tau_lo, opts.tau_hi, opts.golden_iter, 1e-12);
  return suboptimal1_at_tau(tau, ch, prm, opts);
}

JointSolution zf_fixed_beam(const EnergyCovariance& s, const ChannelSet& ch,
                            const SystemParams& prm, const ZfOptions& opts) {
  prm.validate(ch.users());
  const ZfBank zf = zf_receivers(ch);
  RealVector gain(ch.users());
  for (Eigen::Index k = 0; k < ch.users(); ++k) gain[k] = s.energy_gain(ch.downlink.col(k));
  auto rate = [&](double tau) { return fixed_beam_rate(tau, gain, zf, prm); };
  const double tau = detail::golden_maximize(rate, opts.tau_lo, opts.tau_hi, opts.golden_iter, 1e-12);
  return package(tau, s, zf, ch, prm);
}

JointSolution zf_fixed_beam_at_tau(double tau, const EnergyCovariance& s, const ChannelSet& ch,
                                   const SystemParams& prm) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  prm.validate(ch.users());
  return package(tau, s, zf_receivers(ch), ch, prm);
}

EnergyCovariance suboptimal2_beam(const ChannelSet& ch, const SystemParams& prm) {
  const ZfBank zf = zf_receivers(ch);
  RealVector alpha(ch.users());
  for (Eigen::Index k = 0; k < ch.users(); ++k) {
    alpha[k] = 1.0 / (zf.equivalent_gains[k] * ch.downlink.col(k).squaredNorm());
  }
  return weighted_sum_energy_beam(alpha, ch, prm).covariance;
}

EnergyCovariance random_beam(const ChannelSet& ch, const SystemParams& prm, std::uint64_t seed) {
  ComplexGaussianSource src(seed);
  ComplexVector u(ch.antennas());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = src.next();
  return EnergyCovariance::single_beam(u, prm.p_sum);
}

JointSolution suboptimal2(const ChannelSet& ch, const SystemParams& prm, const ZfOptions& opts) {
  return zf_fixed_beam(suboptimal2_beam(ch, prm), ch, prm, opts);
}

JointSolution random_beam_baseline(const ChannelSet& ch, const SystemParams& prm,
                                   std::uint64_t seed, const ZfOptions& opts) {
  return zf_fixed_beam(random_beam(ch, prm, seed), ch, prm, opts);
}

}  // namespace wpcn
