#include "wpcn/tdma.hpp"

#include "wpcn/detail/golden.hpp"
#include "wpcn/downlink.hpp"
#include "wpcn/errors.hpp"

#include <cmath>
#include <limits>

namespace wpcn {
namespace {

double slot_rate(double slot, double snr_energy) {
  return slot * std::log2(1.0 + snr_energy / slot);
}

EnergyCovariance reference_beam(const ChannelSet& ch, const SystemParams& prm) {
  RealVector alpha(ch.users());
  for (Eigen::Index k = 0; k < ch.users(); ++k) {
    alpha[k] = 1.0 / (ch.uplink.col(k).squaredNorm() * ch.downlink.col(k).squaredNorm());
  }
  return weighted_sum_energy_beam(alpha, ch, prm).covariance;
}

}  // namespace

double tdma_slot_for_rate(double rate, double snr_energy, double available, int bisection_iter) {
  if (rate <= 0.0) return 0.0;
  if (!(snr_energy > 0.0) || slot_rate(available, snr_energy) < rate) {
    return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  double hi = available;
  for (int i = 0; i < bisection_iter && hi - lo > 1e-15 * available; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slot_rate(mid, snr_energy) >= rate ? hi : lo) = mid;
  }
  return hi;
}

JointSolution tdma_at_tau(double tau0, const ChannelSet& ch, const SystemParams& prm,
                          const TdmaOptions& opts) {
  if (!(tau0 > 0.0 && tau0 < 1.0)) throw DomainError("tau must lie in (0, 1)");
  prm.validate(ch.users());
  const Eigen::Index users = ch.users();
  const EnergyCovariance s = reference_beam(ch, prm);

  RealVector a(users);  // ||h_k||^2 E_k / sigma^2
  RealVector energy(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    energy[k] = std::max(0.0, prm.efficiency * tau0 * s.energy_gain(ch.downlink.col(k)) -
                                  prm.circuit(k));
    a[k] = ch.uplink.col(k).squaredNorm() * energy[k] / prm.noise_power;
  }
  const double available = 1.0 - tau0;
  auto slots_for = [&](double rate) {
    RealVector t(users);
    for (Eigen::Index k = 0; k < users; ++k) {
      t[k] = tdma_slot_for_rate(rate, a[k], available, opts.bisection_iter);
    }
    return t;
  };

  // Largest common rate whose minimal slots fit into 1 - tau0.
  double lo = 0.0;
  double hi = slot_rate(available, a.minCoeff());
  if (!(hi > 0.0)) hi = 0.0;
  for (int i = 0; i < opts.bisection_iter && hi - lo > 1e-14 * std::max(hi, 1e-300); ++i) {
    const double mid = 0.5 * (lo + hi);
    (slots_for(mid).sum() <= available ? lo : hi) = mid;
  }

  JointSolution sol;
  sol.scheme = AccessScheme::kTdmaReference;
  sol.tau = tau0;
  sol.covariance = s;
  sol.tdma_slots = lo > 0.0 ? slots_for(lo) : RealVector::Constant(users, available / users);
  sol.receivers.weights = ch.uplink.colwise().normalized();
  sol.powers.watts = RealVector(users);
  sol.budgets = RealVector(users);
  double rate = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < users; ++k) {
    const double slot = sol.tdma_slots[k];
    sol.powers.watts[k] = energy[k] / slot;
    sol.budgets[k] = sol.powers.watts[k];
    const double r = slot_rate(slot, a[k]);
    if (r < rate) {
      rate = r;
      sol.k_star = static_cast<int>(k);
    }
  }
  sol.rate = rate;
  sol.gamma = std::exp2(rate / available) - 1.0;
  return sol;
}

JointSolution tdma_reference(const ChannelSet& ch, const SystemParams& prm,
                             const TdmaOptions& opts) {
  auto rate = [&](double tau0) { return tdma_at_tau(tau0, ch, prm, opts).rate; };
  return tdma_at_tau(detail::golden_maximize(rate, 1e-3, 1.0 - 1e-3, opts.golden_iter), ch, prm,
                     opts);
}

}  // namespace wpcn
