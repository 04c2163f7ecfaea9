#include "wpcn/joint.hpp"

#include "wpcn/errors.hpp"
#include "wpcn/detail/golden.hpp"
#include "wpcn/tdma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wpcn {
namespace {

JointSolution package(double tau, const AlternatingResult& res, const ChannelSet& ch,
                      const SystemParams& prm) {
  JointSolution sol;
  sol.scheme = AccessScheme::kSdma;
  sol.tau = tau;
  sol.covariance = res.covariance;
  sol.receivers = res.uplink.receivers;
  sol.budgets = harvested_power_budget(res.covariance, ch, prm, tau);
  sol.powers.watts = res.uplink.powers.watts.cwiseMin(sol.budgets);
  const RealVector sinr = uplink_sinr(sol.powers, sol.receivers, ch, prm);
  sol.gamma = sinr.minCoeff();
  sol.k_star = res.uplink.k_star;
  sol.rate = achievable_rate(sinr, tau).minCoeff();
  sol.iterations = res.iterations;
  sol.rho_trace = res.rho_trace;
  return sol;
}

}  // namespace

RealVector initial_beam_weights(BeamInit init, const ChannelSet& ch) {
  RealVector alpha = RealVector::Ones(ch.users());
  if (init == BeamInit::kChannelWeighted) {
    for (Eigen::Index k = 0; k < ch.users(); ++k) {
      alpha[k] = 1.0 / (ch.uplink.col(k).squaredNorm() * ch.downlink.col(k).squaredNorm());
    }
  }
  return alpha;
}

AlternatingResult alternating_optimize(double tau, const ChannelSet& ch, const SystemParams& prm,
                                       const AlternatingOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (!(opts.eps > 0.0)) throw DomainError("eps must be positive");
  ch.validate();
  prm.validate(ch.users());

  AlternatingResult res;
  res.covariance = weighted_sum_energy_beam(initial_beam_weights(opts.init, ch), ch, prm).covariance;
  res.uplink = solve_ul_fixed_v(res.covariance, tau, ch, prm, opts.uplink);
  res.rho_trace.push_back(res.uplink.rho);

  UplinkOptions ul = opts.uplink;
  DownlinkOptions dl = opts.downlink;
  for (int it = 1; it <= opts.max_iter; ++it) {
    dl.incumbent = res.covariance;
    const DownlinkSolution down = solve_dl_fixed_w(res.uplink.receivers, tau, ch, prm, dl);
    ul.initial_receivers = res.uplink.receivers;
    UplinkSolution up = solve_ul_fixed_v(down.covariance, tau, ch, prm, ul);

    const double previous = res.rho_trace.back();
    // Both half-steps are minimizers; keep the incumbent if round-off says otherwise.
    if (up.rho <= previous) {
      res.uplink = std::move(up);
      res.downlink = down;
      res.covariance = down.covariance;
    }
    res.rho_trace.push_back(res.uplink.rho);
    res.iterations = it;
    if (previous - res.uplink.rho < opts.eps * res.uplink.rho) return res;
  }
  throw NotConvergedError<AlternatingResult>(
      "alternating optimization did not settle in " + std::to_string(opts.max_iter) +
          " iterations",
      opts.max_iter, res);
}

JointSolution solve_fixed_tau(double tau, const ChannelSet& ch, const SystemParams& prm,
                              const AlternatingOptions& opts) {
  return package(tau, alternating_optimize(tau, ch, prm, opts), ch, prm);
}

JointSolution tau_sweep_optimize(const ChannelSet& ch, const SystemParams& prm,
                                 const SweepOptions& opts) {
  if (!(opts.grid_step > 0.0 && opts.grid_step < 0.5)) {
    throw DomainError("grid step must lie in (0, 0.5)");
  }
  std::vector<double> grid;
  for (int i = 1;; ++i) {
    const double tau = i * opts.grid_step;
    if (tau >= 1.0 - 1e-12) break;
    grid.push_back(tau);
  }
  const int n = static_cast<int>(grid.size());

  std::vector<JointSolution> sols(n);
  std::vector<TauPoint> points(n);
  parallel_for(n, opts.workers, [&](int i) {
    points[i].tau = grid[i];
    try {
      sols[i] = solve_fixed_tau(grid[i], ch, prm, opts.inner);
      points[i].rate = sols[i].rate;
    } catch (const Error& e) {
      points[i].ok = false;
      points[i].error = e.what();
    }
  });

  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (points[i].ok && (best < 0 || points[i].rate > points[best].rate)) best = i;
  }
  if (best < 0) throw Error("every tau grid point failed");
  JointSolution result = sols[best];
  std::vector<TauPoint> profile = points;

  if (opts.refine) {
    auto eval = [&](double tau) {
      TauPoint pt{tau, -std::numeric_limits<double>::infinity(), true, {}};
      try {
        JointSolution s = solve_fixed_tau(tau, ch, prm, opts.inner);
        pt.rate = s.rate;
        if (s.rate > result.rate) result = std::move(s);
      } catch (const Error& e) {
        pt.ok = false;
        pt.error = e.what();
      }
      profile.push_back(pt);
      return pt.rate;
    };
    double a = best > 0 ? grid[best - 1] : 0.5 * grid[0];
    double b = best + 1 < n ? grid[best + 1] : 0.5 * (1.0 + grid[n - 1]);
    detail::golden_maximize(eval, a, b, opts.golden_iter);
  }
  std::stable_sort(profile.begin(), profile.end(),
                   [](const TauPoint& l, const TauPoint& r) { return l.tau < r.tau; });
  result.tau_profile = std::move(profile);
  return result;
}

JointSolution solve_optimal(const ChannelSet& ch, const SystemParams& prm,
                            const SweepOptions& opts) {
  ch.validate();
  prm.validate(ch.users());
  if (ch.antennas() == 1) return tdma_reference(ch, prm);
  return tau_sweep_optimize(ch, prm, opts);
}

JointSolution single_user_optimum(const ChannelSet& ch, const SystemParams& prm) {
  if (ch.users() != 1) throw DomainError("single-user closed form needs K = 1");
  prm.validate(1);
  const ComplexVector g = ch.downlink.col(0);
  const ComplexVector h = ch.uplink.col(0);
  const double gain = prm.efficiency * prm.p_sum * g.squaredNorm() * h.squaredNorm();
  const double ec = prm.circuit(0) * h.squaredNorm();
  auto rate = [&](double tau) {
    const double snr = std::max(0.0, tau * gain - ec) / ((1.0 - tau) * prm.noise_power);
    return (1.0 - tau) * std::log2(1.0 + snr);
  };
  const double tau = detail::golden_maximize(rate, 1e-9, 1.0 - 1e-9, 200, 1e-15);

  JointSolution sol;
  sol.tau = tau;
  sol.covariance = EnergyCovariance::single_beam(g, prm.p_sum);
  sol.receivers.weights = h / h.norm();
  sol.budgets = harvested_power_budget(sol.covariance, ch, prm, tau);
  sol.powers.watts = sol.budgets;
  const RealVector sinr = uplink_sinr(sol.powers, sol.receivers, ch, prm);
  sol.gamma = sinr[0];
  sol.k_star = 0;
  sol.rate = achievable_rate(sinr, tau)[0];
  return sol;
}

}  // namespace wpcn
