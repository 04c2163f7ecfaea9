#include "wpcn/uplink.hpp"

#include "wpcn/errors.hpp"

#include <cmath>
#include <string>

namespace wpcn {
namespace {

void check_budgets(const RealVector& budgets, Eigen::Index users) {
  if (budgets.size() != users) throw DomainError("budget vector length differs from user count");
  for (Eigen::Index k = 0; k < users; ++k) {
    if (!(budgets[k] > 0.0) || !std::isfinite(budgets[k])) {
      throw DegenerateError("user " + std::to_string(k + 1) + " has no positive power budget");
    }
  }
}

}  // namespace

InterferenceTerms interference_terms(const ReceiverBank& w, const ChannelSet& ch,
                                     const SystemParams& prm, double noise_factor) {
  const Eigen::Index users = ch.users();
  if (w.weights.rows() != ch.antennas() || w.weights.cols() != users) {
    throw DomainError("receiver bank shape differs from the channel shape");
  }
  const RealMatrix gains = (w.weights.adjoint() * ch.uplink).cwiseAbs2();
  InterferenceTerms t{RealMatrix::Zero(users, users), RealVector(users)};
  for (Eigen::Index k = 0; k < users; ++k) {
    const double own = gains(k, k);
    if (!(own > 0.0)) {
      throw DegenerateError("receiver " + std::to_string(k + 1) + " has zero gain on its user");
    }
    for (Eigen::Index j = 0; j < users; ++j) {
      if (j != k) t.cross(k, j) = gains(k, j) / own;
    }
    t.noise[k] = noise_factor * prm.noise_power * w.weights.col(k).squaredNorm() / own;
  }
  return t;
}

BalanceMatrix build_balance_matrix(int user, const InterferenceTerms& terms,
                                   const RealVector& budgets) {
  const Eigen::Index users = terms.cross.rows();
  if (user < 0 || user >= users) throw DomainError("user index out of range");
  check_budgets(budgets, users);
  RealMatrix a(users + 1, users + 1);
  a.topLeftCorner(users, users) = terms.cross;
  a.topRightCorner(users, 1) = terms.noise;
  a.bottomLeftCorner(1, users) = terms.cross.row(user) / budgets[user];
  a(users, users) = terms.noise[user] / budgets[user];
  return {NonNegMatrix(std::move(a)), user};
}

BalanceMatrix build_balance_matrix(int user, const ReceiverBank& w, const RealVector& budgets,
                                   const ChannelSet& ch, const SystemParams& prm,
                                   double noise_factor) {
  return build_balance_matrix(user, interference_terms(w, ch, prm, noise_factor), budgets);
}

UplinkSolution balance_value_and_powers(const ReceiverBank& w, const RealVector& budgets,
                                        double tau, const ChannelSet& ch,
                                        const SystemParams& prm, const UplinkOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  const Eigen::Index users = ch.users();
  check_budgets(budgets, users);

  const bool energy = opts.convention == NoiseConvention::kEnergyDomain;
  const double scale = energy ? 1.0 - tau : 1.0;
  const InterferenceTerms terms = interference_terms(w, ch, prm, scale);
  const RealVector native_budgets = scale * budgets;

  double rho = -1.0;
  int k_star = -1;
  for (int k = 0; k < users; ++k) {
    const double r = spectral_radius(build_balance_matrix(k, terms, native_budgets).matrix,
                                     opts.perron.tol, opts.perron.max_iter);
    if (r > rho) {
      rho = r;
      k_star = k;
    }
  }
  const EigenPair perron =
      dominant_eigenvector(build_balance_matrix(k_star, terms, native_budgets).matrix, opts.perron);

  UplinkSolution sol;
  sol.receivers = w;
  sol.powers.watts = perron.vector.head(users) / scale;
  sol.budgets = budgets;
  sol.rho = perron.value;
  sol.gamma = 1.0 / perron.value;
  sol.k_star = k_star;
  return sol;
}

UplinkSolution balance_value_and_powers(const ReceiverBank& w, const EnergyCovariance& s,
                                        double tau, const ChannelSet& ch,
                                        const SystemParams& prm, const UplinkOptions& opts) {
  return balance_value_and_powers(w, harvested_power_budget(s, ch, prm, tau), tau, ch, prm, opts);
}

ReceiverBank mmse_receivers(const PowerAllocation& p, const ChannelSet& ch,
                            const SystemParams& prm) {
  const Eigen::Index users = ch.users();
  const Eigen::Index m = ch.antennas();
  if (p.watts.size() != users) throw DomainError("power vector length differs from user count");
  if ((p.watts.array() < 0.0).any()) throw DomainError("powers must be non-negative");

  const ComplexMatrix& h = ch.uplink;
  ComplexMatrix total = prm.noise_power * ComplexMatrix::Identity(m, m);
  for (Eigen::Index j = 0; j < users; ++j) {
    total.noalias() += p.watts[j] * h.col(j) * h.col(j).adjoint();
  }
  ReceiverBank bank{ComplexMatrix(m, users)};
  for (Eigen::Index k = 0; k < users; ++k) {
    const ComplexMatrix others = total - p.watts[k] * h.col(k) * h.col(k).adjoint();
    Eigen::LLT<ComplexMatrix> llt(others);
    if (llt.info() != Eigen::Success) {
      throw Error("interference-plus-noise covariance is not positive definite");
    }
    ComplexVector w = llt.solve(h.col(k));
    const double n = w.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateError("MMSE receiver vanished");
    bank.weights.col(k) = w / n;
  }
  return bank;
}

PowerAllocation power_fixed_point(double theta, const InterferenceTerms& terms) {
  const Eigen::Index users = terms.cross.rows();
  const double floor = spectral_radius(NonNegMatrix(terms.cross));
  if (!(theta > floor)) {
    throw InfeasibleError("target " + std::to_string(theta) +
                          " is not above rho(D Psi) = " + std::to_string(floor));
  }
  const RealMatrix system = theta * RealMatrix::Identity(users, users) - terms.cross;
  RealVector p = system.partialPivLu().solve(terms.noise);
  // (theta I - X)^{-1} is entrywise non-negative above rho(X); clip round-off.
  return {p.cwiseMax(0.0)};
}

PowerAllocation power_fixed_point(double theta, const ReceiverBank& w, const ChannelSet& ch,
                                  const SystemParams& prm, double noise_factor) {
  return power_fixed_point(theta, interference_terms(w, ch, prm, noise_factor));
}

UplinkSolution solve_ul_for_budgets(const RealVector& budgets, double tau, const ChannelSet& ch,
                                    const SystemParams& prm, const UplinkOptions& opts) {
  check_budgets(budgets, ch.users());
  ReceiverBank w = opts.initial_receivers ? *opts.initial_receivers
                                          : mmse_receivers(PowerAllocation{budgets}, ch, prm);
  std::vector<double> trace;
  UplinkSolution sol;
  for (int it = 1; it <= opts.max_iter; ++it) {
    sol = balance_value_and_powers(w, budgets, tau, ch, prm, opts);
    trace.push_back(sol.rho);
    sol.trace = trace;
    sol.iterations = it;
    if (it > 1 && std::abs(trace[trace.size() - 2] - sol.rho) < opts.tol * sol.rho) {
      return sol;
    }
    w = mmse_receivers(sol.powers, ch, prm);
  }
  throw NotConvergedError<UplinkSolution>(
      "uplink balancing did not settle in " + std::to_string(opts.max_iter) + " iterations",
      opts.max_iter, sol);
}

UplinkSolution solve_ul_fixed_v(const EnergyCovariance& s, double tau, const ChannelSet& ch,
                                const SystemParams& prm, const UplinkOptions& opts) {
  return solve_ul_for_budgets(harvested_power_budget(s, ch, prm, tau), tau, ch, prm, opts);
}

double max_balance_radius(const ReceiverBank& w, const RealVector& budgets, const ChannelSet& ch,
                          const SystemParams& prm, const PerronOptions& perron) {
  const InterferenceTerms terms = interference_terms(w, ch, prm);
  double rho = 0.0;
  for (int k = 0; k < ch.users(); ++k) {
    rho = std::max(rho, spectral_radius(build_balance_matrix(k, terms, budgets).matrix, perron.tol,
                                        perron.max_iter));
  }
  return rho;
}

}  // namespace wpcn
