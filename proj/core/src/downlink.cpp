#include "wpcn/downlink.hpp"

#include "wpcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace wpcn {
namespace {

// Accept a theta probe when the max-min energy ratio reaches 1 - kFeasSlack.
constexpr double kFeasSlack = 1e-9;

struct BarrierPoint {
  Eigen::LLT<ComplexMatrix> llt;
  double objective = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

// phi(y) = sum(y) + mu log det Z(y) + mu sum log y,  Z(y) = I - A diag(y) A^H.
BarrierPoint barrier_at(const ComplexMatrix& a, const RealVector& y, double mu) {
  BarrierPoint pt;
  if ((y.array() <= 0.0).any()) return pt;
  const Eigen::Index m = a.rows();
  ComplexMatrix z = ComplexMatrix::Identity(m, m);
  z.noalias() -= a * y.cast<std::complex<double>>().asDiagonal() * a.adjoint();
  pt.llt.compute(z);
  if (pt.llt.info() != Eigen::Success) return pt;
  const ComplexMatrix& l = pt.llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = l(i, i).real();
    if (!(d > 0.0)) return pt;
    logdet += 2.0 * std::log(d);
  }
  pt.objective = y.sum() + mu * (logdet + y.array().log().sum());
  pt.valid = std::isfinite(pt.objective);
  return pt;
}

// Least-norm correction of s0 inside its own range so that every user with
// dual weight meets g^H S g = c t exactly. Empty when the result is not PSD.
std::optional<ComplexMatrix> polish_primal(const ComplexMatrix& s0, const RealVector& lambda,
                                           const RealVector& costs, const ComplexMatrix& g,
                                           double budget, double target) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s0);
  const RealVector& ev = es.eigenvalues();
  const Eigen::Index m = s0.rows();
  Eigen::Index r = 0;
  while (r < m && ev[m - 1 - r] > 1e-6 * ev[m - 1]) ++r;
  const ComplexMatrix u = es.eigenvectors().rightCols(r);

  std::vector<Eigen::Index> active;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] > 1e-8) active.push_back(k);
  }
  // Hermitian basis: real diagonal, real symmetric and imaginary antisymmetric pairs.
  std::vector<ComplexMatrix> basis;
  for (Eigen::Index i = 0; i < r; ++i) {
    ComplexMatrix b = ComplexMatrix::Zero(r, r);
    b(i, i) = 1.0;
    basis.push_back(b);
    for (Eigen::Index j = i + 1; j < r; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(r, r);
      re(i, j) = re(j, i) = 1.0;
      basis.push_back(re);
      ComplexMatrix im = ComplexMatrix::Zero(r, r);
      im(i, j) = std::complex<double>(0.0, 1.0);
      im(j, i) = std::complex<double>(0.0, -1.0);
      basis.push_back(im);
    }
  }
  const auto rows = static_cast<Eigen::Index>(active.size()) + 1;
  const auto cols = static_cast<Eigen::Index>(basis.size());
  RealMatrix lin(rows, cols);
  RealVector rhs(rows);
  const ComplexMatrix x0 = u.adjoint() * s0 * u;
  for (std::size_t q = 0; q < active.size(); ++q) {
    const ComplexVector v = u.adjoint() * g.col(active[q]);
    for (Eigen::Index c = 0; c < cols; ++c) lin(q, c) = v.dot(basis[c] * v).real();
    rhs[q] = costs[active[q]] * target - v.dot(x0 * v).real();
  }
  for (Eigen::Index c = 0; c < cols; ++c) lin(rows - 1, c) = basis[c].trace().real();
  rhs[rows - 1] = budget - x0.trace().real();

  const RealVector delta = lin.completeOrthogonalDecomposition().solve(rhs);
  ComplexMatrix x = x0;
  for (Eigen::Index c = 0; c < cols; ++c) x += delta[c] * basis[c];
  x = 0.5 * (x + x.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> check(x, Eigen::EigenvaluesOnly);
  if (!(check.eigenvalues()[0] >= 0.0)) return std::nullopt;
  ComplexMatrix s = u * x * u.adjoint();
  s = 0.5 * (s + s.adjoint()).eval();
  const double tr = s.trace().real();
  if (!(tr > 0.0)) return std::nullopt;
  if (tr > budget) s *= budget / tr;
  return s;
}

double top_eigenvalue(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[h.rows() - 1];
}

}  // namespace

DownlinkSolution weighted_sum_energy_beam(const RealVector& weights, const ChannelSet& ch,
                                          const SystemParams& prm) {
  const Eigen::Index users = ch.users();
  if (weights.size() != users) throw DomainError("weight vector length differs from user count");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw DomainError("energy weights must be finite and non-negative");
  }
  if (!(weights.sum() > 0.0)) throw DomainError("at least one energy weight must be positive");

  const ComplexMatrix& g = ch.downlink;
  const ComplexMatrix combined =
      prm.efficiency * g * weights.cast<std::complex<double>>().asDiagonal() * g.adjoint();
  const HermitianEigenPair top = hermitian_top_eigenpair(combined);

  DownlinkSolution sol;
  sol.covariance = EnergyCovariance(prm.p_sum * top.vector * top.vector.adjoint());
  sol.value = top.value * prm.p_sum;
  sol.dual_value = sol.value;
  sol.dual_weights = weights / weights.sum();
  sol.gap = 0.0;
  return sol;
}

DownlinkSolution maxmin_energy_covariance(const RealVector& costs, double budget,
                                          const ChannelSet& ch, const EnergyOptions& opts) {
  const Eigen::Index users = ch.users();
  const Eigen::Index m = ch.antennas();
  if (costs.size() != users) throw DomainError("cost vector length differs from user count");
  if (!(costs.array() > 0.0).all() || !costs.allFinite()) {
    throw DomainError("energy costs must be positive");
  }
  if (!(budget > 0.0) || !std::isfinite(budget)) throw DomainError("budget must be positive");

  // Columns a_k = g_k / sqrt(c_k), rescaled so that max_k ||a_k|| = 1.
  ComplexMatrix a(m, users);
  double scale = 0.0;
  for (Eigen::Index k = 0; k < users; ++k) {
    a.col(k) = ch.downlink.col(k) / std::sqrt(costs[k]);
    const double n2 = a.col(k).squaredNorm();
    if (!(n2 > 0.0)) {
      throw DomainError("user " + std::to_string(k + 1) + " has a zero downlink channel");
    }
    scale = std::max(scale, n2);
  }
  a /= std::sqrt(scale);

  auto primal_value = [&](const ComplexMatrix& s) {
    double t = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < users; ++k) {
      const ComplexVector g = ch.downlink.col(k);
      t = std::min(t, g.dot(s * g).real() / costs[k]);
    }
    return t;
  };

  // sum_k y_k ||a_k||^2 <= 1/2 keeps Z positive definite; mu starts at the
  // objective's own scale.
  RealVector y(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    y[k] = 0.5 / (static_cast<double>(users) * a.col(k).squaredNorm());
  }
  double mu = y.sum();
  BarrierPoint pt = barrier_at(a, y, mu);

  DownlinkSolution best;
  best.gap = std::numeric_limits<double>::infinity();
  int newton = 0;
  while (newton < opts.max_newton) {
    // Centering by damped Newton.
    for (; newton < opts.max_newton; ++newton) {
      const ComplexMatrix zinv_a = pt.llt.solve(a);
      const ComplexMatrix q = a.adjoint() * zinv_a;  // q(k,j) = a_k^H Z^{-1} a_j
      const RealVector grad =
          RealVector::Ones(users) - mu * q.diagonal().real() + mu * y.cwiseInverse();
      RealMatrix hess = mu * q.cwiseAbs2();
      hess.diagonal() += mu * y.cwiseInverse().cwiseAbs2();
      const RealVector step = hess.llt().solve(grad);
      const double decrement = grad.dot(step);
      if (!(decrement > 1e-4 * mu)) break;

      double alpha = 1.0;
      BarrierPoint next;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        next = barrier_at(a, y + alpha * step, mu);
        if (next.valid && next.objective >= pt.objective + 0.25 * alpha * decrement) break;
        next.valid = false;
      }
      if (!next.valid) break;  // no ascent at working precision
      y += alpha * step;
      pt = std::move(next);
    }

    // Primal point mu Z^{-1} from the central path, normalized to the budget.
    const Eigen::Index n = a.rows();
    ComplexMatrix x = pt.llt.solve(ComplexMatrix::Identity(n, n));
    x = 0.5 * (x + x.adjoint()).eval();
    ComplexMatrix s = budget / x.trace().real() * x;
    double t_primal = primal_value(s);

    const RealVector lambda = y / y.sum();
    const ComplexMatrix mixed = a * lambda.cast<std::complex<double>>().asDiagonal() * a.adjoint();
    const double t_dual = budget * scale * top_eigenvalue(mixed);
    double gap = (t_dual - t_primal) / t_dual;

    // Z^{-1} loses digits as mu shrinks; refine once the dual is close.
    if (gap > opts.tol && gap < 1e-4) {
      if (auto polished = polish_primal(s, lambda, costs, ch.downlink, budget, t_dual)) {
        const double t = primal_value(*polished);
        if (t > t_primal) {
          s = *polished;
          t_primal = t;
          gap = (t_dual - t_primal) / t_dual;
        }
      }
    }

    if (gap < best.gap) {
      best.covariance = EnergyCovariance(s);
      best.value = t_primal;
      best.dual_value = t_dual;
      best.dual_weights = lambda;
      best.gap = std::max(gap, 0.0);
      best.iterations = newton;
    }
    if (gap <= opts.tol) return best;
    mu *= 0.1;
    pt = barrier_at(a, y, mu);
  }
  throw NotConvergedError<DownlinkSolution>(
      "max-min energy covariance stalled at relative gap " + std::to_string(best.gap), newton,
      best);
}

DownlinkSolution solve_dl_fixed_w(const ReceiverBank& w, double tau, const ChannelSet& ch,
                                  const SystemParams& prm, const DownlinkOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  const Eigen::Index users = ch.users();
  const InterferenceTerms terms = interference_terms(w, ch, prm);
  const double floor = spectral_radius(NonNegMatrix(terms.cross), opts.perron.tol,
                                       opts.perron.max_iter);

  struct Probe {
    double theta = 0.0;
    double log_ratio = 0.0;  // log of the max-min energy ratio t
    bool feasible = false;
    DownlinkSolution energy;
  };
  auto probe = [&](double theta) {
    const PowerAllocation p = power_fixed_point(theta, terms);
    RealVector costs(users);
    for (Eigen::Index k = 0; k < users; ++k) {
      costs[k] = (p.watts[k] * (1.0 - tau) + prm.circuit(k)) / (prm.efficiency * tau);
    }
    Probe out;
    out.theta = theta;
    out.energy = maxmin_energy_covariance(costs, prm.p_sum, ch, opts.energy);
    out.feasible = out.energy.value >= 1.0 - kFeasSlack;
    out.log_ratio = std::log(std::max(out.energy.value, std::numeric_limits<double>::min()));
    return out;
  };
  auto achieved = [&](const EnergyCovariance& s) {
    const RealVector budgets = harvested_power_budget(s, ch, prm, tau);
    if (!(budgets.array() > 0.0).all()) return std::numeric_limits<double>::infinity();
    return max_balance_radius(w, budgets, ch, prm, opts.perron);
  };

  // Incumbent: the supplied covariance, or the weighted sum-energy beam.
  EnergyCovariance incumbent;
  if (opts.incumbent) {
    incumbent = *opts.incumbent;
  } else {
    RealVector alpha(users);
    for (Eigen::Index k = 0; k < users; ++k) {
      alpha[k] = 1.0 / (ch.uplink.col(k).squaredNorm() * ch.downlink.col(k).squaredNorm());
    }
    incumbent = weighted_sum_energy_beam(alpha, ch, prm).covariance;
  }
  double best_theta = achieved(incumbent);
  EnergyCovariance best_cov = incumbent;

  double hi = std::isfinite(best_theta) ? best_theta : 2.0 * floor + prm.noise_power;
  Probe upper = probe(hi);
  for (int grow = 0; !upper.feasible; ++grow) {
    if (grow >= 80) throw InfeasibleError("no feasible spectral-radius target found");
    hi = grow < 4 ? hi * (1.0 + 1e-6) : hi * 2.0;
    upper = probe(hi);
  }
  double lo = floor * (1.0 + 1e-12) + std::numeric_limits<double>::min();
  Probe lower;
  lower.theta = lo;
  lower.log_ratio = -std::numeric_limits<double>::infinity();

  // Illinois-type bracketing on log t(theta) = 0 with bisection safeguards.
  int steps = 0;
  int side = 0;
  double fa_weight = 1.0;
  double fb_weight = 1.0;
  while (upper.theta - lower.theta > opts.tol * upper.theta && steps < opts.max_steps) {
    ++steps;
    double c = 0.5 * (lower.theta + upper.theta);
    const double fa = lower.log_ratio * fa_weight;
    const double fb = upper.log_ratio * fb_weight;
    if (std::isfinite(fa) && fb != fa && steps % 4 != 0) {
      const double secant = upper.theta - fb * (upper.theta - lower.theta) / (fb - fa);
      const double width = upper.theta - lower.theta;
      if (secant > lower.theta + 1e-3 * width && secant < upper.theta - 1e-3 * width) {
        c = secant;
      } else if (secant >= upper.theta - 1e-3 * width && secant < upper.theta) {
        c = upper.theta - 1e-3 * width;
      } else if (secant <= lower.theta + 1e-3 * width && secant > lower.theta) {
        c = lower.theta + 1e-3 * width;
      }
    }
    Probe mid = probe(c);
    if (mid.feasible) {
      upper = std::move(mid);
      fb_weight = 1.0;
      fa_weight = side == 1 ? fa_weight * 0.5 : 1.0;
      side = 1;
    } else {
      lower = std::move(mid);
      fa_weight = 1.0;
      fb_weight = side == -1 ? fb_weight * 0.5 : 1.0;
      side = -1;
    }
  }

  const double candidate = achieved(upper.energy.covariance);
  DownlinkSolution sol = upper.energy;
  if (candidate <= best_theta) {
    best_theta = candidate;
    best_cov = upper.energy.covariance;
  }
  sol.covariance = best_cov;
  sol.value = best_theta;
  sol.dual_value = lower.theta;
  sol.gap = std::max(0.0, (best_theta - lower.theta) / best_theta);
  sol.iterations = steps;
  return sol;
}

}  // namespace wpcn
