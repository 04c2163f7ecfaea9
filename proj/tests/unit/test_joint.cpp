#include "doctest.h"
#include "helpers.hpp"

#include "wpcn/errors.hpp"
#include "wpcn/joint.hpp"
#include "wpcn/tdma.hpp"
#include "wpcn/zero_forcing.hpp"

#include <atomic>

using namespace wpcn;
using testutil::rel;

namespace {

SweepOptions coarse(int workers = 4) {
  SweepOptions o;
  o.grid_step = 0.05;
  o.workers = workers;
  return o;
}

const JointSolution& fixture_optimum() {
  static const JointSolution sol = solve_optimal(fixture_channels(), SystemParams{}, coarse());
  return sol;
}

double single_user_rate(double tau, const ChannelSet& ch, const SystemParams& prm) {
  const double e = prm.efficiency * tau * prm.p_sum * ch.downlink.col(0).squaredNorm();
  const double snr = e * ch.uplink.col(0).squaredNorm() / ((1.0 - tau) * prm.noise_power);
  return (1.0 - tau) * std::log2(1.0 + snr);
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(101, workers, [&](int i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](int i) {
                    if (i == 7) throw InfeasibleError("x");
                  }),
                  InfeasibleError);
}

TEST_CASE("initial beam weights") {
  const ChannelSet ch = fixture_channels();
  const RealVector u = initial_beam_weights(BeamInit::kUniform, ch);
  CHECK(u == RealVector::Ones(4));
  const RealVector c = initial_beam_weights(BeamInit::kChannelWeighted, ch);
  for (int k = 0; k < 4; ++k) {
    CHECK(rel(c[k], 1.0 / std::pow(ch.downlink.col(k).squaredNorm(), 2)) <= 1e-14);
  }
}

TEST_CASE("single user alternation stops after one round") {
  testutil::Rng rng(1);
  const SystemParams prm;
  for (int t = 0; t < 10; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 4, 1);
    const AlternatingResult r = alternating_optimize(0.4, ch, prm);
    CHECK(r.iterations == 1);
    CHECK(r.rho_trace.size() == 2);
    const double snr = 1.0 / r.uplink.rho;
    const double tau = 0.4;
    const double expect = prm.efficiency * tau * prm.p_sum * ch.downlink.col(0).squaredNorm() *
                          ch.uplink.col(0).squaredNorm() / ((1.0 - tau) * prm.noise_power);
    CHECK(rel(snr, expect) <= 1e-8);
  }
}

TEST_CASE("alternation on the fixture") {
  const ChannelSet ch = fixture_channels();
  const SystemParams prm;
  AlternatingOptions opts;
  const AlternatingResult a = alternating_optimize(0.5, ch, prm, opts);
  CHECK(a.iterations <= 10);
  for (std::size_t i = 1; i < a.rho_trace.size(); ++i) {
    CHECK(a.rho_trace[i] <= a.rho_trace[i - 1]);
  }
  opts.init = BeamInit::kUniform;
  const AlternatingResult b = alternating_optimize(0.5, ch, prm, opts);
  CHECK(rel(a.uplink.gamma, b.uplink.gamma) <= 1e-5);

  const JointSolution sol = solve_fixed_tau(0.5, ch, prm);
  CHECK(validate_solution(sol, ch, prm).ok());
  CHECK(rel(sol.gamma, a.uplink.gamma) <= 1e-7);
  CHECK(sol.covariance.trace() <= prm.p_sum * (1.0 + 1e-9));
  CHECK(rel(sol.powers.watts[sol.k_star], sol.budgets[sol.k_star]) <= 1e-7);

  opts.max_iter = 1;
  opts.eps = 1e-300;
  CHECK_THROWS_AS(alternating_optimize(0.5, ch, prm, opts), NotConvergedError<AlternatingResult>);
  CHECK_THROWS_AS(alternating_optimize(1.2, ch, prm), DomainError);
}

TEST_CASE("alternation does not depend on the initial beam") {
  testutil::Rng rng(2);
  const SystemParams prm;
  for (int t = 0; t < 20; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 4, 3);
    const double tau = rng.uniform(0.2, 0.7);
    AlternatingOptions opts;
    const AlternatingResult a = alternating_optimize(tau, ch, prm, opts);
    opts.init = BeamInit::kUniform;
    const AlternatingResult b = alternating_optimize(tau, ch, prm, opts);
    CHECK(rel(a.uplink.gamma, b.uplink.gamma) <= 1e-4);
  }
}

TEST_CASE("tau profile") {
  const JointSolution& sol = fixture_optimum();
  const auto& prof = sol.tau_profile;
  REQUIRE(prof.size() > 19);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i - 1].tau <= prof[i].tau);
  for (const TauPoint& p : prof) {
    CHECK(p.ok);
    CHECK(p.rate <= sol.rate);
  }
  CHECK(sol.tau > prof.front().tau);
  CHECK(sol.tau < prof.back().tau);
  CHECK(prof.front().rate < sol.rate);
  CHECK(prof.back().rate < sol.rate);
  CHECK(validate_solution(sol, fixture_channels(), SystemParams{}).ok());

  // Grid points rise to the peak and fall after it.
  std::vector<TauPoint> grid;
  for (const TauPoint& p : prof) {
    const double steps = p.tau / 0.05;
    if (std::abs(steps - std::round(steps)) < 1e-9) grid.push_back(p);
  }
  REQUIRE(grid.size() == 19);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].rate > grid[peak].rate) peak = i;
  }
  for (std::size_t i = 1; i <= peak; ++i) CHECK(grid[i].rate > grid[i - 1].rate);
  for (std::size_t i = peak + 1; i < grid.size(); ++i) CHECK(grid[i].rate < grid[i - 1].rate);
}

TEST_CASE("single user sweep matches the closed form") {
  testutil::Rng rng(3);
  const SystemParams prm;
  for (int t = 0; t < 3; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 3, 1);
    const JointSolution closed = single_user_optimum(ch, prm);
    const JointSolution swept = tau_sweep_optimize(ch, prm, coarse());
    CHECK(rel(closed.rate, swept.rate) <= 1e-6);
    CHECK(std::abs(closed.tau - swept.tau) <= 1e-3);

    double best = 0.0;
    double arg = 0.0;
    for (int i = 1; i < 10000; ++i) {
      const double tau = i / 10000.0;
      const double r = single_user_rate(tau, ch, prm);
      if (r > best) {
        best = r;
        arg = tau;
      }
    }
    CHECK(std::abs(closed.tau - arg) <= 2e-4);
    CHECK(closed.rate >= best * (1.0 - 1e-12));
    CHECK(rel(closed.rate, best) <= 1e-6);
    CHECK(validate_solution(closed, ch, prm).ok());
  }
  CHECK_THROWS_AS(single_user_optimum(fixture_channels(), prm), DomainError);
}

TEST_CASE("sweep is independent of the worker count") {
  const ChannelSet ch = fixture_channels().first_antennas(4);
  SweepOptions o = coarse(1);
  o.grid_step = 0.1;
  o.golden_iter = 10;
  const JointSolution one = tau_sweep_optimize(ch, SystemParams{}, o);
  o.workers = 4;
  const JointSolution four = tau_sweep_optimize(ch, SystemParams{}, o);
  CHECK(one.rate == four.rate);
  CHECK(one.tau == four.tau);
  REQUIRE(one.tau_profile.size() == four.tau_profile.size());
  for (std::size_t i = 0; i < one.tau_profile.size(); ++i) {
    CHECK(one.tau_profile[i].tau == four.tau_profile[i].tau);
    CHECK(one.tau_profile[i].rate == four.tau_profile[i].rate);
  }
  o.grid_step = 0.7;
  CHECK_THROWS_AS(tau_sweep_optimize(ch, SystemParams{}, o), DomainError);
}

TEST_CASE("more antennas never hurt") {
  const ChannelSet full = fixture_channels();
  const SystemParams prm;
  double prev = 0.0;
  for (int m = 1; m <= 6; ++m) {
    const ChannelSet ch = full.first_antennas(m);
    const JointSolution s = solve_optimal(ch, prm, coarse());
    CHECK(validate_solution(s, ch, prm).ok());
    CHECK(s.scheme == (m == 1 ? AccessScheme::kTdmaReference : AccessScheme::kSdma));
    CHECK(s.rate >= prev * (1.0 - 1e-6));
    prev = s.rate;
  }
}

TEST_CASE("more transmit power never hurts") {
  const ChannelSet ch = fixture_channels();
  SystemParams prm;
  for (double tau : {0.2, 0.5, 0.8}) {
    const double base = solve_fixed_tau(tau, ch, prm).rate;
    SystemParams more = prm;
    more.p_sum *= 1.1;
    CHECK(solve_fixed_tau(tau, ch, more).rate >= base);
  }
}

TEST_CASE("circuit energy lowers the rate") {
  const ChannelSet ch = fixture_channels();
  SystemParams prm;
  const double base = solve_fixed_tau(0.5, ch, prm).rate;
  prm.circuit_energy = RealVector::Constant(4, 1e-5);
  const JointSolution s = solve_fixed_tau(0.5, ch, prm);
  CHECK(s.rate < base);
  CHECK(validate_solution(s, ch, prm).ok());
}

TEST_CASE("optimal design beats the zero-forcing designs") {
  const ChannelSet ch = fixture_channels();
  const SystemParams prm;
  const double opt = fixture_optimum().rate;
  CHECK(opt > suboptimal1(ch, prm).rate);
  CHECK(opt > suboptimal2(ch, prm).rate);
}

TEST_CASE("TDMA slot search") {
  // t log2(1 + a / t) at t = 0.5, a = 1.5: 0.5 * 2 = 1
  CHECK(tdma_slot_for_rate(1.0, 1.5, 0.9) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tdma_slot_for_rate(0.0, 1.5, 0.9) == 0.0);
  CHECK(std::isinf(tdma_slot_for_rate(5.0, 1.5, 0.9)));
  CHECK(std::isinf(tdma_slot_for_rate(0.1, 0.0, 0.9)));
}

TEST_CASE("TDMA reference") {
  const ChannelSet ch = fixture_channels().first_antennas(1);
  const SystemParams prm;
  const JointSolution s = tdma_reference(ch, prm);
  CHECK(s.scheme == AccessScheme::kTdmaReference);
  CHECK(validate_solution(s, ch, prm).ok());
  REQUIRE(s.tdma_slots.size() == 4);
  CHECK(s.tau + s.tdma_slots.sum() <= 1.0 + 1e-9);
  for (int k = 0; k < 4; ++k) {
    const double r = s.tdma_slots[k] *
                     std::log2(1.0 + ch.uplink.col(k).squaredNorm() * s.powers.watts[k] /
                                         prm.noise_power);
    CHECK(rel(r, s.rate) <= 1e-6);
  }
  for (double tau0 : {0.1, 0.3, 0.6, 0.9}) {
    CHECK(tdma_at_tau(tau0, ch, prm).rate <= s.rate * (1.0 + 1e-9));
  }
}
