#include "doctest.h"
#include "helpers.hpp"

#include "wpcn/errors.hpp"
#include "wpcn/uplink.hpp"

using namespace wpcn;
using testutil::rel;

namespace {

double min_sinr(const RealVector& p, const ReceiverBank& w, const ChannelSet& ch,
                const SystemParams& prm) {
  return uplink_sinr(PowerAllocation{p}, w, ch, prm).minCoeff();
}

// max SINR_k over w_k: p_k h_k^H R_k^{-1} h_k
double mmse_sinr(int k, const RealVector& p, const ChannelSet& ch, const SystemParams& prm) {
  const Eigen::Index m = ch.antennas();
  ComplexMatrix r = prm.noise_power * ComplexMatrix::Identity(m, m);
  for (Eigen::Index j = 0; j < ch.users(); ++j) {
    if (j != k) r += p[j] * ch.uplink.col(j) * ch.uplink.col(j).adjoint();
  }
  const ComplexVector x = r.fullPivLu().solve(ch.uplink.col(k));
  return p[k] * ch.uplink.col(k).dot(x).real();
}

}  // namespace

TEST_CASE("balance matrix layout") {
  InterferenceTerms t{RealMatrix(2, 2), RealVector(2)};
  t.cross << 0.0, 0.3, 0.2, 0.0;
  t.noise << 0.01, 0.02;
  RealVector b(2);
  b << 0.5, 0.25;
  const RealMatrix a = build_balance_matrix(1, t, b).matrix.entries();
  RealMatrix expect(3, 3);
  expect << 0.0, 0.3, 0.01, 0.2, 0.0, 0.02, 0.8, 0.0, 0.08;
  CHECK((a - expect).norm() <= 1e-15);
  CHECK_THROWS_AS(build_balance_matrix(2, t, b), DomainError);
  b[0] = 0.0;
  CHECK_THROWS_AS(build_balance_matrix(0, t, b), DegenerateError);
}

TEST_CASE("balance matrix radius in closed form") {
  // Symmetric pair: rho(A_k) = a + n / b.
  for (double a : {0.0, 0.1, 0.7}) {
    for (double n : {1e-3, 0.2}) {
      for (double b : {0.1, 2.0}) {
        InterferenceTerms t{RealMatrix(2, 2), RealVector::Constant(2, n)};
        t.cross << 0.0, a, a, 0.0;
        const RealVector budgets = RealVector::Constant(2, b);
        const double rho = spectral_radius(build_balance_matrix(0, t, budgets).matrix, 1e-12);
        CHECK(rel(rho, a + n / b) <= 1e-9);
      }
    }
  }
}

TEST_CASE("fixture balance matrices") {
  const ChannelSet ch = fixture_channels();
  const SystemParams prm;
  const ReceiverBank w{ch.uplink.colwise().normalized()};
  RealVector b(4);
  b << 4e-4, 8e-4, 3e-4, 6e-4;
  const InterferenceTerms t = interference_terms(w, ch, prm);
  for (int k = 0; k < 4; ++k) {
    const RealMatrix a = build_balance_matrix(k, w, b, ch, prm).matrix.entries();
    CHECK(a.rows() == 5);
    CHECK(a.diagonal().head(4).isZero(0.0));
    CHECK((a.topLeftCorner(4, 4) - t.cross).norm() == 0.0);
    CHECK((a.bottomLeftCorner(1, 4) - t.cross.row(k) / b[k]).norm() <= 1e-18);
    CHECK(a(4, 4) == doctest::Approx(t.noise[k] / b[k]).epsilon(1e-14));
  }
}

TEST_CASE("single user balance is the full-power SNR") {
  testutil::Rng rng(21);
  const SystemParams prm;
  for (int t = 0; t < 50; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 3, 1);
    const ReceiverBank w{rng.cn_matrix(3, 1)};
    const RealVector b = testutil::random_budgets(rng, 1);
    const UplinkSolution s = balance_value_and_powers(w, b, 0.5, ch, prm);
    const double gain = std::norm(w.weights.col(0).dot(ch.uplink.col(0)));
    const double snr = b[0] * gain / (prm.noise_power * w.weights.col(0).squaredNorm());
    CHECK(rel(s.gamma, snr) <= 1e-9);
    CHECK(rel(s.powers.watts[0], b[0]) <= 1e-9);
    CHECK(s.k_star == 0);
  }
}

TEST_CASE("orthogonal users balance to the weakest SNR") {
  ChannelSet ch;
  ch.uplink = ComplexMatrix::Zero(3, 3);
  ch.uplink(0, 0) = 0.02;
  ch.uplink(1, 1) = 0.01;
  ch.uplink(2, 2) = 0.03;
  ch.downlink = ch.uplink;
  const SystemParams prm;
  RealVector b(3);
  b << 1e-3, 1e-3, 2e-4;
  const UplinkSolution s =
      balance_value_and_powers(ReceiverBank{ComplexMatrix::Identity(3, 3)}, b, 0.4, ch, prm);
  // SNRs at full power: 40, 10, 18
  CHECK(rel(s.gamma, 10.0) <= 1e-9);
  CHECK(s.k_star == 1);
  CHECK(rel(s.powers.watts[0], 10.0 * 1e-8 / 4e-4) <= 1e-9);
  CHECK(rel(s.powers.watts[1], 1e-3) <= 1e-9);
}

TEST_CASE("balanced value matches a brute-force power grid") {
  testutil::Rng rng(5);
  const SystemParams prm;
  for (int t = 0; t < 8; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 2, 2);
    const ReceiverBank w{rng.cn_matrix(2, 2)};
    const RealVector b = testutil::random_budgets(rng, 2);
    const UplinkSolution s = balance_value_and_powers(w, b, 0.5, ch, prm);
    double best = 0.0;
    const int n = 400;
    RealVector p(2);
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        p << b[0] * i / n, b[1] * j / n;
        best = std::max(best, min_sinr(p, w, ch, prm));
      }
    }
    CHECK(best <= s.gamma * (1.0 + 1e-9));
    CHECK(best >= s.gamma * 0.99);
  }
}

TEST_CASE("balanced powers equalize SINR and hit one budget") {
  testutil::Rng rng(6);
  const SystemParams prm;
  for (int t = 0; t < 200; ++t) {
    const int k = rng.integer(2, 4);
    const ChannelSet ch = testutil::random_channels(rng, 4, k);
    const ReceiverBank w{rng.cn_matrix(4, k)};
    const RealVector b = testutil::random_budgets(rng, k);
    const UplinkSolution s = balance_value_and_powers(w, b, 0.5, ch, prm);
    const RealVector g = uplink_sinr(s.powers, w, ch, prm);
    CHECK((g.array() / s.gamma - 1.0).abs().maxCoeff() <= 1e-7);
    CHECK((s.powers.watts.array() <= b.array() * (1.0 + 1e-9)).all());
    CHECK(rel(s.powers.watts[s.k_star], b[s.k_star]) <= 1e-7);
    CHECK(rel(s.rho * s.gamma, 1.0) <= 1e-14);
    // rho(A_k) sits between the extreme row sums of A_k.
    const RealMatrix a = build_balance_matrix(s.k_star, w, b, ch, prm).matrix.entries();
    const RealVector rows = a.rowwise().sum();
    CHECK(s.rho <= rows.maxCoeff() * (1.0 + 1e-9));
    CHECK(s.rho >= rows.minCoeff() * (1.0 - 1e-9));
  }
}

TEST_CASE("MMSE receivers") {
  testutil::Rng rng(9);
  const SystemParams prm;
  for (int t = 0; t < 200; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 3, 3);
    const RealVector p = testutil::random_budgets(rng, 3);
    const ReceiverBank w = mmse_receivers(PowerAllocation{p}, ch, prm);
    CHECK((w.weights.colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    const RealVector g = uplink_sinr(PowerAllocation{p}, w, ch, prm);
    for (int k = 0; k < 3; ++k) CHECK(rel(g[k], mmse_sinr(k, p, ch, prm)) <= 1e-8);
    for (int r = 0; r < 5; ++r) {
      const ReceiverBank other{rng.cn_matrix(3, 3)};
      const RealVector go = uplink_sinr(PowerAllocation{p}, other, ch, prm);
      CHECK((go.array() <= g.array() * (1.0 + 1e-10)).all());
    }
  }
  CHECK_THROWS_AS(mmse_receivers(PowerAllocation{-RealVector::Ones(3)}, fixture_channels().first_antennas(3), prm),
                  DomainError);
}

TEST_CASE("power fixed point") {
  InterferenceTerms one{RealMatrix::Zero(1, 1), RealVector::Constant(1, 0.2)};
  CHECK(power_fixed_point(4.0, one).watts[0] == doctest::Approx(0.05).epsilon(1e-14));

  InterferenceTerms two{RealMatrix(2, 2), RealVector::Constant(2, 0.1)};
  two.cross << 0.0, 0.5, 0.5, 0.0;
  const PowerAllocation p = power_fixed_point(2.0, two);
  CHECK(p.watts[0] == doctest::Approx(0.1 / 1.5).epsilon(1e-12));
  CHECK(p.watts[1] == doctest::Approx(0.1 / 1.5).epsilon(1e-12));
  CHECK_THROWS_AS(power_fixed_point(0.5, two), InfeasibleError);
  CHECK_THROWS_AS(power_fixed_point(0.4, two), InfeasibleError);

  // theta p -> noise as theta grows.
  const PowerAllocation far = power_fixed_point(1e9, two);
  CHECK(rel(1e9 * far.watts[0], 0.1) <= 1e-8);

  testutil::Rng rng(4);
  const SystemParams prm;
  for (int t = 0; t < 100; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 3, 3);
    const ReceiverBank w{rng.cn_matrix(3, 3)};
    const InterferenceTerms terms = interference_terms(w, ch, prm);
    const double floor = spectral_radius(NonNegMatrix(terms.cross));
    const double theta = floor + rng.uniform(0.01, 3.0);
    const PowerAllocation q = power_fixed_point(theta, terms);
    CHECK((q.watts.array() > 0.0).all());
    const RealVector g = uplink_sinr(q, w, ch, prm);
    CHECK((g.array() * theta - 1.0).abs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("alternating uplink solve") {
  testutil::Rng rng(13);
  const SystemParams prm;
  for (int t = 0; t < 40; ++t) {
    const int k = rng.integer(2, 4);
    const ChannelSet ch = testutil::random_channels(rng, 4, k);
    const RealVector b = testutil::random_budgets(rng, k);
    const UplinkSolution s = solve_ul_for_budgets(b, 0.5, ch, prm);

    for (std::size_t i = 1; i < s.trace.size(); ++i) {
      CHECK(s.trace[i] <= s.trace[i - 1] * (1.0 + 1e-9));
    }
    const RealVector g = uplink_sinr(s.powers, s.receivers, ch, prm);
    CHECK((g.array() / s.gamma - 1.0).abs().maxCoeff() <= 1e-7);
    CHECK(rel(s.powers.watts[s.k_star], b[s.k_star]) <= 1e-7);

    // The receivers are MMSE for the final powers.
    for (int j = 0; j < k; ++j) CHECK(rel(g[j], mmse_sinr(j, s.powers.watts, ch, prm)) <= 1e-5);

    // Any fixed receiver bank does no better.
    for (int r = 0; r < 5; ++r) {
      const UplinkSolution fixed =
          balance_value_and_powers(ReceiverBank{rng.cn_matrix(4, k)}, b, 0.5, ch, prm);
      CHECK(fixed.gamma <= s.gamma * (1.0 + 1e-6));
    }

    // Same optimum from a different starting point.
    UplinkOptions opts;
    opts.initial_receivers = ReceiverBank{rng.cn_matrix(4, k)};
    const UplinkSolution other = solve_ul_for_budgets(b, 0.5, ch, prm, opts);
    CHECK(rel(other.gamma, s.gamma) <= 1e-6);
  }
}

TEST_CASE("noise conventions agree") {
  testutil::Rng rng(17);
  const SystemParams prm;
  for (int t = 0; t < 40; ++t) {
    const ChannelSet ch = testutil::random_channels(rng, 3, 3);
    const RealVector b = testutil::random_budgets(rng, 3);
    const double tau = rng.uniform(0.05, 0.95);
    UplinkOptions opts;
    const UplinkSolution pw = solve_ul_for_budgets(b, tau, ch, prm, opts);
    opts.convention = NoiseConvention::kEnergyDomain;
    const UplinkSolution en = solve_ul_for_budgets(b, tau, ch, prm, opts);
    CHECK(rel(pw.gamma, en.gamma) <= 1e-8);
    CHECK((pw.powers.watts - en.powers.watts).norm() <= 1e-7 * pw.powers.watts.norm());
  }
}

TEST_CASE("uplink degenerate inputs") {
  const ChannelSet ch = fixture_channels();
  const SystemParams prm;
  RealVector b = RealVector::Constant(4, 5e-4);
  b[2] = 0.0;
  CHECK_THROWS_AS(solve_ul_for_budgets(b, 0.5, ch, prm), DegenerateError);
  ReceiverBank w{ch.uplink.colwise().normalized()};
  w.weights.col(0).setZero();
  CHECK_THROWS_AS(interference_terms(w, ch, prm), DegenerateError);
  CHECK_THROWS_AS(balance_value_and_powers(ReceiverBank{ch.uplink}, RealVector::Constant(4, 1e-3),
                                           1.0, ch, prm),
                  DomainError);
}
