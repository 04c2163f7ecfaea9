#pragma once

#include "wpcn/channel.hpp"
#include "wpcn/system.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace testutil {

using wpcn::ComplexMatrix;
using wpcn::ComplexVector;
using wpcn::RealMatrix;
using wpcn::RealVector;

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  std::complex<double> cn() {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    return {n(gen_), n(gen_)};
  }
  ComplexMatrix cn_matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * cn();
    }
    return m;
  }
  RealMatrix nonneg(Eigen::Index n, double zero_prob = 0.0) {
    RealMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = uniform() < zero_prob ? 0.0 : uniform();
    }
    return m;
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Reciprocal channels with per-entry variance `scale^2`, about the size of
/// 1-3 m links in the default path-loss model.
inline wpcn::ChannelSet random_channels(Rng& rng, Eigen::Index m, Eigen::Index k,
                                        double scale = 0.02) {
  wpcn::ChannelSet ch;
  ch.downlink = rng.cn_matrix(m, k, scale);
  ch.uplink = ch.downlink;
  return ch;
}

/// Budgets with the magnitude of the fixture's (fractions of a mW).
inline RealVector random_budgets(Rng& rng, Eigen::Index k) {
  RealVector b(k);
  for (Eigen::Index i = 0; i < k; ++i) b[i] = rng.uniform(0.2e-3, 1e-3);
  return b;
}

}  // namespace testutil
