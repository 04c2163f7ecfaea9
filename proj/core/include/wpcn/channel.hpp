#pragma once

#include "wpcn/perron.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace wpcn {

/// Downlink channels g_k and uplink channels h_k, one column per user.
struct ChannelSet {
  ComplexMatrix downlink;  // M x K
  ComplexMatrix uplink;    // M x K

  Eigen::Index antennas() const noexcept { return downlink.rows(); }
  Eigen::Index users() const noexcept { return downlink.cols(); }

  /// Throws DomainError on empty/mismatched shapes or non-finite entries.
  void validate() const;

  /// Channels seen by the first `m` antennas only.
  ChannelSet first_antennas(Eigen::Index m) const;
};

struct ChannelModelConfig {
  double ref_loss = 1e-3;          // A0
  double ref_distance = 1.0;       // d0 [m]
  double path_loss_exponent = 3.0; // alpha
  double rician_factor = 3.0;      // K_R
  double spacing_over_wavelength = 0.5;
  std::vector<double> user_angles;     // [rad]
  std::vector<double> user_distances;  // [m]
  std::uint64_t seed = 0;

  /// Throws DomainError when any parameter is out of range.
  void validate() const;
};

/// Distance-dependent loss A0 * (d/d0)^(-alpha).
double path_loss(double distance, const ChannelModelConfig& cfg);

/// Uniform-linear-array response [1, e^{j theta}, ..., e^{j(M-1) theta}] with
/// theta = -2 pi (d_an/lambda) sin(angle).
ComplexVector steering_vector(Eigen::Index antennas, double angle, double spacing_over_wavelength);

/// Rician draw per user: sqrt(L_k) (sqrt(K_R/(1+K_R)) a(phi_k) +
/// sqrt(1/(1+K_R)) n_k), n_k ~ CN(0, I). The uplink equals the downlink
/// (reciprocity). Deterministic in cfg.seed on every platform.
ChannelSet sample_channels(Eigen::Index antennas, const ChannelModelConfig& cfg);

/// The 6-antenna, 4-user reference realization (same matrix for both links).
ChannelSet fixture_channels();

/// One row per antenna, re/im interleaved per user, with a header row.
void write_channels_csv(std::ostream& out, const ComplexMatrix& channels);

/// Portable CN(0, 1) sampler: mt19937_64 feeding a Box-Muller transform, so
/// sequences do not depend on the standard library's distributions.
class ComplexGaussianSource {
 public:
  explicit ComplexGaussianSource(std::uint64_t seed);
  std::complex<double> next();

 private:
  double uniform_open();
  std::mt19937_64 engine_;
};

}  // namespace wpcn
