#include "wpcn/channel.hpp"

#include "wpcn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace wpcn {

void ChannelSet::validate() const {
  if (downlink.rows() < 1 || downlink.cols() < 1) throw DomainError("empty channel matrix");
  if (uplink.rows() != downlink.rows() || uplink.cols() != downlink.cols()) {
    throw DomainError("uplink and downlink channel shapes differ");
  }
  if (!downlink.allFinite() || !uplink.allFinite()) {
    throw DomainError("channel matrix has a non-finite entry");
  }
}

ChannelSet ChannelSet::first_antennas(Eigen::Index m) const {
  if (m < 1 || m > antennas()) throw DomainError("antenna count out of range");
  return {downlink.topRows(m), uplink.topRows(m)};
}

void ChannelModelConfig::validate() const {
  if (!(ref_loss > 0.0)) throw DomainError("reference loss A0 must be positive");
  if (!(ref_distance > 0.0)) throw DomainError("reference distance d0 must be positive");
  if (!(path_loss_exponent >= 0.0)) throw DomainError("path-loss exponent must be >= 0");
  if (!(rician_factor >= 0.0)) throw DomainError("Rician factor must be >= 0");
  if (!std::isfinite(spacing_over_wavelength)) throw DomainError("antenna spacing must be finite");
  if (user_angles.empty()) throw DomainError("at least one user is required");
  if (user_angles.size() != user_distances.size()) {
    throw DomainError("user_angles and user_distances must have the same length");
  }
  for (double d : user_distances) {
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("user distances must be positive");
  }
  for (double a : user_angles) {
    if (!std::isfinite(a)) throw DomainError("user angles must be finite");
  }
}

double path_loss(double distance, const ChannelModelConfig& cfg) {
  if (!(distance > 0.0)) throw DomainError("distance must be positive");
  return cfg.ref_loss * std::pow(distance / cfg.ref_distance, -cfg.path_loss_exponent);
}

ComplexVector steering_vector(Eigen::Index antennas, double angle, double spacing_over_wavelength) {
  const double theta = -2.0 * std::numbers::pi * spacing_over_wavelength * std::sin(angle);
  ComplexVector a(antennas);
  for (Eigen::Index m = 0; m < antennas; ++m) {
    a[m] = std::polar(1.0, static_cast<double>(m) * theta);
  }
  return a;
}

ComplexGaussianSource::ComplexGaussianSource(std::uint64_t seed) : engine_(seed) {}

double ComplexGaussianSource::uniform_open() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::complex<double> ComplexGaussianSource::next() {
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u1) / sqrt(2)
  const double phase = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phase), r * std::sin(phase)};
}

ChannelSet sample_channels(Eigen::Index antennas, const ChannelModelConfig& cfg) {
  if (antennas < 1) throw DomainError("antenna count must be >= 1");
  cfg.validate();
  const auto users = static_cast<Eigen::Index>(cfg.user_angles.size());
  const double los_weight = std::sqrt(cfg.rician_factor / (1.0 + cfg.rician_factor));
  const double nlos_weight = std::sqrt(1.0 / (1.0 + cfg.rician_factor));

  ComplexGaussianSource noise(cfg.seed);
  ComplexMatrix g(antennas, users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const ComplexVector los = steering_vector(antennas, cfg.user_angles[uk], cfg.spacing_over_wavelength);
    const double amplitude = std::sqrt(path_loss(cfg.user_distances[uk], cfg));
    for (Eigen::Index m = 0; m < antennas; ++m) {
      g(m, k) = amplitude * (los_weight * los[m] + nlos_weight * noise.next());
    }
  }
  return {g, g};
}

ChannelSet fixture_channels() {
  using C = std::complex<double>;
  ComplexMatrix g(6, 4);
  // The (1,2) entry carries five significant digits; reproduced verbatim.
  g << C(0.0082, 0.0085), C(0.01371, -0.0022), C(0.0133, 0.0077), C(0.0081, -0.0004),
      C(0.0021, 0.0110), C(0.0383, 0.0125), C(0.0162, 0.0061), C(0.0113, -0.0051),
      C(-0.0246, -0.0104), C(0.0172, 0.0271), C(0.0236, 0.0125), C(0.0003, -0.0136),
      C(-0.0184, -0.0174), C(-0.0364, 0.0023), C(0.0194, 0.0031), C(-0.0131, -0.0110),
      C(0.0411, 0.0017), C(-0.0371, -0.0106), C(-0.0032, -0.0064), C(-0.0161, 0.0009),
      C(-0.0002, 0.0516), C(-0.0172, -0.0160), C(0.0202, -0.0014), C(-0.0151, 0.0075);
  return {g, g};
}

void write_channels_csv(std::ostream& out, const ComplexMatrix& channels) {
  out << "antenna";
  for (Eigen::Index k = 0; k < channels.cols(); ++k) {
    out << ",re_" << (k + 1) << ",im_" << (k + 1);
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index m = 0; m < channels.rows(); ++m) {
    out << (m + 1);
    for (Eigen::Index k = 0; k < channels.cols(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.12g,%.12g", channels(m, k).real(), channels(m, k).imag());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace wpcn
