#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace delaydim {

/// Discretized m-channel Wiener path. increments are stored step-major:
/// increments[n * channels + j] is the increment of channel j over step n.
struct WienerPath {
  std::uint64_t seed = 0;
  std::size_t channels = 0;
  double h = 0.0;
  std::vector<double> increments;

  std::size_t steps() const { return channels == 0 ? 0 : increments.size() / channels; }
  double increment(std::size_t n, std::size_t j) const { return increments[n * channels + j]; }

  /// Increments of the shifted path theta_{offset*h} omega.
  WienerPath shifted(std::size_t offset) const;
};

/// Draws `steps` N(0, h) increments per channel. Each channel has its own
/// stream derived from (seed, channel), so the path is a pure function of
/// its arguments.
WienerPath sample_wiener(std::uint64_t seed, std::size_t channels, double h, std::size_t steps);

struct StationaryInit {};
using OUInit = std::variant<StationaryInit, std::vector<double>>;

/// Sampled Ornstein-Uhlenbeck processes dz_j + mu z_j dt = d omega_j.
/// values has steps+1 rows (row 0 is the initial state).
struct OUProcessPath {
  double mu = 0.0;
  double h = 0.0;
  std::size_t channels = 0;
  std::vector<double> values;
  std::vector<double> r_values;  // r_n = sum_j z_j(t_n)^2

  std::size_t size() const { return r_values.size(); }
  double z(std::size_t n, std::size_t j) const { return values[n * channels + j]; }
  std::span<const double> row(std::size_t n) const {
    return {values.data() + n * channels, channels};
  }
};

/// Exact one-step OU recursion driven by the increments of `w`:
///   z_{n+1} = e^{-mu h} z_n + xi_n,  xi_n = dW_n * sqrt((1 - e^{-2 mu h}) / (2 mu h)).
/// The stationary initial draw uses a stream separate from the increments.
OUProcessPath ou_path(const WienerPath& w, double mu, const OUInit& init);

struct TemperednessReport {
  std::size_t window = 0;
  double rho = 0.0;                 // smallest rho with r_n <= rho e^{mu t_n / 2}
  double violation_fraction = 0.0;  // fraction of r_n > r_0 e^{mu t_n / 2}
};

TemperednessReport temperedness_check(const OUProcessPath& z, std::size_t window);

/// Spatial noise z(theta_t omega) = sum_j g_j z_j(theta_t omega) in the
/// orthonormal sine basis. A field without channels is identically zero and
/// answers every step index.
class NoiseField {
 public:
  explicit NoiseField(std::size_t modes);
  NoiseField(OUProcessPath ou, std::vector<std::vector<double>> g_coeffs, std::size_t modes);

  std::size_t modes() const { return modes_; }
  bool is_zero() const { return zero_; }
  /// Number of sampled steps; zero fields report SIZE_MAX.
  std::size_t size() const;
  double h() const { return ou_.h; }
  const OUProcessPath& ou() const { return ou_; }
  const std::vector<std::vector<double>>& g_coeffs() const { return g_; }

  void z_coeffs(std::size_t n, std::span<double> out) const;
  /// Coefficients of Laplacian z: -k^2 times the z coefficient of mode k.
  void laplacian_coeffs(std::size_t n, std::span<double> out) const;
  double r(std::size_t n) const { return zero_ ? 0.0 : ou_.r_values[n]; }

 private:
  std::size_t modes_;
  bool zero_;
  OUProcessPath ou_;
  std::vector<std::vector<double>> g_;  // channels x modes, zero padded
};

}  // namespace delaydim
