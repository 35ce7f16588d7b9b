#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "delaydim/geometry.hpp"
#include "delaydim/history.hpp"
#include "delaydim/noise.hpp"
#include "delaydim/solver.hpp"
#include "delaydim/spectral.hpp"

namespace delaydim {

/// One noise sample path laid out on the model grid. Index `origin`
/// corresponds to time 0; the path covers [-past - tau, future].
struct NoiseRealization {
  NoiseField field;
  std::size_t origin = 0;
  std::uint64_t seed = 0;
  double past = 0.0;
  double future = 0.0;

  std::size_t index_of(double t, double h) const;
};

/// Stationary OU noise (drift mu of the model) on [-past - tau, future].
/// Models without noise profiles get an identically zero field.
NoiseRealization make_realization(const ModelConfig& cfg, std::uint64_t seed, double past,
                                  double future);

struct HorizonStats {
  double horizon = 0.0;
  double diameter = 0.0;
  double hausdorff_to_previous = -1.0;  // -1 for the first horizon
};

struct PointCloud {
  std::vector<double> points;  // row-major, count x dim
  std::size_t dim = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  double tau = 0.0;
  std::size_t delay_steps = 0;
  std::size_t modes = 0;
  double init_radius = 0.0;
  double noise_future = 0.0;
  std::vector<HorizonStats> horizons;

  std::size_t count() const { return dim == 0 ? 0 : points.size() / dim; }
  std::span<const double> point(std::size_t i) const { return {points.data() + i * dim, dim}; }
  PointSet as_points() const { return {points, dim}; }
};

std::vector<double> encode(const HistorySegment& seg);
HistorySegment decode(std::span<const double> point, double tau, std::size_t delay_steps,
                      std::size_t modes);
HistorySegment decode(const PointCloud& cloud, std::size_t i);

double hausdorff_distance(const PointSet& a, const PointSet& b);

struct PullbackOptions {
  std::vector<double> horizons;
  std::size_t n_initial = 100;
  /// Radius of the ball the initial histories are drawn from; negative means
  /// max(1, c + (c+1) r) with r read at the start of the longest horizon.
  double init_radius = -1.0;
  double c = 0.0;
  unsigned workers = 1;
};

/// Evolves n_initial histories from time -T to 0 under one noise path, for
/// each horizon T, and returns the time-0 segments of the largest horizon.
/// The same initial histories are used for every horizon; metadata records
/// per-horizon cloud diameters and Hausdorff distances between consecutive
/// horizons.
PointCloud pullback_sample(const ModelConfig& cfg, const NoiseRealization& noise,
                           const PullbackOptions& options);

/// Absorbing-radius estimate: 1.5 times the sup of ||v_t|| over [burn_in, T]
/// along one run started from a unit constant history.
double estimate_absorbing_radius(const ModelConfig& cfg, std::uint64_t seed, double T,
                                 double burn_in);

struct SqueezeConstants {
  double K = 1.0;
  double M = 1.0;
  double L_f = 0.0;
  double rho1 = -1.0;
  double rhom = -2.0;
  double c = 0.0;
  std::vector<double> F_coeffs;
};

struct SqueezePair {
  std::size_t first = 0;
  std::size_t second = 0;
  double delta0 = 0.0;
  double p_norm = 0.0;
  double q_norm = 0.0;
  double rhs_p = 0.0;
  double rhs_q = 0.0;
  bool pass_p = false;
  bool pass_q = false;
};

struct SqueezeReport {
  double t0 = 0.0;
  SqueezeConstants constants;
  double int_R = 0.0;   // int_0^t0 R(theta_s omega) ds
  double int_R2 = 0.0;  // int_0^t0 R^2(theta_s omega) ds
  std::vector<SqueezePair> pairs;
  double rate_p = 0.0;
  double rate_q = 0.0;
  double rate_both = 0.0;
  std::string caveat;
};

/// Right-hand sides of the squeezing estimates at time t for ||phi - psi|| = 1.
double squeeze_rhs_p(const SqueezeConstants& k, double t, double int_R);
double squeeze_rhs_q(const SqueezeConstants& k, double t, double int_R, double int_R2);

/// Evolves n_pairs distinct cloud pairs by Phi(t0, omega, .) on the
/// realization's noise from time 0, splits the difference with the spectral
/// projection, and checks both squeezing inequalities.
SqueezeReport verify_squeezing(const ModelConfig& cfg, const NoiseRealization& noise,
                               const PointCloud& cloud, const SpectralModel& model,
                               const SqueezeConstants& constants, double t0, std::size_t n_pairs,
                               std::uint64_t seed, unsigned workers = 1);

}  // namespace delaydim
