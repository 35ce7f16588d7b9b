#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "delaydim/galerkin.hpp"
#include "delaydim/history.hpp"
#include "delaydim/noise.hpp"

namespace delaydim {

enum class NonlinearityKind { zero, scaled_sine, rational_saturation };

/// Globally Lipschitz delayed nonlinearity with f(0) = 0:
///   zero, L_f sin(u), L_f u / (1 + u^2).
struct DelayedNonlinearity {
  NonlinearityKind kind = NonlinearityKind::zero;
  double lipschitz = 0.0;

  double operator()(double u) const;
  bool is_zero() const { return kind == NonlinearityKind::zero || lipschitz == 0.0; }
};

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_from_string(const std::string& name);

struct ModelConfig {
  double mu = 1.0;
  double sigma = 0.0;
  double tau = 1.0;
  std::vector<double> F_coeffs;  // a_1, ..., a_{2p-1}; empty means F = 0
  DelayedNonlinearity f;
  std::vector<std::vector<double>> g_coeffs;  // noise profiles, one per channel
  std::size_t modes = 8;
  double h = 0.01;
  double blowup_ceiling = 1e6;

  /// tau / h; throws ConfigError unless it is an integer.
  std::size_t delay_steps() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool F_is_zero() const;
};

double evaluate_F(std::span<const double> F_coeffs, double u);

struct Trajectory {
  std::vector<double> times;
  std::vector<HistorySegment> segments;  // filled when IntegrateOptions::store_segments
  HistorySegment terminal;
  std::vector<double> energy;  // ||v(t_n)||^2, n = 0..steps
  std::size_t step_rejections = 0;
};

struct IntegrateOptions {
  bool store_segments = false;
  /// Called with (t_n, v(t_n)) after every step, including t = 0.
  std::function<void(double, std::span<const double>)> observer;
};

/// Spectral Galerkin integrator for the pathwise random delay equation
///   v' = Delta v - mu v - sigma v(t - tau) - sigma z(t - tau)
///        + F(v + z(t)) + f(v(t - tau) + z(t - tau)) + Delta z(t).
/// One step integrates -(k^2 + mu) exactly per mode and the remaining terms
/// explicitly (exponential Euler). Delayed values come from a ring buffer at
/// exact grid offsets.
///
/// Noise indices: `start` is the index of the noise sample at integration
/// time 0. The initial segment needs samples back to start - tau/h.
class DelayRandomPDE {
 public:
  explicit DelayRandomPDE(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  std::size_t delay_steps() const { return delay_steps_; }

  Trajectory integrate_v(const NoiseField& noise, std::size_t start, const HistorySegment& psi,
                         std::size_t steps, const IntegrateOptions& options = {}) const;

  /// Phi(t, theta_start omega, phi) = v_t + z(theta_{t+.} omega) with
  /// v started from psi(xi) = phi(xi) - z(theta_xi omega).
  HistorySegment evolve_rds(const NoiseField& noise, std::size_t start, const HistorySegment& phi,
                            std::size_t steps) const;

  /// Galerkin projection of F(u) for u given by its coefficients.
  void project_F(std::span<const double> u, std::span<double> out) const;

 private:
  void check_noise(const NoiseField& noise, std::size_t start, std::size_t steps) const;

  ModelConfig cfg_;
  std::size_t delay_steps_;
  SineTransform transform_;
  std::vector<double> decay_;  // e^{-(k^2 + mu) h}
  std::vector<double> gain_;   // (1 - e^{-(k^2 + mu) h}) / (k^2 + mu)
};

Trajectory integrate_v(const ModelConfig& cfg, const NoiseField& noise, std::size_t start,
                       const HistorySegment& psi, double T);

HistorySegment evolve_rds(const ModelConfig& cfg, const NoiseField& noise, std::size_t start,
                          const HistorySegment& phi, double t);

struct LipschitzCheck {
  bool precondition_ok = false;
  double radius = 0.0;  // c + (c+1) r
  double sup_v1 = 0.0;
  double sup_v2 = 0.0;
  double R = 0.0;
  double lhs = 0.0;  // ||F(v1) - F(v2)||_H
  double rhs = 0.0;  // R ||v1 - v2||_H
  double ratio = 0.0;
  bool satisfied = false;
};

/// Audits ||F(v1) - F(v2)||_H <= R ||v1 - v2||_H for two fields given by sine
/// coefficients. The precondition is the pointwise bound |v_i(x)| <= c + (c+1) r;
/// when it fails the check is skipped and reported as such.
LipschitzCheck lipschitz_majorant_check(const ModelConfig& cfg, std::span<const double> v1,
                                        std::span<const double> v2, double r_value, double c);

/// Same audit for fields given by point values on a uniform midpoint grid of
/// (0, pi) (any field, e.g. constants); norms by the midpoint rule.
LipschitzCheck lipschitz_majorant_check_values(std::span<const double> F_coeffs,
                                               std::span<const double> u1,
                                               std::span<const double> u2, double r_value, double c);

}  // namespace delaydim
