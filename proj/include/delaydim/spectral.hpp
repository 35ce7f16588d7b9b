#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaydim/history.hpp"

namespace delaydim {

/// Dirichlet Laplacian on (0, pi): -Delta e_k = k^2 e_k, e_k = sqrt(2/pi) sin(k x).
struct LaplacianSpectrum {
  std::vector<double> eigenvalues;
  std::size_t modes() const { return eigenvalues.size(); }
};

LaplacianSpectrum laplacian_spectrum(std::size_t modes);

struct CharacteristicRoot {
  std::complex<double> lambda;
  std::size_t mode = 0;  // 1-based spatial mode, 0 when not attached to a mode
  int branch = 0;
  double residual = 0.0;
};

struct BranchFailure {
  std::size_t mode = 0;
  int branch = 0;
  std::string reason;
};

struct RootSearch {
  std::vector<CharacteristicRoot> roots;  // sorted by decreasing real part
  std::vector<BranchFailure> failures;
};

/// lambda + a + sigma e^{-lambda tau}
std::complex<double> characteristic_function(std::complex<double> lambda, double a, double sigma,
                                             double tau);

/// Roots of lambda + a + sigma e^{-lambda tau} = 0 seeded by
/// lambda = -a + W_b(-sigma tau e^{a tau}) / tau for b in [-n_branches, n_branches - 1]
/// (a conjugation-closed range), each polished by Newton and certified by its
/// residual. Branches that fail are reported, not thrown.
RootSearch characteristic_roots(double a, double sigma, double tau, int n_branches,
                                std::size_t mode = 0);

struct DelayParams {
  double mu = 1.0;
  double sigma = 0.0;
  double tau = 1.0;
};

/// Solution semigroup S(t) of the linear delayed heat equation
///   v' = Delta v - mu v - sigma v(t - tau)
/// on history segments. One grid step integrates the local term exactly and
/// the delayed term through a cubic interpolant of the four oldest grid
/// values, so the map depends on the segment alone and S(t+s) = S(t) S(s)
/// holds exactly on the grid.
class LinearDelaySemigroup {
 public:
  LinearDelaySemigroup(std::vector<double> eigenvalues, DelayParams params, std::size_t delay_steps);

  void advance(HistorySegment& seg) const;
  HistorySegment apply(const HistorySegment& seg, std::size_t steps) const;
  HistorySegment apply(double t, const HistorySegment& seg) const;

  std::size_t delay_steps() const { return delay_steps_; }

 private:
  std::vector<double> eigenvalues_;
  DelayParams params_;
  std::size_t delay_steps_;
  std::vector<double> decay_;    // per mode e^{-a h}
  std::vector<double> weights_;  // per mode, 4 delayed-node weights
};

HistorySegment semigroup_S(double t, const HistorySegment& seg, const LaplacianSpectrum& spectrum,
                           DelayParams params);

struct EstimationMeta {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t delay_steps = 0;
  double horizon = 0.0;  // 5 tau
  std::string K_source = "sampled";
  std::string M_source = "sampled";
  double K_sampled = 0.0;
  double M_sampled = 0.0;
  std::size_t K_argmax_sample = 0;
  double K_argmax_t = 0.0;
  std::size_t M_argmax_sample = 0;
  double M_argmax_t = 0.0;
};

struct SpectralModel {
  std::vector<double> eigenvalues;
  DelayParams params;
  int n_branches = 0;
  std::vector<CharacteristicRoot> roots;  // all modes, decreasing real part
  std::vector<BranchFailure> failures;
  std::vector<double> rho;                // distinct real parts, decreasing
  std::vector<std::size_t> multiplicity;
  std::size_t cutoff_index = 1;
  std::size_t k_m = 0;
  double K = 1.0;
  double M = 1.0;
  double gap = 0.0;  // rho_1 - rho_m
  EstimationMeta estimation;

  double rho1() const { return rho.front(); }
  double rhom() const { return rho[cutoff_index - 1]; }
  /// Roots spanning the unstable part X^U: real part >= rho_m.
  std::vector<CharacteristicRoot> retained_roots() const;
};

struct ModelOptions {
  int n_branches = 8;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  std::size_t delay_steps = 50;  // grid used for the K, M estimates
  std::optional<double> K_override;
  std::optional<double> M_override;
};

/// Aggregates the roots of every spatial mode, groups equal real parts
/// (tolerance 1e-8) into rho_i with multiplicities, and estimates the
/// dichotomy constants K, M as sampled suprema over random unit histories
/// and t in {0, h, ..., 5 tau}. Throws ConfigError when rho_m >= 0.
SpectralModel build_model(const LaplacianSpectrum& spectrum, double mu, double sigma, double tau,
                          std::size_t cutoff_index, const ModelOptions& options = {});

/// Spectral projection onto X^U along X^S for a fixed segment grid.
///
/// For each retained root lambda of mode k the coefficient is read through the
/// adjoint functional
///   b_lambda(phi) = phi(0) - sigma int_{-tau}^0 e^{-lambda (xi + tau)} phi(xi) d xi
/// (trapezoid rule on the grid). The coefficients solve G c = b with the
/// discrete Gram matrix G_{lambda nu} = b_lambda(e^{nu theta}); its diagonal is
/// 1 - sigma tau e^{-lambda tau} exactly and its off-diagonal entries vanish as
/// the grid is refined, so P is idempotent to rounding on every grid.
class SpectralProjector {
 public:
  SpectralProjector(const SpectralModel& model, double tau, std::size_t delay_steps);

  HistorySegment project(const HistorySegment& seg) const;
  HistorySegment complement(const HistorySegment& seg) const;

 private:
  struct ModeBlock {
    std::size_t mode = 0;  // 0-based
    std::vector<std::complex<double>> lambdas;
    std::vector<std::complex<double>> adjoint;  // r x points, includes quadrature weights
    std::vector<std::complex<double>> basis;    // r x points, e^{lambda theta_i}
    std::vector<std::complex<double>> gram_inv;  // r x r
  };

  double tau_;
  std::size_t delay_steps_;
  std::size_t modes_;
  std::vector<ModeBlock> blocks_;
};

HistorySegment project_P(const HistorySegment& seg, const SpectralModel& model);

/// Random smooth history with unit norm; sample `index` of the stream `seed`.
HistorySegment random_unit_history(std::uint64_t seed, std::size_t index, double tau,
                                   std::size_t delay_steps, std::size_t modes);

}  // namespace delaydim
