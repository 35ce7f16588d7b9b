#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaydim/noise.hpp"

namespace delaydim {

/// Majorant of the local Lipschitz constant of F on the ball of radius
/// c + (c+1) r:  R = sum_k |a_k| (c + (c+1) r)^{k-1}, with 0^0 = 1.
/// F_coeffs[0] is a_1.
double R_of(double r_value, std::span<const double> F_coeffs, double c);

struct ErgodicAverages {
  double ER = 0.0;
  double ER2 = 0.0;
  double stderr_R = 0.0;
  double stderr_R2 = 0.0;
  std::size_t batches = 20;
  double averaging_time = 0.0;
  bool noisy = false;  // batch-means stderr above 5% of the mean
};

/// Time averages of R(theta_s omega) and R^2(theta_s omega) over
/// [burn_in, T] (trapezoid rule), with batch-means standard errors.
ErgodicAverages ergodic_averages(const OUProcessPath& z, std::span<const double> F_coeffs, double c,
                                 double burn_in);

/// Trapezoid integral of R along r_values[first .. first + steps].
double integrate_R(const OUProcessPath& z, std::size_t first, std::size_t steps,
                   std::span<const double> F_coeffs, double c, int power = 1);

struct BoundInputs {
  double alpha = 1.0;
  double t0 = 1.0;
  double K = 1.0;
  double M = 1.0;
  double rho1 = -1.0;
  double rhom = -2.0;
  std::size_t k_m = 1;
  double L_f = 0.0;
  double ER = 0.0;
  double ER2 = 0.0;
  double c = 0.0;
  std::vector<double> F_coeffs;

  /// Throws ConfigError on rho1 <= rhom, rhom >= 0, alpha outside (0, 2), k_m = 0.
  void validate() const;
};

struct ConditionResult {
  double eta = 0.0;
  double exponent = 0.0;
  double product = 0.0;  // eta e^{exponent}
  double margin = 0.0;   // 1 - product
  bool feasible = false;
};

/// eta = alpha M + 2K + 2 K M L_f / (rho1 - rhom) + 2 K M / sqrt(2 (rho1 - rhom)),
/// exponent = (M L_f + rho1 + 2 E(R) + 2 E(R^2)) t0, feasible iff eta e^{exponent} < 1.
ConditionResult check_condition(const BoundInputs& inputs);

struct BoundReport {
  BoundInputs inputs;
  ConditionResult condition;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> d_bound;

  // alpha -> 2 variant, with Lambda read as k_m
  ConditionResult condition_alpha2;
  double numerator_alpha2 = 0.0;
  double denominator_alpha2 = 0.0;
  std::optional<double> d_bound_alpha2;

  std::vector<std::string> notes;
};

/// Evaluates the dimension bound
///   d < (-ln k_m - k_m ln(2 + 4/alpha)) / (ln eta + exponent)
/// and its alpha -> 2 limit (-ln k_m - k_m ln 4) / (ln eta_2 + exponent).
/// Throws ConsistencyError if a feasible condition meets a nonnegative
/// denominator.
BoundReport hausdorff_bound(const BoundInputs& inputs);

}  // namespace delaydim
