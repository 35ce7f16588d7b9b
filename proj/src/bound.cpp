#include "delaydim/bound.hpp"

#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

#include "delaydim/errors.hpp"

namespace delaydim {

double R_of(double r_value, std::span<const double> F_coeffs, double c) {
  const double radius = c + (c + 1.0) * r_value;
  double sum = 0.0;
  double power = 1.0;  // radius^{k-1}, with 0^0 = 1
  for (double a : F_coeffs) {
    sum += std::abs(a) * power;
    power *= radius;
  }
  return sum;
}

double integrate_R(const OUProcessPath& z, std::size_t first, std::size_t steps,
                   std::span<const double> F_coeffs, double c, int power) {
  if (steps == 0) return 0.0;
  if (first + steps >= z.size()) throw ConfigError("integrate_R: window exceeds the noise path");
  auto value = [&](std::size_t n) {
    const double R = R_of(z.r_values[n], F_coeffs, c);
    return power == 2 ? R * R : R;
  };
  double sum = 0.5 * (value(first) + value(first + steps));
  for (std::size_t n = first + 1; n < first + steps; ++n) sum += value(n);
  return sum * z.h;
}

ErgodicAverages ergodic_averages(const OUProcessPath& z, std::span<const double> F_coeffs, double c,
                                 double burn_in) {
  ErgodicAverages out;
  const auto first = static_cast<std::size_t>(std::ceil(burn_in / z.h - 1e-9));
  if (z.size() < first + 2 * out.batches + 1) {
    throw ConfigError("ergodic_averages: path too short for the burn-in and 20 batches");
  }
  const std::size_t span = z.size() - 1 - first;
  const std::size_t per_batch = span / out.batches;
  const std::size_t used = per_batch * out.batches;
  out.averaging_time = static_cast<double>(used) * z.h;

  std::vector<double> mean_R(out.batches);
  std::vector<double> mean_R2(out.batches);
  for (std::size_t b = 0; b < out.batches; ++b) {
    const std::size_t start = first + b * per_batch;
    const double len = static_cast<double>(per_batch) * z.h;
    mean_R[b] = integrate_R(z, start, per_batch, F_coeffs, c, 1) / len;
    mean_R2[b] = integrate_R(z, start, per_batch, F_coeffs, c, 2) / len;
  }
  auto mean_and_stderr = [&](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / (n - 1.0) / n)};
  };
  std::tie(out.ER, out.stderr_R) = mean_and_stderr(mean_R);
  std::tie(out.ER2, out.stderr_R2) = mean_and_stderr(mean_R2);
  out.noisy = out.stderr_R > 0.05 * std::abs(out.ER) || out.stderr_R2 > 0.05 * std::abs(out.ER2);
  return out;
}

void BoundInputs::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("bound: alpha must lie in (0, 2)");
  if (!(rhom < 0.0)) throw ConfigError("bound: rho_m must be negative");
  if (!(rho1 > rhom)) throw ConfigError("bound: rho_1 must exceed rho_m");
  if (k_m == 0) throw ConfigError("bound: k_m must be at least 1");
  if (!(t0 >= 0.0)) throw ConfigError("bound: t0 must be nonnegative");
}

namespace {

ConditionResult condition_for(const BoundInputs& in, double alpha) {
  ConditionResult out;
  const double gap = in.rho1 - in.rhom;
  out.eta = alpha * in.M + 2.0 * in.K + 2.0 * in.K * in.M * in.L_f / gap +
            2.0 * in.K * in.M / std::sqrt(2.0 * gap);
  out.exponent = (in.M * in.L_f + in.rho1 + 2.0 * in.ER + 2.0 * in.ER2) * in.t0;
  out.product = out.eta * std::exp(out.exponent);
  out.margin = 1.0 - out.product;
  out.feasible = out.product < 1.0;
  return out;
}

}  // namespace

ConditionResult check_condition(const BoundInputs& inputs) {
  inputs.validate();
  return condition_for(inputs, inputs.alpha);
}

BoundReport hausdorff_bound(const BoundInputs& inputs) {
  inputs.validate();
  BoundReport rep;
  rep.inputs = inputs;
  const double km = static_cast<double>(inputs.k_m);

  rep.condition = condition_for(inputs, inputs.alpha);
  rep.numerator = -std::log(km) - km * std::log(2.0 + 4.0 / inputs.alpha);
  rep.denominator = std::log(rep.condition.eta) + rep.condition.exponent;
  if (rep.condition.feasible) {
    if (!(rep.denominator < 0.0)) {
      throw ConsistencyError("hausdorff_bound: feasible condition with nonnegative denominator");
    }
    rep.d_bound = rep.numerator / rep.denominator;
  }

  rep.condition_alpha2 = condition_for(inputs, 2.0);
  rep.numerator_alpha2 = -std::log(km) - km * std::log(4.0);
  rep.denominator_alpha2 = std::log(rep.condition_alpha2.eta) + rep.condition_alpha2.exponent;
  if (rep.condition_alpha2.feasible) {
    if (!(rep.denominator_alpha2 < 0.0)) {
      throw ConsistencyError("hausdorff_bound: feasible alpha=2 condition with nonnegative denominator");
    }
    rep.d_bound_alpha2 = rep.numerator_alpha2 / rep.denominator_alpha2;
  }

  rep.notes.push_back("R uses |a_k| so that it majorizes the Lipschitz constant of F");
  rep.notes.push_back("alpha -> 2 variant evaluated with Lambda = k_m");
  return rep;
}

}  // namespace delaydim
