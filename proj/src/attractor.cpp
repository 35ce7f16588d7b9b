#include "delaydim/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>

#include "delaydim/bound.hpp"
#include "delaydim/errors.hpp"
#include "delaydim/parallel.hpp"

namespace delaydim {

namespace {

constexpr std::uint64_t kInitialTag = 0x1b17;
constexpr std::uint64_t kPairTag = 0x5a1e;

std::size_t grid_steps(double t, double h, const char* what) {
  const double q = t / h;
  const double n = std::round(q);
  if (!(t >= 0.0) || std::abs(q - n) > 1e-9 * std::max(1.0, q)) {
    throw ConfigError(std::string(what) + " must be a nonnegative multiple of model.h");
  }
  return static_cast<std::size_t>(n);
}

bool all_zero(const std::vector<std::vector<double>>& g) {
  for (const auto& row : g) {
    for (double v : row) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

// Initial history number `index` inside the ball of radius `radius`: even
// indices are constant in theta, odd ones smooth with random phases.
HistorySegment initial_history(std::uint64_t seed, std::size_t index, double radius, double tau,
                               std::size_t delay_steps, std::size_t modes) {
  std::seed_seq seq{seed, kInitialTag, static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = radius * unit(rng);
  if (index % 2 == 1) {
    return scale * random_unit_history(seed ^ kInitialTag, index, tau, delay_steps, modes);
  }
  std::normal_distribution<double> normal;
  std::vector<double> v(modes);
  double n2 = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    n2 += x * x;
  }
  HistorySegment seg(tau, delay_steps, modes);
  const double s = n2 > 0.0 ? scale / std::sqrt(n2) : 0.0;
  for (std::size_t i = 0; i < seg.points(); ++i) {
    for (std::size_t k = 0; k < modes; ++k) seg(i, k) = s * v[k];
  }
  return seg;
}

double point_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::size_t NoiseRealization::index_of(double t, double h) const {
  const double shift = std::round(t / h);
  if (shift < -static_cast<double>(origin)) throw ConfigError("time lies before the noise window");
  return static_cast<std::size_t>(static_cast<double>(origin) + shift);
}

NoiseRealization make_realization(const ModelConfig& cfg, std::uint64_t seed, double past,
                                  double future) {
  NoiseRealization out{NoiseField(cfg.modes), 0, seed, past, future};
  const std::size_t lag = cfg.delay_steps();
  const std::size_t past_steps = grid_steps(past, cfg.h, "pullback horizon");
  const std::size_t future_steps = grid_steps(future, cfg.h, "forward time");
  out.origin = past_steps + lag;
  if (cfg.g_coeffs.empty() || all_zero(cfg.g_coeffs)) return out;
  const WienerPath w = sample_wiener(seed, cfg.g_coeffs.size(), cfg.h, out.origin + future_steps + 1);
  out.field = NoiseField(ou_path(w, cfg.mu, StationaryInit{}), cfg.g_coeffs, cfg.modes);
  return out;
}

std::vector<double> encode(const HistorySegment& seg) {
  return {seg.data().begin(), seg.data().end()};
}

HistorySegment decode(std::span<const double> point, double tau, std::size_t delay_steps,
                      std::size_t modes) {
  HistorySegment seg(tau, delay_steps, modes);
  if (point.size() != seg.data().size()) {
    throw ConfigError("decode: point dimension does not match (delay_steps + 1) * modes");
  }
  std::copy(point.begin(), point.end(), seg.data().begin());
  return seg;
}

HistorySegment decode(const PointCloud& cloud, std::size_t i) {
  return decode(cloud.point(i), cloud.tau, cloud.delay_steps, cloud.modes);
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  auto directed = [](const PointSet& x, const PointSet& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.count(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < y.count(); ++j) best = std::min(best, point_dist(x.point(i), y.point(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

PointCloud pullback_sample(const ModelConfig& cfg, const NoiseRealization& noise,
                           const PullbackOptions& options) {
  if (options.horizons.empty()) throw ConfigError("pullback: need at least one horizon");
  if (options.n_initial < 2) throw ConfigError("pullback: n_initial must be at least 2");
  for (std::size_t i = 1; i < options.horizons.size(); ++i) {
    if (!(options.horizons[i] > options.horizons[i - 1])) {
      throw ConfigError("pullback: horizons must be strictly increasing");
    }
  }
  const DelayRandomPDE pde(cfg);
  const std::size_t lag = pde.delay_steps();
  const double T_max = options.horizons.back();
  const std::size_t max_steps = grid_steps(T_max, cfg.h, "pullback horizon");
  if (max_steps + lag > noise.origin) throw ConfigError("pullback: noise path starts too late");

  PointCloud cloud;
  cloud.dim = (lag + 1) * cfg.modes;
  cloud.seed = noise.seed;
  cloud.tau = cfg.tau;
  cloud.delay_steps = lag;
  cloud.modes = cfg.modes;
  cloud.horizon = T_max;
  cloud.noise_future = noise.future;
  cloud.init_radius = options.init_radius;
  if (cloud.init_radius < 0.0) {
    const double r_hat = noise.field.r(noise.origin - max_steps);
    cloud.init_radius = std::max(1.0, options.c + (options.c + 1.0) * r_hat);
  }

  std::vector<double> previous;
  for (double T : options.horizons) {
    const std::size_t steps = grid_steps(T, cfg.h, "pullback horizon");
    std::vector<double> points(options.n_initial * cloud.dim);
    parallel_for(options.n_initial, options.workers, [&](std::size_t i) {
      const HistorySegment phi =
          initial_history(noise.seed, i, cloud.init_radius, cfg.tau, lag, cfg.modes);
      const HistorySegment out = pde.evolve_rds(noise.field, noise.origin - steps, phi, steps);
      for (double v : out.data()) {
        if (!std::isfinite(v)) throw NumericalError("pullback: non-finite cloud point");
      }
      std::copy(out.data().begin(), out.data().end(), points.begin() + static_cast<std::ptrdiff_t>(i * cloud.dim));
    });
    HorizonStats stats;
    stats.horizon = T;
    const PointSet current{points, cloud.dim};
    stats.diameter = exact_diameter(current);
    if (!previous.empty()) stats.hausdorff_to_previous = hausdorff_distance(current, {previous, cloud.dim});
    cloud.horizons.push_back(stats);
    previous = std::move(points);
  }
  cloud.points = std::move(previous);
  return cloud;
}

double estimate_absorbing_radius(const ModelConfig& cfg, std::uint64_t seed, double T,
                                 double burn_in) {
  if (!(burn_in >= 0.0 && burn_in < T)) throw ConfigError("absorbing radius: need 0 <= burn_in < T");
  const NoiseRealization noise = make_realization(cfg, seed, 0.0, T);
  const DelayRandomPDE pde(cfg);
  HistorySegment psi(cfg.tau, pde.delay_steps(), cfg.modes);
  for (std::size_t i = 0; i < psi.points(); ++i) psi(i, 0) = 1.0;
  double sup = 0.0;
  IntegrateOptions opts;
  opts.observer = [&](double t, std::span<const double> v) {
    if (t + 1e-12 < burn_in) return;
    double s = 0.0;
    for (double x : v) s += x * x;
    sup = std::max(sup, std::sqrt(s));
  };
  pde.integrate_v(noise.field, noise.origin, psi, grid_steps(T, cfg.h, "absorbing-radius run"), opts);
  return 1.5 * sup;
}

double squeeze_rhs_p(const SqueezeConstants& k, double t, double int_R) {
  return k.M * std::exp((k.M * k.L_f + k.rho1) * t + int_R);
}

double squeeze_rhs_q(const SqueezeConstants& k, double t, double int_R, double int_R2) {
  const double gap = k.rho1 - k.rhom;
  const double growth = (k.M * k.L_f + k.rho1) * t;
  return k.K * std::exp(k.rhom * t) +
         k.K * k.M / std::sqrt(2.0 * gap) * std::exp(growth + k.M * int_R + int_R2) +
         k.K * k.M * k.L_f * std::exp(growth + k.M * int_R) / gap;
}

SqueezeReport verify_squeezing(const ModelConfig& cfg, const NoiseRealization& noise,
                               const PointCloud& cloud, const SpectralModel& model,
                               const SqueezeConstants& constants, double t0, std::size_t n_pairs,
                               std::uint64_t seed, unsigned workers) {
  const std::size_t n = cloud.count();
  if (n < 2) throw ConfigError("verify_squeezing: cloud needs at least two points");
  if (n_pairs > n * (n - 1) / 2) throw ConfigError("verify_squeezing: more pairs requested than exist");
  if (!(constants.rho1 > constants.rhom)) throw ConfigError("verify_squeezing: rho_1 must exceed rho_m");
  const DelayRandomPDE pde(cfg);
  if (cloud.delay_steps != pde.delay_steps() || cloud.modes != cfg.modes) {
    throw ConfigError("verify_squeezing: cloud grid does not match the model grid");
  }
  const std::size_t steps = grid_steps(t0, cfg.h, "t0");

  SqueezeReport rep;
  rep.t0 = t0;
  rep.constants = constants;
  if (noise.field.is_zero()) {
    const double R0 = R_of(0.0, constants.F_coeffs, constants.c);
    rep.int_R = R0 * t0;
    rep.int_R2 = R0 * R0 * t0;
  } else {
    const auto& ou = noise.field.ou();
    rep.int_R = integrate_R(ou, noise.origin, steps, constants.F_coeffs, constants.c, 1);
    rep.int_R2 = integrate_R(ou, noise.origin, steps, constants.F_coeffs, constants.c, 2);
  }
  const double rhs_p = squeeze_rhs_p(constants, t0, rep.int_R);
  const double rhs_q = squeeze_rhs_q(constants, t0, rep.int_R, rep.int_R2);

  // distinct unordered pairs, drawn without replacement
  std::seed_seq seq{seed, kPairTag};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  rep.pairs.resize(n_pairs);
  for (auto& pair : rep.pairs) {
    std::size_t a = 0, b = 0;
    do {
      a = pick(rng);
      b = pick(rng);
      if (a > b) std::swap(a, b);
    } while (a == b || !seen.insert({a, b}).second);
    pair.first = a;
    pair.second = b;
  }

  const SpectralProjector projector(model, cfg.tau, pde.delay_steps());
  parallel_for(n_pairs, workers, [&](std::size_t i) {
    SqueezePair& pair = rep.pairs[i];
    const HistorySegment phi = decode(cloud, pair.first);
    const HistorySegment psi = decode(cloud, pair.second);
    pair.delta0 = distance(phi, psi);
    const HistorySegment diff = pde.evolve_rds(noise.field, noise.origin, phi, steps) -
                                pde.evolve_rds(noise.field, noise.origin, psi, steps);
    const HistorySegment p = projector.project(diff);
    pair.p_norm = p.norm();
    pair.q_norm = (diff - p).norm();
    pair.rhs_p = rhs_p * pair.delta0;
    pair.rhs_q = rhs_q * pair.delta0;
    // relative slack of 1e-12 absorbs rounding when both sides vanish together
    pair.pass_p = pair.p_norm <= pair.rhs_p * (1.0 + 1e-12) + 1e-15 * pair.delta0;
    pair.pass_q = pair.q_norm <= pair.rhs_q * (1.0 + 1e-12) + 1e-15 * pair.delta0;
  });

  std::size_t ok_p = 0, ok_q = 0, ok_both = 0;
  for (const auto& pair : rep.pairs) {
    ok_p += pair.pass_p;
    ok_q += pair.pass_q;
    ok_both += pair.pass_p && pair.pass_q;
  }
  const double total = std::max<double>(1.0, static_cast<double>(n_pairs));
  rep.rate_p = static_cast<double>(ok_p) / total;
  rep.rate_q = static_cast<double>(ok_q) / total;
  rep.rate_both = static_cast<double>(ok_both) / total;
  rep.caveat =
      "cloud points approximate the random attractor; K and M are sampled suprema, so the "
      "right-hand sides are audited, not certified";
  return rep;
}

}  // namespace delaydim
