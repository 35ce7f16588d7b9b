#include "delaydim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "delaydim/bound.hpp"
#include "delaydim/errors.hpp"

namespace delaydim {

double DelayedNonlinearity::operator()(double u) const {
  switch (kind) {
    case NonlinearityKind::zero:
      return 0.0;
    case NonlinearityKind::scaled_sine:
      return lipschitz * std::sin(u);
    case NonlinearityKind::rational_saturation:
      return lipschitz * u / (1.0 + u * u);
  }
  return 0.0;
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::zero:
      return "zero";
    case NonlinearityKind::scaled_sine:
      return "scaled_sine";
    case NonlinearityKind::rational_saturation:
      return "rational_saturation";
  }
  return "zero";
}

NonlinearityKind nonlinearity_from_string(const std::string& name) {
  if (name == "zero") return NonlinearityKind::zero;
  if (name == "scaled_sine") return NonlinearityKind::scaled_sine;
  if (name == "rational_saturation") return NonlinearityKind::rational_saturation;
  throw ConfigError("model.f.kind: unknown nonlinearity '" + name + "'");
}

double evaluate_F(std::span<const double> F_coeffs, double u) {
  // Horner on a_1 u + a_2 u^2 + ...
  double acc = 0.0;
  for (auto it = F_coeffs.rbegin(); it != F_coeffs.rend(); ++it) acc = (acc + *it) * u;
  return acc;
}

std::size_t ModelConfig::delay_steps() const {
  if (!(h > 0.0)) throw ConfigError("model.h: time step must be positive");
  if (!(tau > 0.0)) throw ConfigError("model.tau: delay must be positive");
  const double ratio = tau / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "model.tau / model.h = " << ratio << " is not an integer";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

bool ModelConfig::F_is_zero() const {
  return std::all_of(F_coeffs.begin(), F_coeffs.end(), [](double a) { return a == 0.0; });
}

void ModelConfig::validate() const {
  if (!(mu > 0.0)) throw ConfigError("model.mu: must be positive");
  if (!std::isfinite(sigma)) throw ConfigError("model.sigma: must be finite");
  if (modes == 0) throw ConfigError("model.modes: need at least one spatial mode");
  delay_steps();
  if (!F_is_zero()) {
    if (F_coeffs.size() % 2 == 0) {
      throw ConfigError("model.F_coeffs: F must have odd degree (give a_1..a_{2p-1})");
    }
    if (!(F_coeffs.back() < 0.0)) {
      throw ConfigError("model.F_coeffs: leading coefficient must be negative");
    }
    if (F_coeffs.size() > 3) throw ConfigError("model.F_coeffs: degree above 3 (p > 2) not supported");
  }
  if (f.lipschitz < 0.0) throw ConfigError("model.f.L_f: Lipschitz constant must be nonnegative");
  for (const auto& g : g_coeffs) {
    if (g.size() > modes) throw ConfigError("model.g_coeffs: profile longer than model.modes");
  }
  if (!(blowup_ceiling > 0.0)) throw ConfigError("model.blowup_ceiling: must be positive");
}

DelayRandomPDE::DelayRandomPDE(ModelConfig cfg)
    : cfg_(std::move(cfg)),
      delay_steps_(cfg_.delay_steps()),
      transform_(cfg_.modes, dealiased_points(cfg_.modes, std::max<std::size_t>(cfg_.F_coeffs.size(), 1))) {
  cfg_.validate();
  decay_.resize(cfg_.modes);
  gain_.resize(cfg_.modes);
  for (std::size_t k = 0; k < cfg_.modes; ++k) {
    const double wave = static_cast<double>(k + 1);
    const double a = wave * wave + cfg_.mu;
    decay_[k] = std::exp(-a * cfg_.h);
    gain_[k] = -std::expm1(-a * cfg_.h) / a;
  }
}

void DelayRandomPDE::project_F(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = cfg_.modes;
  if (cfg_.F_coeffs.size() <= 1) {
    const double a1 = cfg_.F_coeffs.empty() ? 0.0 : cfg_.F_coeffs[0];
    for (std::size_t k = 0; k < n; ++k) out[k] = a1 * u[k];
    return;
  }
  std::vector<double> values(transform_.points());
  transform_.to_physical(u, values);
  for (double& v : values) v = evaluate_F(cfg_.F_coeffs, v);
  transform_.to_spectral(values, out);
}

void DelayRandomPDE::check_noise(const NoiseField& noise, std::size_t start,
                                 std::size_t steps) const {
  if (noise.modes() != cfg_.modes) throw ConfigError("noise field has the wrong number of modes");
  if (start < delay_steps_) throw ConfigError("noise path does not cover the initial delay window");
  if (!noise.is_zero()) {
    if (start + steps >= noise.size()) throw ConfigError("noise path does not cover [0, T]");
    if (std::abs(noise.h() - cfg_.h) > 1e-15 * cfg_.h) {
      throw ConfigError("noise time step differs from model.h");
    }
  }
}

Trajectory DelayRandomPDE::integrate_v(const NoiseField& noise, std::size_t start,
                                       const HistorySegment& psi, std::size_t steps,
                                       const IntegrateOptions& options) const {
  const std::size_t n_modes = cfg_.modes;
  const std::size_t lag = delay_steps_;
  if (psi.modes() != n_modes || psi.delay_steps() != lag) {
    throw ConfigError("initial segment grid does not match the model (modes, tau/h)");
  }
  check_noise(noise, start, steps);

  const std::size_t slots = lag + 1;
  std::vector<double> ring(psi.data().begin(), psi.data().end());
  auto slot = [&](std::size_t g) { return std::span<double>(ring.data() + (g % slots) * n_modes, n_modes); };

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.energy.reserve(steps + 1);

  const bool noisy = !noise.is_zero();
  const bool has_F = !cfg_.F_is_zero();
  const bool has_f = !cfg_.f.is_zero();
  std::vector<double> z_now(n_modes), z_del(n_modes), lap(n_modes), forcing(n_modes),
      u(n_modes), Fu(n_modes), next(n_modes);
  std::vector<double> phys(transform_.points());

  auto record = [&](std::size_t n) {
    const auto v = slot(n + lag);
    double e = 0.0;
    for (double c : v) e += c * c;
    const double t = static_cast<double>(n) * cfg_.h;
    traj.times.push_back(t);
    traj.energy.push_back(e);
    if (options.observer) options.observer(t, v);
    if (options.store_segments) {
      HistorySegment seg(cfg_.tau, lag, n_modes);
      for (std::size_t i = 0; i <= lag; ++i) {
        const auto src = slot(n + i);
        std::copy(src.begin(), src.end(), seg.at(i).begin());
      }
      traj.segments.push_back(std::move(seg));
    }
    return e;
  };
  record(0);

  for (std::size_t n = 0; n < steps; ++n) {
    const auto v_now = slot(n + lag);
    const auto v_del = slot(n);
    if (noisy) {
      noise.z_coeffs(start + n, z_now);
      noise.z_coeffs(start + n - lag, z_del);
      noise.laplacian_coeffs(start + n, lap);
    }
    for (std::size_t k = 0; k < n_modes; ++k) {
      forcing[k] = -cfg_.sigma * (v_del[k] + z_del[k]) + lap[k];
    }
    if (has_F) {
      for (std::size_t k = 0; k < n_modes; ++k) u[k] = v_now[k] + z_now[k];
      project_F(u, Fu);
      for (std::size_t k = 0; k < n_modes; ++k) forcing[k] += Fu[k];
    }
    if (has_f) {
      for (std::size_t k = 0; k < n_modes; ++k) u[k] = v_del[k] + z_del[k];
      transform_.to_physical(u, phys);
      for (double& p : phys) p = cfg_.f(p);
      transform_.to_spectral(phys, Fu);
      for (std::size_t k = 0; k < n_modes; ++k) forcing[k] += Fu[k];
    }
    for (std::size_t k = 0; k < n_modes; ++k) next[k] = decay_[k] * v_now[k] + gain_[k] * forcing[k];
    // v_{n+1} takes the slot of v_{n - lag}, which is no longer needed
    std::copy(next.begin(), next.end(), slot(n + 1 + lag).begin());

    const double e = record(n + 1);
    if (!(std::sqrt(e) <= cfg_.blowup_ceiling)) {
      std::ostringstream msg;
      msg << "blow-up: ||v(t)|| = " << std::sqrt(e) << " exceeds " << cfg_.blowup_ceiling
          << " at t = " << static_cast<double>(n + 1) * cfg_.h;
      throw NumericalError(msg.str());
    }
  }

  traj.terminal = HistorySegment(cfg_.tau, lag, n_modes);
  for (std::size_t i = 0; i <= lag; ++i) {
    const auto src = slot(steps + i);
    std::copy(src.begin(), src.end(), traj.terminal.at(i).begin());
  }
  return traj;
}

HistorySegment DelayRandomPDE::evolve_rds(const NoiseField& noise, std::size_t start,
                                          const HistorySegment& phi, std::size_t steps) const {
  if (steps == 0) return phi;
  check_noise(noise, start, steps);
  const std::size_t lag = delay_steps_;
  HistorySegment psi = phi;
  std::vector<double> z(cfg_.modes);
  if (!noise.is_zero()) {
    for (std::size_t i = 0; i <= lag; ++i) {
      noise.z_coeffs(start - lag + i, z);
      auto row = psi.at(i);
      for (std::size_t k = 0; k < cfg_.modes; ++k) row[k] -= z[k];
    }
  }
  Trajectory traj = integrate_v(noise, start, psi, steps);
  HistorySegment out = std::move(traj.terminal);
  if (!noise.is_zero()) {
    for (std::size_t i = 0; i <= lag; ++i) {
      noise.z_coeffs(start + steps - lag + i, z);
      auto row = out.at(i);
      for (std::size_t k = 0; k < cfg_.modes; ++k) row[k] += z[k];
    }
  }
  return out;
}

namespace {

std::size_t steps_of(double T, double h) {
  if (T < 0.0) throw ConfigError("integration time must be nonnegative");
  const double ratio = T / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("integration time must be a multiple of model.h");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

Trajectory integrate_v(const ModelConfig& cfg, const NoiseField& noise, std::size_t start,
                       const HistorySegment& psi, double T) {
  return DelayRandomPDE(cfg).integrate_v(noise, start, psi, steps_of(T, cfg.h));
}

HistorySegment evolve_rds(const ModelConfig& cfg, const NoiseField& noise, std::size_t start,
                          const HistorySegment& phi, double t) {
  return DelayRandomPDE(cfg).evolve_rds(noise, start, phi, steps_of(t, cfg.h));
}

namespace {

// Shared core on grid values; `norm` is an L2 quadrature on that grid.
template <class Norm>
LipschitzCheck lipschitz_core(std::span<const double> F_coeffs, std::span<const double> p1,
                              std::span<const double> p2, double r_value, double c, Norm norm) {
  LipschitzCheck out;
  out.radius = c + (c + 1.0) * r_value;
  out.R = R_of(r_value, F_coeffs, c);
  for (std::size_t j = 0; j < p1.size(); ++j) {
    out.sup_v1 = std::max(out.sup_v1, std::abs(p1[j]));
    out.sup_v2 = std::max(out.sup_v2, std::abs(p2[j]));
  }
  out.precondition_ok = out.sup_v1 <= out.radius && out.sup_v2 <= out.radius;
  if (!out.precondition_ok) return out;

  std::vector<double> dF(p1.size()), dv(p1.size());
  for (std::size_t j = 0; j < p1.size(); ++j) {
    dF[j] = evaluate_F(F_coeffs, p1[j]) - evaluate_F(F_coeffs, p2[j]);
    dv[j] = p1[j] - p2[j];
  }
  out.lhs = norm(dF);
  const double dnorm = norm(dv);
  out.rhs = out.R * dnorm;
  out.ratio = dnorm > 0.0 ? out.lhs / dnorm : 0.0;
  out.satisfied = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace

LipschitzCheck lipschitz_majorant_check(const ModelConfig& cfg, std::span<const double> v1,
                                        std::span<const double> v2, double r_value, double c) {
  const std::size_t n = cfg.modes;
  if (v1.size() != n || v2.size() != n) throw ConfigError("lipschitz check: field size mismatch");
  // F(v) has degree <= 3n, below the grid size, so the quadrature norm is exact
  const SineTransform fine(n, 4 * n + 4);
  std::vector<double> p1(fine.points()), p2(fine.points());
  fine.to_physical(v1, p1);
  fine.to_physical(v2, p2);
  return lipschitz_core(cfg.F_coeffs, p1, p2, r_value, c,
                        [&](std::span<const double> v) { return fine.l2_norm(v); });
}

LipschitzCheck lipschitz_majorant_check_values(std::span<const double> F_coeffs,
                                               std::span<const double> u1,
                                               std::span<const double> u2, double r_value, double c) {
  if (u1.size() != u2.size() || u1.empty()) throw ConfigError("lipschitz check: field size mismatch");
  const double w = std::numbers::pi / static_cast<double>(u1.size());
  return lipschitz_core(F_coeffs, u1, u2, r_value, c, [w](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(w * s);
  });
}

}  // namespace delaydim
