#include "delaydim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "delaydim/errors.hpp"

namespace delaydim {

namespace {

std::mt19937_64 channel_engine(std::uint64_t seed, std::uint64_t tag, std::uint64_t channel) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(channel)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kIncrementTag = 0x1dc5;
constexpr std::uint64_t kStationaryTag = 0x57a7;

}  // namespace

WienerPath WienerPath::shifted(std::size_t offset) const {
  WienerPath out;
  out.seed = seed;
  out.channels = channels;
  out.h = h;
  if (offset < steps()) {
    out.increments.assign(increments.begin() + static_cast<std::ptrdiff_t>(offset * channels),
                          increments.end());
  }
  return out;
}

WienerPath sample_wiener(std::uint64_t seed, std::size_t channels, double h, std::size_t steps) {
  if (!(h > 0.0)) throw ConfigError("sample_wiener: h must be positive");
  if (channels == 0) throw ConfigError("sample_wiener: need at least one channel");
  if (steps == 0) throw ConfigError("sample_wiener: need at least one step");

  WienerPath w;
  w.seed = seed;
  w.channels = channels;
  w.h = h;
  w.increments.resize(channels * steps);
  const double sd = std::sqrt(h);
  for (std::size_t j = 0; j < channels; ++j) {
    auto engine = channel_engine(seed, kIncrementTag, j);
    std::normal_distribution<double> normal(0.0, sd);
    for (std::size_t n = 0; n < steps; ++n) w.increments[n * channels + j] = normal(engine);
  }
  return w;
}

OUProcessPath ou_path(const WienerPath& w, double mu, const OUInit& init) {
  if (!(mu > 0.0)) throw ConfigError("ou_path: mu must be positive");
  const std::size_t m = w.channels;

  OUProcessPath z;
  z.mu = mu;
  z.h = w.h;
  z.channels = m;
  const std::size_t steps = w.steps();
  z.values.resize((steps + 1) * m);
  z.r_values.resize(steps + 1);

  if (const auto* given = std::get_if<std::vector<double>>(&init)) {
    if (given->size() != m) throw ConfigError("ou_path: initial state has wrong dimension");
    std::copy(given->begin(), given->end(), z.values.begin());
  } else {
    const double sd = std::sqrt(0.5 / mu);
    for (std::size_t j = 0; j < m; ++j) {
      auto engine = channel_engine(w.seed, kStationaryTag, j);
      std::normal_distribution<double> normal(0.0, sd);
      z.values[j] = normal(engine);
    }
  }

  const double decay = std::exp(-mu * w.h);
  // sqrt((1 - e^{-2 mu h}) / (2 mu h)), with expm1 for small mu h
  const double scale = std::sqrt(-std::expm1(-2.0 * mu * w.h) / (2.0 * mu * w.h));
  for (std::size_t n = 0; n < steps; ++n) {
    for (std::size_t j = 0; j < m; ++j) {
      z.values[(n + 1) * m + j] = decay * z.values[n * m + j] + scale * w.increment(n, j);
    }
  }
  for (std::size_t n = 0; n <= steps; ++n) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) r += z.values[n * m + j] * z.values[n * m + j];
    z.r_values[n] = r;
  }
  return z;
}

TemperednessReport temperedness_check(const OUProcessPath& z, std::size_t window) {
  TemperednessReport rep;
  rep.window = std::min(window, z.size());
  if (rep.window == 0) return rep;
  const double r0 = z.r_values[0];
  std::size_t violations = 0;
  for (std::size_t n = 0; n < rep.window; ++n) {
    const double t = static_cast<double>(n) * z.h;
    const double growth = std::exp(0.5 * z.mu * t);
    rep.rho = std::max(rep.rho, z.r_values[n] / growth);
    if (z.r_values[n] > r0 * growth) ++violations;
  }
  rep.violation_fraction = static_cast<double>(violations) / static_cast<double>(rep.window);
  return rep;
}

NoiseField::NoiseField(std::size_t modes) : modes_(modes), zero_(true) {}

NoiseField::NoiseField(OUProcessPath ou, std::vector<std::vector<double>> g_coeffs,
                       std::size_t modes)
    : modes_(modes), zero_(false), ou_(std::move(ou)), g_(std::move(g_coeffs)) {
  if (g_.size() != ou_.channels) {
    throw ConfigError("NoiseField: need one profile per noise channel");
  }
  for (auto& g : g_) {
    if (g.size() > modes_) throw ConfigError("NoiseField: profile has more modes than the basis");
    g.resize(modes_, 0.0);
  }
  const bool all_zero = std::all_of(g_.begin(), g_.end(), [](const auto& g) {
    return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
  });
  if (g_.empty() || all_zero) zero_ = true;
}

std::size_t NoiseField::size() const {
  return zero_ ? std::numeric_limits<std::size_t>::max() : ou_.size();
}

void NoiseField::z_coeffs(std::size_t n, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (zero_) return;
  for (std::size_t j = 0; j < g_.size(); ++j) {
    const double zj = ou_.z(n, j);
    for (std::size_t k = 0; k < modes_; ++k) out[k] += g_[j][k] * zj;
  }
}

void NoiseField::laplacian_coeffs(std::size_t n, std::span<double> out) const {
  z_coeffs(n, out);
  for (std::size_t k = 0; k < modes_; ++k) {
    const double wave = static_cast<double>(k + 1);
    out[k] *= -wave * wave;
  }
}

}  // namespace delaydim
