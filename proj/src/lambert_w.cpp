#include "delaydim/lambert_w.hpp"

#include <cmath>
#include <numbers>

namespace delaydim {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kMaxIter = 64;

bool finite(cd w) { return std::isfinite(w.real()) && std::isfinite(w.imag()); }

cd asymptotic_seed(cd log_z, int branch) {
  const cd l1 = log_z + cd(0.0, 2.0 * kPi * branch);
  const cd l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// Halley on f(w) = w e^w - z.
std::optional<cd> halley_direct(cd z, cd w) {
  for (int it = 0; it < kMaxIter; ++it) {
    const cd ew = std::exp(w);
    const cd f = w * ew - z;
    const cd wp1 = w + 1.0;
    const cd denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const cd step = f / denom;
    w -= step;
    if (!finite(w)) return std::nullopt;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) return w;
  }
  return std::nullopt;
}

// Halley on g(w) = w + log w - log z - 2 pi i k, valid away from the branch point.
std::optional<cd> halley_log(cd target, cd w) {
  for (int it = 0; it < kMaxIter; ++it) {
    const cd g = w + std::log(w) - target;
    const cd g1 = 1.0 + 1.0 / w;
    const cd g2 = -1.0 / (w * w);
    const cd step = 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2);
    w -= step;
    if (!finite(w)) return std::nullopt;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) return w;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::complex<double>> lambert_w(std::complex<double> z, int branch) {
  if (z == cd(0.0, 0.0)) {
    if (branch == 0) return cd(0.0, 0.0);
    return std::nullopt;
  }
  if (!finite(z)) return std::nullopt;
  // Off the cut W_k(conj z) = conj W_{-k}(z); the real axis itself takes the
  // values from above (counter-clockwise continuity).
  if (z.imag() < 0.0) {
    const auto w = lambert_w(std::conj(z), -branch);
    if (!w) return std::nullopt;
    return std::conj(*w);
  }

  const double inv_e = std::exp(-1.0);
  const cd near_bp = 2.0 * (std::numbers::e * z + 1.0);
  const bool real_neg_z = z.imag() == 0.0 && z.real() < 0.0;
  cd seed;

  if (branch == 0 && (std::abs(z + inv_e) < 0.3 || (z.real() < -inv_e && std::abs(z + inv_e) < 1.0))) {
    const cd p = std::sqrt(near_bp);
    seed = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (branch == -1 && real_neg_z && z.real() >= -inv_e) {
    // both W_0 and W_{-1} are real here; W_{-1} <= -1
    if (z.real() > -0.1) {
      const double l1 = std::log(-z.real());
      seed = l1 - std::log(-l1);
    } else {
      const cd p = -std::sqrt(near_bp);
      seed = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
  } else if (branch == -1 &&
             (std::abs(z + inv_e) < 0.3 || (z.real() < -inv_e && std::abs(z + inv_e) < 1.0))) {
    // from above, the branch point is shared with W_{-1}
    const cd p = -std::sqrt(near_bp);
    seed = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (branch == 0 && std::abs(z) < 2.0) {
    seed = std::log(1.0 + z);
  } else {
    seed = asymptotic_seed(std::log(z), branch);
  }

  auto w = halley_direct(z, seed);
  if (!w) return std::nullopt;
  if (real_neg_z && z.real() >= -inv_e && (branch == 0 || branch == -1)) {
    *w = cd(w->real(), 0.0);
  }
  return w;
}

std::optional<std::complex<double>> lambert_w_from_log(std::complex<double> log_z, int branch) {
  if (std::abs(log_z) < 50.0) return lambert_w(std::exp(log_z), branch);
  const cd target = log_z + cd(0.0, 2.0 * kPi * branch);
  return halley_log(target, asymptotic_seed(log_z, branch));
}

}  // namespace delaydim
