#include "delaydim/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaydim/errors.hpp"

namespace delaydim {

SineTransform::SineTransform(std::size_t modes, std::size_t points)
    : modes_(modes), points_(points), basis_(points * modes) {
  if (modes == 0 || points < modes) throw ConfigError("SineTransform: need points >= modes >= 1");
  const double norm = std::sqrt(2.0 / std::numbers::pi);
  for (std::size_t j = 0; j < points_; ++j) {
    for (std::size_t k = 0; k < modes_; ++k) {
      basis_[j * modes_ + k] = norm * std::sin(static_cast<double>(k + 1) * x(j));
    }
  }
}

double SineTransform::x(std::size_t j) const {
  return static_cast<double>(j + 1) * std::numbers::pi / static_cast<double>(points_ + 1);
}

void SineTransform::to_physical(std::span<const double> coeffs, std::span<double> values) const {
  for (std::size_t j = 0; j < points_; ++j) {
    double v = 0.0;
    const double* row = basis_.data() + j * modes_;
    for (std::size_t k = 0; k < modes_; ++k) v += row[k] * coeffs[k];
    values[j] = v;
  }
}

void SineTransform::to_spectral(std::span<const double> values, std::span<double> coeffs) const {
  std::fill(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(modes_), 0.0);
  for (std::size_t j = 0; j < points_; ++j) {
    const double* row = basis_.data() + j * modes_;
    for (std::size_t k = 0; k < modes_; ++k) coeffs[k] += row[k] * values[j];
  }
  const double w = std::numbers::pi / static_cast<double>(points_ + 1);
  for (std::size_t k = 0; k < modes_; ++k) coeffs[k] *= w;
}

double SineTransform::l2_norm(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t j = 0; j < points_; ++j) s += values[j] * values[j];
  return std::sqrt(s * std::numbers::pi / static_cast<double>(points_ + 1));
}

std::size_t dealiased_points(std::size_t modes, std::size_t degree) {
  // frequency q aliases onto 2 (J + 1) - q; keep it above `modes`
  const std::size_t d = std::max<std::size_t>(degree, 2);
  const std::size_t alias_free = (d + 1) * modes / 2 + 1;  // J + 1 > (d + 1) modes / 2
  const std::size_t three_halves = (3 * modes + 1) / 2;
  return std::max(alias_free, three_halves);
}

}  // namespace delaydim
