#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace delaydim {

/// Discrete sine transform between the orthonormal basis
/// e_k(x) = sqrt(2/pi) sin(k x), k = 1..modes, and point values on the
/// interior grid x_j = j pi / (points + 1). The forward sum is exact for sine
/// polynomials whose frequencies stay below 2 (points + 1) - modes.
class SineTransform {
 public:
  SineTransform(std::size_t modes, std::size_t points);

  std::size_t modes() const { return modes_; }
  std::size_t points() const { return points_; }
  double x(std::size_t j) const;

  void to_physical(std::span<const double> coeffs, std::span<double> values) const;
  void to_spectral(std::span<const double> values, std::span<double> coeffs) const;
  /// L2(0, pi) norm of a grid function, exact for sine polynomials of
  /// degree <= points.
  double l2_norm(std::span<const double> values) const;

 private:
  std::size_t modes_;
  std::size_t points_;
  std::vector<double> basis_;  // points x modes
};

/// Smallest grid on which the Galerkin projection of a degree-`degree`
/// polynomial of a `modes`-mode field is alias free (at least the 3/2 rule).
std::size_t dealiased_points(std::size_t modes, std::size_t degree);

}  // namespace delaydim
