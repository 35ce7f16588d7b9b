#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace delaydim {

enum class NormKind { sup, euclidean };

std::string to_string(NormKind kind);
NormKind norm_from_string(const std::string& name);

/// m 2^m (1 + r2/r1)^m: upper bound on the number of r1-balls needed to cover
/// an r2-ball of an m-dimensional normed space.
double covering_bound(std::size_t m, double r1, double r2);

struct CoverResult {
  std::size_t m = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  NormKind norm = NormKind::sup;
  double lemma_bound = 0.0;
  std::size_t constructed_count = 0;
  std::size_t probes = 0;
  double worst_probe_distance = 0.0;  // max over probes of the distance to the nearest center
  bool within_bound = false;
  std::vector<std::vector<double>> centers;
};

/// Lattice cover of the r2-ball by r1-balls. In the sup norm the centers sit
/// on the pitch-2 r1 grid, ceil(r2/r1)^m of them. In the Euclidean norm the
/// cells are cubes inscribed in r1-balls that meet the r2-ball. Every point of
/// a probe grid inside the r2-ball is checked against the centers by brute
/// force; an uncovered probe throws ConsistencyError.
CoverResult grid_cover(std::size_t m, double r1, double r2, NormKind norm);

/// Row-major point set: count points of dimension dim.
struct PointSet {
  std::span<const double> data;
  std::size_t dim = 0;
  std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> point(std::size_t i) const { return data.subspan(i * dim, dim); }
};

struct DimensionEstimate {
  std::vector<double> scales;
  std::vector<double> counts;  // N(eps) for box counting, C(r) for correlation sums
  std::size_t window_begin = 0;  // fit window [window_begin, window_end)
  std::size_t window_end = 0;
  double slope = 0.0;
  double r2_fit = 1.0;
  double diameter = 0.0;
  bool clean_scaling = true;  // r2_fit >= 0.98
  std::string method;
};

/// Diameter by a double sweep (farthest point from the first point, then
/// farthest from that one); within a factor 2 of the true diameter.
double approximate_diameter(const PointSet& points);
double exact_diameter(const PointSet& points);

/// Box-counting dimension: occupied boxes at dyadic scales from
/// diameter / 2^n_scales up to diameter / 4, slope fitted over the scales
/// whose boxes are well sampled (N(eps) at most count / 8).
DimensionEstimate box_dimension(const PointSet& points, std::size_t n_scales = 12);

/// Correlation dimension: slope of log C(r) against log r with
/// C(r) = fraction of point pairs closer than r, fitted where
/// 1e-3 <= C(r) <= 0.05 (log-spaced radii).
DimensionEstimate correlation_dimension(const PointSet& points);

/// Least-squares slope and coefficient of determination of y against x.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace delaydim
