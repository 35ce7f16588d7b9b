#include "delaydim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "delaydim/errors.hpp"

namespace delaydim {

namespace {

constexpr std::size_t kMaxCoverDim = 6;
constexpr std::size_t kMaxCenters = 200000;
constexpr std::size_t kProbeBudget = 20000;

double norm_of(std::span<const double> v, NormKind kind) {
  double acc = 0.0;
  for (double x : v) {
    if (kind == NormKind::sup) {
      acc = std::max(acc, std::abs(x));
    } else {
      acc += x * x;
    }
  }
  return kind == NormKind::sup ? acc : std::sqrt(acc);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Odometer over {0..n-1}^m.
bool next_index(std::vector<std::size_t>& idx, std::size_t n) {
  for (auto& i : idx) {
    if (++i < n) return true;
    i = 0;
  }
  return false;
}

}  // namespace

std::string to_string(NormKind kind) { return kind == NormKind::sup ? "sup" : "euclidean"; }

NormKind norm_from_string(const std::string& name) {
  if (name == "sup") return NormKind::sup;
  if (name == "euclidean") return NormKind::euclidean;
  throw ConfigError("unknown norm '" + name + "' (expected sup or euclidean)");
}

double covering_bound(std::size_t m, double r1, double r2) {
  if (m == 0) throw ConfigError("covering_bound: m must be at least 1");
  if (!(r1 > 0.0 && r2 > 0.0)) throw ConfigError("covering_bound: radii must be positive");
  const double md = static_cast<double>(m);
  return md * std::pow(2.0, md) * std::pow(1.0 + r2 / r1, md);
}

CoverResult grid_cover(std::size_t m, double r1, double r2, NormKind norm) {
  if (m == 0 || m > kMaxCoverDim) throw ConfigError("grid_cover: m must lie in 1..6");
  CoverResult out;
  out.m = m;
  out.r1 = r1;
  out.r2 = r2;
  out.norm = norm;
  out.lemma_bound = covering_bound(m, r1, r2);

  // half side of a cell that fits inside one r1-ball
  const double half = norm == NormKind::sup ? r1 : r1 / std::sqrt(static_cast<double>(m));
  const auto per_axis = static_cast<std::size_t>(std::ceil(r2 / half - 1e-12));
  if (std::pow(static_cast<double>(per_axis), static_cast<double>(m)) > kMaxCenters) {
    throw ConfigError("grid_cover: lattice too large for the combinatorial guard");
  }
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> c(m);
  do {
    double gap2 = 0.0;  // squared distance from the origin to the cell
    for (std::size_t d = 0; d < m; ++d) {
      c[d] = -r2 + half * (2.0 * static_cast<double>(idx[d]) + 1.0);
      const double g = std::max(0.0, std::abs(c[d]) - half);
      gap2 += g * g;
    }
    if (norm == NormKind::euclidean && gap2 > r2 * r2) continue;
    out.centers.push_back(c);
  } while (next_index(idx, per_axis));
  out.constructed_count = out.centers.size();
  out.within_bound = static_cast<double>(out.constructed_count) <= out.lemma_bound;

  // Probe audit, brute force over centers.
  std::size_t probes_per_axis = 2;
  while (std::pow(static_cast<double>(probes_per_axis + 1), static_cast<double>(m)) <= kProbeBudget) {
    ++probes_per_axis;
  }
  probes_per_axis = std::max<std::size_t>(probes_per_axis, 3);
  std::vector<std::size_t> pidx(m, 0);
  std::vector<double> probe(m), diff(m);
  do {
    for (std::size_t d = 0; d < m; ++d) {
      probe[d] = -r2 + 2.0 * r2 * static_cast<double>(pidx[d]) /
                           static_cast<double>(probes_per_axis - 1);
    }
    if (norm_of(probe, norm) > r2 * (1.0 + 1e-12)) continue;
    ++out.probes;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& center : out.centers) {
      for (std::size_t d = 0; d < m; ++d) diff[d] = probe[d] - center[d];
      best = std::min(best, norm_of(diff, norm));
    }
    out.worst_probe_distance = std::max(out.worst_probe_distance, best);
  } while (next_index(pidx, probes_per_axis));
  if (out.worst_probe_distance > r1 * (1.0 + 1e-12)) {
    throw ConsistencyError("grid_cover: probe point left uncovered by the lattice");
  }
  return out;
}

double approximate_diameter(const PointSet& points) {
  const std::size_t n = points.count();
  if (n < 2) return 0.0;
  auto farthest = [&](std::size_t from) {
    std::size_t arg = from;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dist2(points.point(from), points.point(i));
      if (d > best) {
        best = d;
        arg = i;
      }
    }
    return std::pair{arg, std::sqrt(best)};
  };
  const auto [a, d0] = farthest(0);
  const auto [b, d1] = farthest(a);
  (void)b;
  return std::max(d0, d1);
}

double exact_diameter(const PointSet& points) {
  const std::size_t n = points.count();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, dist2(points.point(i), points.point(j)));
  }
  return std::sqrt(best);
}

std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return {0.0, 1.0};
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, r2};
}

namespace {

bool degenerate(const PointSet& points, double diameter) {
  double scale = 0.0;
  for (double v : points.data) scale = std::max(scale, std::abs(v));
  return points.count() < 2 || diameter <= 1e-12 * (1.0 + scale);
}

void fit_window(DimensionEstimate& est, std::span<const double> log_x, std::span<const double> log_y) {
  const std::size_t len = est.window_end - est.window_begin;
  if (len < 2) {
    est.slope = 0.0;
    est.r2_fit = 0.0;
    est.clean_scaling = false;
    return;
  }
  const auto [slope, r2] = fit_line(log_x.subspan(est.window_begin, len), log_y.subspan(est.window_begin, len));
  est.slope = slope;
  est.r2_fit = r2;
  est.clean_scaling = r2 >= 0.98;
}

}  // namespace

DimensionEstimate box_dimension(const PointSet& points, std::size_t n_scales) {
  if (n_scales < 5) throw ConfigError("box_dimension: need at least 5 scales");
  DimensionEstimate est;
  est.method = "box-counting";
  const std::size_t n = points.count();
  const std::size_t dim = points.dim;
  est.diameter = approximate_diameter(points);
  if (degenerate(points, est.diameter)) {
    est.scales.push_back(est.diameter);
    est.counts.push_back(n == 0 ? 0.0 : 1.0);
    est.slope = 0.0;
    return est;
  }

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = points.point(i);
    for (std::size_t d = 0; d < dim; ++d) lo[d] = std::min(lo[d], p[d]);
  }

  std::vector<std::vector<std::int64_t>> keys(n, std::vector<std::int64_t>(dim));
  std::vector<double> log_inv_eps, log_n;
  for (std::size_t j = 2; j <= n_scales; ++j) {
    const double eps = est.diameter / std::ldexp(1.0, static_cast<int>(j));
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = points.point(i);
      for (std::size_t d = 0; d < dim; ++d) {
        keys[i][d] = static_cast<std::int64_t>(std::floor((p[d] - lo[d]) / eps));
      }
    }
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    const auto occupied = static_cast<double>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    est.scales.push_back(eps);
    est.counts.push_back(occupied);
    log_inv_eps.push_back(std::log(1.0 / eps));
    log_n.push_back(std::log(occupied));
  }

  // well-sampled scales: the box count stays well below the point count
  const double ceiling = static_cast<double>(n) / 8.0;
  est.window_begin = 0;
  est.window_end = 0;
  while (est.window_end < est.counts.size() && est.counts[est.window_end] <= ceiling) ++est.window_end;
  // coarse scales see the cloud as a blob; keep the central and fine part of the range
  const std::size_t len = est.window_end;
  est.window_begin = len >= 3 ? std::min(len / 3, len - 3) : 0;
  fit_window(est, log_inv_eps, log_n);
  return est;
}

DimensionEstimate correlation_dimension(const PointSet& points) {
  DimensionEstimate est;
  est.method = "correlation-sum";
  const std::size_t n = points.count();
  est.diameter = approximate_diameter(points);
  if (degenerate(points, est.diameter)) {
    est.scales.push_back(est.diameter);
    est.counts.push_back(1.0);
    est.slope = 0.0;
    return est;
  }

  // log-spaced bins of pair distance over [diameter * 1e-6, 2 * diameter]
  constexpr std::size_t kBins = 240;
  const double log_lo = std::log(est.diameter * 1e-6);
  const double log_hi = std::log(est.diameter * 2.0);
  const double bin_width = (log_hi - log_lo) / static_cast<double>(kBins);
  std::vector<std::uint64_t> hist(kBins + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = dist2(points.point(i), points.point(j));
      std::size_t bin = 0;
      if (d2 > 0.0) {
        const double b = (0.5 * std::log(d2) - log_lo) / bin_width;
        bin = b <= 0.0 ? 0 : std::min<std::size_t>(kBins, static_cast<std::size_t>(b) + 1);
      }
      ++hist[bin];
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<double> log_r, log_c;
  double cumulative = 0.0;
  for (std::size_t b = 0; b < kBins; ++b) {
    cumulative += static_cast<double>(hist[b]);
    const double r = std::exp(log_lo + bin_width * static_cast<double>(b));
    const double c = cumulative / pairs;
    est.scales.push_back(r);
    est.counts.push_back(c);
  }
  std::size_t first = est.counts.size(), last = 0;
  for (std::size_t b = 0; b < est.counts.size(); ++b) {
    if (est.counts[b] >= 1e-3 && est.counts[b] <= 0.05) {
      first = std::min(first, b);
      last = b + 1;
    }
  }
  for (std::size_t b = 0; b < est.counts.size(); ++b) {
    log_r.push_back(std::log(est.scales[b]));
    log_c.push_back(est.counts[b] > 0.0 ? std::log(est.counts[b]) : -1e300);
  }
  if (first < last) {
    est.window_begin = first;
    est.window_end = last;
  }
  fit_window(est, log_r, log_c);
  return est;
}

}  // namespace delaydim
