#include <doctest.h>

#include <cmath>
#include <random>

#include "delaydim/errors.hpp"
#include "delaydim/geometry.hpp"

using namespace delaydim;

namespace {

// Uniform points on a unit segment along a random direction of R^dim.
std::vector<double> segment_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> dir(dim);
  double s = 0.0;
  for (double& d : dir) s += (d = normal(rng)) * d;
  for (double& d : dir) d /= std::sqrt(s);
  std::vector<double> pts(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = unif(rng);
    for (std::size_t j = 0; j < dim; ++j) pts[i * dim + j] = t * dir[j];
  }
  return pts;
}

std::vector<double> square_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  std::vector<double> pts(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    pts[3 * i] = unif(rng);
    pts[3 * i + 1] = unif(rng);
    pts[3 * i + 2] = 0.0;
  }
  return pts;
}

}  // namespace

TEST_CASE("covering_bound") {
  CHECK(covering_bound(1, 1.0, 1.0) == 4.0);
  CHECK(covering_bound(2, 1.0, 2.0) == 72.0);
  CHECK(covering_bound(1, 1.0, 2.0) == 6.0);
  CHECK(covering_bound(3, 1.0, 2.0) == 648.0);
}

TEST_CASE("grid_cover examples") {
  auto c = grid_cover(1, 1.0, 2.0, NormKind::sup);
  CHECK(c.constructed_count == 2);
  CHECK(c.within_bound);
  CHECK(c.worst_probe_distance <= 1.0 + 1e-12);
  c = grid_cover(2, 1.0, 1.0, NormKind::sup);
  CHECK(c.constructed_count == 1);
  CHECK(c.lemma_bound == 32.0);
  c = grid_cover(3, 1.0, 2.0, NormKind::sup);
  CHECK(c.constructed_count == 8);
  CHECK(c.lemma_bound == 648.0);
  CHECK(c.probes > 0);
  CHECK_THROWS_AS(grid_cover(7, 1.0, 2.0, NormKind::sup), ConfigError);
  CHECK_THROWS_AS(grid_cover(2, 0.0, 2.0, NormKind::sup), ConfigError);
}

TEST_CASE("Euclidean cover") {
  for (std::size_t m : {1u, 2u, 3u}) {
    const auto c = grid_cover(m, 1.0, 2.0, NormKind::euclidean);
    CHECK(c.constructed_count >= 1);
    CHECK(c.worst_probe_distance <= 1.0 + 1e-12);
    CHECK(c.within_bound == (static_cast<double>(c.constructed_count) <= c.lemma_bound));
  }
}

TEST_CASE("lemma audit") {
  for (std::size_t m = 1; m <= 4; ++m) {
    for (double ratio : {1.0, 2.0, 5.0}) {
      const auto c = grid_cover(m, 1.0, ratio, NormKind::sup);
      CHECK(c.constructed_count == static_cast<std::size_t>(std::pow(std::ceil(ratio), m)));
      CHECK(static_cast<double>(c.constructed_count) <= c.lemma_bound);
      CHECK(c.lemma_bound == doctest::Approx(covering_bound(m, 1.0, ratio)));
      CHECK(c.worst_probe_distance <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("norm names") {
  CHECK(norm_from_string("sup") == NormKind::sup);
  CHECK(norm_from_string("euclidean") == NormKind::euclidean);
  CHECK(to_string(NormKind::sup) == "sup");
  CHECK_THROWS_AS(norm_from_string("l1"), ConfigError);
}

TEST_CASE("fit_line") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto [slope, r2] = fit_line(x, y);
  CHECK(slope == doctest::Approx(2.0));
  CHECK(r2 == doctest::Approx(1.0));
}

TEST_CASE("diameters") {
  const auto pts = segment_cloud(500, 7, 1);
  const PointSet set{pts, 7};
  const double exact = exact_diameter(set);
  const double approx = approximate_diameter(set);
  CHECK(exact <= 1.0 + 1e-12);
  CHECK(exact > 0.99);
  CHECK(approx <= exact + 1e-12);
  CHECK(approx >= 0.5 * exact);
}

TEST_CASE("dimension estimates on synthetic sets") {
  const std::size_t n = 10000;
  SUBCASE("segment in dimension 50") {
    const auto pts = segment_cloud(n, 50, 7);
    const PointSet set{pts, 50};
    const auto box = box_dimension(set, 12);
    CHECK(box.slope >= 0.85);
    CHECK(box.slope <= 1.15);
    const auto corr = correlation_dimension(set);
    CHECK(std::abs(corr.slope - 1.0) <= 0.15);
  }
  SUBCASE("square patch") {
    const auto pts = square_cloud(n, 8);
    const PointSet set{pts, 3};
    const auto box = box_dimension(set, 12);
    CHECK(box.slope >= 1.8);
    CHECK(box.slope <= 2.2);
    const auto corr = correlation_dimension(set);
    CHECK(std::abs(corr.slope - 2.0) <= 0.2);
  }
  SUBCASE("single repeated point") {
    const std::vector<double> pts(3 * 200, 0.25);
    const PointSet set{pts, 3};
    CHECK(box_dimension(set, 12).slope == 0.0);
    CHECK(correlation_dimension(set).slope == 0.0);
  }
}

TEST_CASE("scale-window stability") {
  const auto seg = segment_cloud(10000, 50, 7);
  const auto sq = square_cloud(10000, 8);
  for (const PointSet set : {PointSet{seg, 50}, PointSet{sq, 3}}) {
    const auto est = box_dimension(set, 12);
    REQUIRE(est.window_end - est.window_begin >= 3);
    std::vector<double> x, y;
    for (std::size_t i = est.window_begin; i < est.window_end; ++i) {
      x.push_back(std::log(1.0 / est.scales[i]));
      y.push_back(std::log(est.counts[i]));
    }
    CHECK(fit_line(x, y).first == doctest::Approx(est.slope).epsilon(1e-12));
    // drop the finest scale, then the coarsest
    const auto a = fit_line(std::span(x).subspan(1), std::span(y).subspan(1)).first;
    const auto b = fit_line(std::span(x).first(x.size() - 1), std::span(y).first(y.size() - 1)).first;
    CHECK(std::abs(a - est.slope) < 0.1);
    CHECK(std::abs(b - est.slope) < 0.1);
    for (std::size_t i = 1; i < est.counts.size(); ++i) {
      if (est.scales[i] > est.scales[i - 1]) CHECK(est.counts[i] <= est.counts[i - 1]);
      else CHECK(est.counts[i] >= est.counts[i - 1]);
    }
  }
}
