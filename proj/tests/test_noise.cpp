#include <doctest.h>

#include <cmath>

#include "delaydim/errors.hpp"
#include "delaydim/noise.hpp"
#include "oracles.hpp"

using namespace delaydim;

TEST_CASE("sample_wiener is deterministic in the seed") {
  const WienerPath a = sample_wiener(7, 2, 0.01, 3);
  const WienerPath b = sample_wiener(7, 2, 0.01, 3);
  CHECK(a.steps() == 3);
  CHECK(a.increments.size() == 6);
  CHECK(a.increments == b.increments);
  CHECK(sample_wiener(8, 2, 0.01, 3).increments != a.increments);
}

TEST_CASE("sample_wiener increments have variance h") {
  const WienerPath w = sample_wiener(7, 1, 0.01, 100000);
  double s = 0.0, s2 = 0.0;
  for (double x : w.increments) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(w.increments.size());
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(var >= 0.0095);
  CHECK(var <= 0.0105);
}

TEST_CASE("sample_wiener rejects bad arguments") {
  CHECK_THROWS_AS(sample_wiener(7, 1, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_wiener(7, 0, 0.01, 1), ConfigError);
  CHECK_THROWS_AS(sample_wiener(7, 1, -1.0, 1), ConfigError);
}

TEST_CASE("ou_path stationary variance matches 1/(2 mu)") {
  for (double mu : {1.0}) {
    const WienerPath w = sample_wiener(11, 1, 0.01, 1000000);
    const OUProcessPath z = ou_path(w, mu, StationaryInit{});
    std::vector<double> sq(z.size());
    for (std::size_t n = 0; n < z.size(); ++n) sq[n] = z.z(n, 0) * z.z(n, 0);
    const auto est = oracle::batch_means(sq, 50);
    CHECK(std::abs(est.mean - 0.5 / mu) <= 3.0 * est.se);
  }
}

TEST_CASE("ou_path with zero increments") {
  WienerPath w;
  w.seed = 1;
  w.channels = 2;
  w.h = 0.01;
  w.increments.assign(200, 0.0);
  SUBCASE("zero start stays zero") {
    const OUProcessPath z = ou_path(w, 1.0, std::vector<double>{0.0, 0.0});
    for (double v : z.values) CHECK(v == 0.0);
    for (double r : z.r_values) CHECK(r == 0.0);
  }
  SUBCASE("exact decay e^{-mu n h}") {
    WienerPath w1 = w;
    w1.channels = 1;
    w1.increments.assign(100, 0.0);
    const OUProcessPath z = ou_path(w1, 1.0, std::vector<double>{1.0});
    CHECK(std::abs(z.z(100, 0) - std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(z.z(100, 0) - 0.367879) < 1e-6);
  }
}

TEST_CASE("ou_path recursion and validation") {
  const WienerPath w = sample_wiener(3, 2, 0.05, 500);
  const OUProcessPath z = ou_path(w, 2.0, StationaryInit{});
  const double decay = std::exp(-2.0 * 0.05);
  const double scale = std::sqrt((1.0 - std::exp(-2.0 * 2.0 * 0.05)) / (2.0 * 2.0 * 0.05));
  for (std::size_t n = 0; n < 500; ++n) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(z.z(n + 1, j) == doctest::Approx(decay * z.z(n, j) + scale * w.increment(n, j)).epsilon(1e-13));
    }
    CHECK(z.r_values[n] >= 0.0);
    CHECK(z.r_values[n] == doctest::Approx(z.z(n, 0) * z.z(n, 0) + z.z(n, 1) * z.z(n, 1)));
  }
  CHECK_THROWS_AS(ou_path(w, 0.0, StationaryInit{}), ConfigError);
  CHECK_THROWS_AS(ou_path(w, -1.0, StationaryInit{}), ConfigError);
  CHECK_THROWS_AS(ou_path(w, 1.0, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("ou_path is reproducible") {
  const OUProcessPath a = ou_path(sample_wiener(5, 1, 0.01, 1000), 1.0, StationaryInit{});
  const OUProcessPath b = ou_path(sample_wiener(5, 1, 0.01, 1000), 1.0, StationaryInit{});
  CHECK(a.values == b.values);
}

TEST_CASE("shift property after burn-in") {
  const double mu = 1.0, h = 0.01;
  const WienerPath w = sample_wiener(9, 1, h, 6000);
  const std::size_t offset = 1000;
  const OUProcessPath full = ou_path(w, mu, StationaryInit{});
  const OUProcessPath shifted = ou_path(w.shifted(offset), mu, std::vector<double>{0.0});
  const auto burn = static_cast<std::size_t>(20.0 / mu / h);
  double worst = 0.0;
  for (std::size_t n = burn; n < shifted.size(); ++n) {
    worst = std::max(worst, std::abs(shifted.z(n, 0) - full.z(n + offset, 0)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("temperedness_check") {
  OUProcessPath zero;
  zero.mu = 1.0;
  zero.h = 0.01;
  zero.channels = 1;
  zero.values.assign(101, 0.0);
  zero.r_values.assign(101, 0.0);
  CHECK(temperedness_check(zero, 101).rho == 0.0);

  OUProcessPath flat = zero;
  flat.r_values.assign(101, 2.5);
  const auto rep = temperedness_check(flat, 101);
  CHECK(rep.rho == doctest::Approx(2.5));
  CHECK(rep.violation_fraction == 0.0);

  const OUProcessPath z = ou_path(sample_wiener(4, 1, 0.01, 100000), 1.0, StationaryInit{});
  const auto t = temperedness_check(z, z.size());
  CHECK(std::isfinite(t.rho));
  std::size_t crossings = 0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    crossings += z.r_values[n] > t.rho * std::exp(0.5 * static_cast<double>(n) * 0.01) * (1 + 1e-12);
  }
  CHECK(crossings == 0);
}

TEST_CASE("NoiseField combines profiles and applies the Laplacian") {
  const OUProcessPath z = ou_path(sample_wiener(2, 2, 0.01, 50), 1.0, StationaryInit{});
  const std::vector<std::vector<double>> g{{1.0, 0.5}, {0.0, 0.0, 2.0}};
  const NoiseField field(z, g, 4);
  CHECK_FALSE(field.is_zero());
  CHECK(field.size() == 51);
  std::vector<double> zc(4), lap(4);
  for (std::size_t n = 0; n < 51; n += 10) {
    field.z_coeffs(n, zc);
    field.laplacian_coeffs(n, lap);
    CHECK(zc[0] == doctest::Approx(z.z(n, 0)));
    CHECK(zc[1] == doctest::Approx(0.5 * z.z(n, 0)));
    CHECK(zc[2] == doctest::Approx(2.0 * z.z(n, 1)));
    CHECK(zc[3] == 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
      const double mu_k = static_cast<double>((k + 1) * (k + 1));
      CHECK(lap[k] == doctest::Approx(-mu_k * zc[k]));
    }
  }
  const NoiseField none(z, {{0.0}, {0.0}}, 4);
  CHECK(none.is_zero());
  CHECK_THROWS_AS(NoiseField(z, {{1.0}}, 4), ConfigError);
}
