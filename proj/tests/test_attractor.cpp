#include <doctest.h>

#include <cmath>

#include "delaydim/attractor.hpp"
#include "delaydim/errors.hpp"
#include "delaydim/spectral.hpp"

using namespace delaydim;

namespace {

ModelConfig linear_config() {
  ModelConfig cfg;
  cfg.mu = 1.0;
  cfg.sigma = 0.1;
  cfg.tau = 0.5;
  cfg.h = 0.01;
  cfg.modes = 4;
  cfg.g_coeffs = {{0.5, 0.2, 0.1}};
  return cfg;
}

SpectralModel model_for(const ModelConfig& cfg, std::size_t cutoff, std::size_t samples = 200) {
  ModelOptions opts;
  opts.samples = samples;
  opts.delay_steps = cfg.delay_steps();
  return build_model(laplacian_spectrum(cfg.modes), cfg.mu, cfg.sigma, cfg.tau, cutoff, opts);
}

SqueezeConstants constants_for(const ModelConfig& cfg, const SpectralModel& model, double c) {
  SqueezeConstants k;
  k.K = model.K;
  k.M = model.M;
  k.L_f = cfg.f.is_zero() ? 0.0 : cfg.f.lipschitz;
  k.rho1 = model.rho1();
  k.rhom = model.rhom();
  k.c = c;
  k.F_coeffs = cfg.F_coeffs;
  return k;
}

}  // namespace

TEST_CASE("noise realization layout") {
  ModelConfig cfg = linear_config();
  const auto noise = make_realization(cfg, 3, 2.0, 1.0);
  CHECK(noise.origin == 200 + 50);
  CHECK(noise.field.size() == noise.origin + 100 + 2);
  CHECK(noise.index_of(0.0, cfg.h) == noise.origin);
  CHECK(noise.index_of(-2.0, cfg.h) == 50);
  CHECK(noise.index_of(1.0, cfg.h) == noise.origin + 100);
  CHECK_FALSE(noise.field.is_zero());
  cfg.g_coeffs.clear();
  CHECK(make_realization(cfg, 3, 2.0, 1.0).field.is_zero());
  cfg.g_coeffs = {{0.0, 0.0}};
  CHECK(make_realization(cfg, 3, 2.0, 1.0).field.is_zero());
}

TEST_CASE("encode / decode round trip") {
  const auto seg = random_unit_history(9, 2, 0.5, 10, 3);
  const auto p = encode(seg);
  CHECK(p.size() == 11 * 3);
  const auto back = decode(p, 0.5, 10, 3);
  CHECK(distance(seg, back) == 0.0);
  CHECK_THROWS_AS(decode(p, 0.5, 11, 3), ConfigError);
}

TEST_CASE("Hausdorff distance") {
  const std::vector<double> a{0.0, 0.0}, b{1.0, 0.0}, c{0.0, 0.0, 3.0, 0.0};
  CHECK(hausdorff_distance({a, 2}, {a, 2}) == 0.0);
  CHECK(hausdorff_distance({a, 2}, {b, 2}) == doctest::Approx(1.0));
  CHECK(hausdorff_distance({a, 2}, {c, 2}) == doctest::Approx(3.0));
  CHECK(hausdorff_distance({c, 2}, {a, 2}) == doctest::Approx(3.0));
}

TEST_CASE("linear pullback collapses to a point") {
  const ModelConfig cfg = linear_config();
  const auto noise = make_realization(cfg, 11, 20.0, 1.0);
  PullbackOptions opts;
  opts.horizons = {10.0, 20.0};
  opts.n_initial = 20;
  opts.init_radius = 2.0;
  const PointCloud cloud = pullback_sample(cfg, noise, opts);
  CHECK(cloud.count() == 20);
  CHECK(cloud.dim == (cfg.delay_steps() + 1) * cfg.modes);
  REQUIRE(cloud.horizons.size() == 2);
  CHECK(cloud.horizons[0].hausdorff_to_previous == -1.0);
  CHECK(cloud.horizons[1].diameter < cloud.horizons[0].diameter);
  CHECK(cloud.horizons[1].diameter < 1e-6);
  CHECK(exact_diameter(cloud.as_points()) == doctest::Approx(cloud.horizons[1].diameter));
}

TEST_CASE("deterministic bistable pullback converges") {
  ModelConfig cfg;
  cfg.mu = 0.5;
  cfg.sigma = 0.1;
  cfg.tau = 0.5;
  cfg.h = 0.01;
  cfg.modes = 4;
  cfg.F_coeffs = {3.0, 0.0, -1.0};
  const auto noise = make_realization(cfg, 1, 30.0, 0.0);
  CHECK(noise.field.is_zero());
  PullbackOptions opts;
  opts.horizons = {10.0, 20.0, 30.0};
  opts.n_initial = 16;
  opts.init_radius = 3.0;
  opts.workers = 2;
  const PointCloud cloud = pullback_sample(cfg, noise, opts);
  const auto& last = cloud.horizons.back();
  CHECK(last.diameter > 0.5);  // both wells are populated
  CHECK(last.hausdorff_to_previous < 0.01 * last.diameter);
}

TEST_CASE("pullback determinism and seed dependence") {
  ModelConfig cfg = linear_config();
  cfg.F_coeffs = {1.0, 0.0, -1.0};
  PullbackOptions opts;
  opts.horizons = {2.0};
  opts.n_initial = 6;
  opts.init_radius = 1.0;
  const auto n1 = make_realization(cfg, 5, 2.0, 0.0);
  const auto a = pullback_sample(cfg, n1, opts);
  opts.workers = 3;
  const auto b = pullback_sample(cfg, n1, opts);
  CHECK(a.points == b.points);
  const auto c = pullback_sample(cfg, make_realization(cfg, 6, 2.0, 0.0), opts);
  CHECK(a.points != c.points);
}

TEST_CASE("absorbing radius estimate") {
  ModelConfig cfg = linear_config();
  cfg.F_coeffs = {1.0, 0.0, -1.0};
  const double c = estimate_absorbing_radius(cfg, 1, 20.0, 5.0);
  CHECK(std::isfinite(c));
  CHECK(c > 0.0);
  CHECK(estimate_absorbing_radius(cfg, 1, 20.0, 5.0) == c);
}

TEST_CASE("squeeze right-hand sides") {
  SqueezeConstants k;
  k.K = 2.0;
  k.M = 1.5;
  k.L_f = 0.1;
  k.rho1 = -1.0;
  k.rhom = -3.0;
  const double gap = 2.0, t = 0.7, iR = 0.3, iR2 = 0.2;
  const double e1 = (k.M * k.L_f + k.rho1) * t;
  CHECK(squeeze_rhs_p(k, t, iR) == doctest::Approx(k.M * std::exp(e1 + iR)).epsilon(1e-14));
  const double q = k.K * std::exp(k.rhom * t) + k.K * k.M / std::sqrt(2 * gap) * std::exp(e1 + k.M * iR + iR2) +
                   k.K * k.M * k.L_f * std::exp(e1 + k.M * iR) / gap;
  CHECK(squeeze_rhs_q(k, t, iR, iR2) == doctest::Approx(q).epsilon(1e-14));
  CHECK(squeeze_rhs_p(k, 0.0, 0.0) == doctest::Approx(k.M));
}

TEST_CASE("squeezing audit") {
  const ModelConfig cfg = linear_config();
  const auto model = model_for(cfg, 2);
  const auto noise = make_realization(cfg, 11, 4.0, 1.0);
  PullbackOptions opts;
  opts.horizons = {4.0};
  opts.n_initial = 12;
  opts.init_radius = 2.0;
  const PointCloud cloud = pullback_sample(cfg, noise, opts);
  const auto k = constants_for(cfg, model, 0.0);

  SUBCASE("linear configuration satisfies both estimates") {
    const auto rep = verify_squeezing(cfg, noise, cloud, model, k, 1.0, 30, 3, 2);
    CHECK(rep.pairs.size() == 30);
    CHECK(rep.rate_p == 1.0);
    CHECK(rep.rate_q == 1.0);
    CHECK(rep.rate_both == 1.0);
    // F = 0 gives R = 0 along the path
    CHECK(rep.int_R == 0.0);
    CHECK(rep.int_R2 == 0.0);
    for (const auto& p : rep.pairs) CHECK(p.first != p.second);
  }
  SUBCASE("identical points pass trivially") {
    PointCloud twin = cloud;
    twin.points.resize(2 * twin.dim);
    std::copy(twin.points.begin(), twin.points.begin() + static_cast<std::ptrdiff_t>(twin.dim),
              twin.points.begin() + static_cast<std::ptrdiff_t>(twin.dim));
    const auto rep = verify_squeezing(cfg, noise, twin, model, k, 1.0, 1, 3);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].delta0 == 0.0);
    CHECK(rep.pairs[0].p_norm == 0.0);
    CHECK(rep.pairs[0].q_norm == 0.0);
    CHECK(rep.rate_both == 1.0);
  }
  SUBCASE("deterministic in seed and worker count") {
    const auto a = verify_squeezing(cfg, noise, cloud, model, k, 1.0, 10, 3, 1);
    const auto b = verify_squeezing(cfg, noise, cloud, model, k, 1.0, 10, 3, 4);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
      CHECK(a.pairs[i].first == b.pairs[i].first);
      CHECK(a.pairs[i].p_norm == b.pairs[i].p_norm);
      CHECK(a.pairs[i].q_norm == b.pairs[i].q_norm);
    }
  }
}
