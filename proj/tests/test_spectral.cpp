#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "delaydim/errors.hpp"
#include "delaydim/lambert_w.hpp"
#include "delaydim/spectral.hpp"
#include "oracles.hpp"

using namespace delaydim;

namespace {

HistorySegment mode_segment(double tau, std::size_t steps, std::size_t modes, std::size_t k,
                            const std::function<double(double)>& f) {
  HistorySegment seg(tau, steps, modes);
  for (std::size_t i = 0; i < seg.points(); ++i) seg(i, k) = f(seg.theta(i));
  return seg;
}

}  // namespace

TEST_CASE("laplacian_spectrum") {
  CHECK(laplacian_spectrum(3).eigenvalues == std::vector<double>{1.0, 4.0, 9.0});
  CHECK(laplacian_spectrum(1).eigenvalues == std::vector<double>{1.0});
  CHECK_THROWS_AS(laplacian_spectrum(0), ConfigError);
}

TEST_CASE("lambert_w satisfies w e^w = z on several branches") {
  for (std::complex<double> z : {std::complex<double>(0.5, 0.0), {-0.2, 0.0}, {3.0, -2.0}, {-1e-3, 1e-4}}) {
    for (int b = -3; b <= 3; ++b) {
      const auto w = lambert_w(z, b);
      REQUIRE(w.has_value());
      CHECK(std::abs(*w * std::exp(*w) - z) < 1e-12 * (1.0 + std::abs(z)));
    }
  }
  // W_0(1) is the omega constant
  CHECK(lambert_w({1.0, 0.0}, 0)->real() == doctest::Approx(0.5671432904097838).epsilon(1e-14));
}

TEST_CASE("lambert_w follows the standard branch convention") {
  // reference values from an independent implementation (scipy.special.lambertw)
  struct Ref {
    std::complex<double> z;
    int branch;
    std::complex<double> w;
  };
  const Ref refs[] = {
      {{-1.3, -0.3}, -1, {-1.7395786669052824, -7.3961817203447255}},
      {{-1.3, 0.3}, -1, {-0.2284334352384508, -1.660918224990058}},
      {{-0.6796, 0.0}, 0, {-0.58515621730688705, 1.0705859865614966}},
      {{-0.2, -0.001}, -1, {-3.7217113491348295, -7.3820120213028035}},
      {{-0.2, 0.0}, -1, {-2.5426413577735265, 0}},
      {{2.0, 1.0}, 1, {-0.82069322764636887, 5.0137881918681249}},
      {{0.0, -0.5}, 0, {0.16259964821886691, -0.39262857399163942}},
  };
  for (const auto& r : refs) {
    const auto w = lambert_w(r.z, r.branch);
    REQUIRE(w.has_value());
    CHECK(std::abs(*w - r.w) < 1e-12 * (1.0 + std::abs(r.w)));
  }
}

TEST_CASE("characteristic roots: worked examples") {
  SUBCASE("delay-free limit") {
    const auto rs = characteristic_roots(2.5, 0.5, 0.0, 8);
    REQUIRE(rs.roots.size() == 1);
    CHECK(rs.roots[0].lambda == std::complex<double>(-3.0, 0.0));
  }
  SUBCASE("principal root of lambda + 1 + 0.1 e^{-0.5 lambda}") {
    const auto rs = characteristic_roots(1.0, 0.1, 0.5, 8);
    REQUIRE(!rs.roots.empty());
    const auto top = rs.roots.front();
    CHECK(top.lambda.real() == doctest::Approx(-1.180).epsilon(1e-3));
    CHECK(std::abs(top.lambda.imag()) < 1e-12);
    CHECK(top.residual < 1e-10);
    const auto ref = oracle::newton_root(1.0, 0.1, 0.5, {-1.0, 0.0});
    CHECK(std::abs(top.lambda - ref) < 1e-12);
    CHECK(std::abs(oracle::char_fn(top.lambda, 1.0, 0.1, 0.5)) < 1e-10);
  }
  SUBCASE("no delay coupling") {
    const auto rs = characteristic_roots(1.0, 0.0, 1.0, 8);
    REQUIRE(rs.roots.size() == 1);
    CHECK(rs.roots[0].lambda == std::complex<double>(-1.0, 0.0));
    CHECK(rs.failures.empty());
  }
}

TEST_CASE("characteristic roots: certification, ordering, conjugates") {
  for (double a : {2.0, 5.0, 17.0}) {
    for (double sigma : {0.1, 0.5, -0.5, 3.0}) {
      for (double tau : {0.25, 0.5, 1.0}) {
        const auto rs = characteristic_roots(a, sigma, tau, 8);
        CHECK(rs.failures.empty());
        for (std::size_t i = 0; i < rs.roots.size(); ++i) {
          const auto l = rs.roots[i].lambda;
          CHECK(rs.roots[i].residual < 1e-10);
          CHECK(std::abs(oracle::char_fn(l, a, sigma, tau)) < 1e-10 * (1.0 + std::abs(l)));
          if (i > 0) CHECK(rs.roots[i - 1].lambda.real() >= l.real() - 1e-12);
          for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(rs.roots[j].lambda - l) > 1e-8);
          if (std::abs(l.imag()) > 1e-9) {
            bool has_conj = false;
            for (const auto& o : rs.roots) has_conj = has_conj || std::abs(o.lambda - std::conj(l)) < 1e-8;
            CHECK(has_conj);
          }
        }
      }
    }
  }
}

TEST_CASE("characteristic roots agree with the argument principle") {
  const double a = 2.0, sigma = 0.5, tau = 1.0;
  const auto rs = characteristic_roots(a, sigma, tau, 10);
  // rectangle well inside the reach of the computed branches
  const double x0 = -6.0, x1 = 1.0, y0 = -40.0, y1 = 40.0;
  int inside = 0;
  for (const auto& r : rs.roots) {
    inside += r.lambda.real() > x0 && r.lambda.real() < x1 && r.lambda.imag() > y0 && r.lambda.imag() < y1;
  }
  CHECK(inside == oracle::winding_count(a, sigma, tau, x0, x1, y0, y1));
  CHECK(inside > 2);
}

TEST_CASE("build_model: decoupled heat modes") {
  const auto m = build_model(laplacian_spectrum(2), 1.0, 0.0, 0.7, 2);
  CHECK(m.rho == std::vector<double>{-2.0, -5.0});
  CHECK(m.multiplicity == std::vector<std::size_t>{1, 1});
  CHECK(m.k_m == 2);
  CHECK(m.gap == doctest::Approx(3.0));
  const auto m1 = build_model(laplacian_spectrum(2), 1.0, 0.0, 0.7, 1);
  CHECK(m1.k_m == 1);
  CHECK(m1.rho1() == -2.0);
}

TEST_CASE("build_model: complex pairs count twice") {
  const auto m = build_model(laplacian_spectrum(1), 1.0, 3.0, 1.0, 2);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < 2; ++i) expected += m.multiplicity[i];
  CHECK(m.k_m == expected);
  // sigma = 3, tau = 1 gives a complex leading pair for a = 2
  CHECK(m.multiplicity[0] == 2);
}

TEST_CASE("build_model: sampled K and M") {
  ModelOptions opts;
  opts.samples = 200;
  const auto m = build_model(laplacian_spectrum(1), 1.0, 0.1, 0.5, 1, opts);
  CHECK(m.K >= 1.0);
  CHECK(m.M >= 1.0);
  CHECK(m.estimation.samples == 200);
  CHECK(m.estimation.K_argmax_sample < 200);
  CHECK(m.estimation.M_argmax_sample < 200);
  CHECK(m.estimation.K_source == "sampled");
  opts.samples = 400;
  const auto more = build_model(laplacian_spectrum(1), 1.0, 0.1, 0.5, 1, opts);
  CHECK(more.estimation.K_sampled >= m.estimation.K_sampled);
  CHECK(more.estimation.M_sampled >= m.estimation.M_sampled);
  opts.K_override = 7.0;
  const auto over = build_model(laplacian_spectrum(1), 1.0, 0.1, 0.5, 1, opts);
  CHECK(over.K == 7.0);
  CHECK(over.estimation.K_source == "override");
}

TEST_CASE("build_model rejects a nonnegative cutoff") {
  // a + sigma < 0 puts a real root in the right half plane
  CHECK_THROWS_AS(build_model(laplacian_spectrum(1), 1.0, -5.0, 0.5, 1), ConfigError);
  CHECK_THROWS_AS(build_model(laplacian_spectrum(2), 1.0, 0.0, 0.5, 3), ConfigError);
}

TEST_CASE("semigroup S(t)") {
  const double tau = 0.5;
  const std::size_t n = 50;
  const DelayParams p{1.0, 0.0, tau};
  const auto spec = laplacian_spectrum(3);
  SUBCASE("t = 0 is the identity") {
    const auto seg = random_unit_history(3, 0, tau, n, 3);
    CHECK(distance(semigroup_S(0.0, seg, spec, p), seg) == 0.0);
  }
  SUBCASE("sigma = 0 constant history decays like the scalar ODE") {
    const auto seg = mode_segment(tau, n, 3, 1, [](double) { return 2.0; });
    const double t = 1.3;
    const auto out = semigroup_S(t, seg, spec, p);
    CHECK(out(n, 1) == doctest::Approx(2.0 * std::exp(-(4.0 + 1.0) * t)).epsilon(1e-12));
  }
  SUBCASE("log-slope matches the principal root") {
    const DelayParams q{1.0, 0.1, tau};
    const auto single = laplacian_spectrum(1);
    const auto seg = random_unit_history(5, 1, tau, n, 1);
    const double t1 = 5 * tau, t2 = 10 * tau;
    const double slope = std::log(semigroup_S(t2, seg, single, q).norm() / semigroup_S(t1, seg, single, q).norm()) / (t2 - t1);
    const double rho = oracle::newton_root(2.0, 0.1, tau, {-2.0, 0.0}).real();
    CHECK(std::abs(slope - rho) <= 0.02 * std::abs(rho));
  }
  SUBCASE("semigroup property") {
    const DelayParams q{1.0, 0.5, tau};
    const LinearDelaySemigroup S(spec.eigenvalues, q, n);
    const auto seg = random_unit_history(9, 2, tau, n, 3);
    const auto lhs = S.apply(seg, 70);
    const auto rhs = S.apply(S.apply(seg, 30), 40);
    CHECK(distance(lhs, rhs) <= 1e-8 * seg.norm());
  }
}

TEST_CASE("spectral projection") {
  const double tau = 0.5;
  const std::size_t n = 50;
  SUBCASE("sigma = 0 eigenfunction is fixed") {
    const auto model = build_model(laplacian_spectrum(3), 1.0, 0.0, tau, 2);
    const double lambda = -(4.0 + 1.0);
    const auto seg = mode_segment(tau, n, 3, 1, [&](double th) { return 0.8 * std::exp(lambda * th); });
    CHECK(distance(project_P(seg, model), seg) < 1e-10);
    const auto zero = HistorySegment(tau, n, 3);
    CHECK(project_P(zero, model).norm() == 0.0);
  }
  SUBCASE("idempotence, commutation and dichotomy with sigma = 0.1") {
    const auto spec = laplacian_spectrum(3);
    const DelayParams p{1.0, 0.1, tau};
    ModelOptions opts;
    opts.delay_steps = n;
    const auto model = build_model(spec, 1.0, 0.1, tau, 2, opts);
    const SpectralProjector P(model, tau, n);
    const LinearDelaySemigroup S(spec.eigenvalues, p, n);
    double idem = 0.0, comm = 0.0, dich = -1e300;
    for (std::size_t s = 0; s < 100; ++s) {
      const auto seg = random_unit_history(77, s, tau, n, 3);
      const auto Pseg = P.project(seg);
      idem = std::max(idem, distance(P.project(Pseg), Pseg) / seg.norm());
      auto x = seg;
      for (std::size_t step = 0; step <= 5 * n; ++step) {
        const double t = static_cast<double>(step) * tau / n;
        const double q = P.complement(x).norm() / seg.norm();
        if (q > 0.0) dich = std::max(dich, std::log(q) - model.rhom() * t - std::log(model.K) - 0.05 * t);
        S.advance(x);
      }
    }
    // The trapezoid bilinear form commutes with S only up to O(h^2), so the
    // commutation check runs on a refined grid.
    const std::size_t fine = 1000;
    ModelOptions fine_opts;
    fine_opts.delay_steps = fine;
    fine_opts.samples = 10;
    const auto fine_model = build_model(spec, 1.0, 0.1, tau, 2, fine_opts);
    const SpectralProjector Pf(fine_model, tau, fine);
    const LinearDelaySemigroup Sf(spec.eigenvalues, p, fine);
    for (std::size_t s = 0; s < 100; ++s) {
      const auto seg = random_unit_history(77, s, tau, fine, 3);
      const auto Pseg = Pf.project(seg);
      for (std::size_t mult : {1u, 2u, 5u}) {
        const std::size_t steps = mult * fine;
        comm = std::max(comm, distance(Pf.project(Sf.apply(seg, steps)), Sf.apply(Pseg, steps)) / seg.norm());
      }
    }
    CHECK(idem <= 1e-8);
    CHECK(comm <= 1e-6);
    CHECK(dich <= 0.0);
  }
  SUBCASE("defective roots are rejected") {
    // a = 2, tau = 1, sigma = e^{-3}: lambda = -3 is a double root
    SpectralModel m;
    m.eigenvalues = {1.0};
    m.params = {1.0, std::exp(-3.0), 1.0};
    m.roots = {{{-3.0, 0.0}, 1, 0, 0.0}};
    m.rho = {-3.0};
    m.multiplicity = {1};
    m.cutoff_index = 1;
    CHECK_THROWS_AS(SpectralProjector(m, 1.0, 20), NumericalError);
  }
}

TEST_CASE("random_unit_history has unit norm and is reproducible") {
  const auto a = random_unit_history(1, 5, 0.5, 40, 4);
  const auto b = random_unit_history(1, 5, 0.5, 40, 4);
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(distance(a, b) == 0.0);
  CHECK(distance(a, random_unit_history(1, 6, 0.5, 40, 4)) > 0.0);
}
