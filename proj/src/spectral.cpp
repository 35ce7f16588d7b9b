#include "delaydim/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "delaydim/errors.hpp"
#include "delaydim/lambert_w.hpp"

namespace delaydim {

namespace {

using cd = std::complex<double>;

constexpr double kResidualTol = 1e-10;
constexpr double kDuplicateTol = 1e-8;
constexpr double kGroupTol = 1e-8;
constexpr int kNewtonMaxIter = 100;

bool by_decreasing_real(const CharacteristicRoot& a, const CharacteristicRoot& b) {
  if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
  return a.lambda.imag() > b.lambda.imag();
}

// I_p(x) = int_0^1 e^{-x (1 - u)} u^p du for p = 0..3
std::array<double, 4> exp_moments(double x) {
  std::array<double, 4> out{};
  if (std::abs(x) < 4.0) {
    for (int p = 0; p < 4; ++p) {
      out[static_cast<std::size_t>(p)] = boost::math::quadrature::gauss<double, 20>::integrate(
          [x, p](double u) { return std::exp(-x * (1.0 - u)) * std::pow(u, p); }, 0.0, 1.0);
    }
    return out;
  }
  out[0] = -std::expm1(-x) / x;
  for (std::size_t p = 1; p < 4; ++p) out[p] = (1.0 - static_cast<double>(p) * out[p - 1]) / x;
  return out;
}

// Monomial coefficients of the cubic Lagrange basis on nodes 0, 1, 2, 3.
std::array<std::array<double, 4>, 4> lagrange_cubic() {
  std::array<std::array<double, 4>, 4> coeffs{};
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
    double denom = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      std::array<double, 4> next{};
      for (int d = 0; d < 3; ++d) {
        next[static_cast<std::size_t>(d) + 1] += poly[static_cast<std::size_t>(d)];
        next[static_cast<std::size_t>(d)] -= j * poly[static_cast<std::size_t>(d)];
      }
      poly = next;
      denom *= static_cast<double>(i - j);
    }
    for (auto& c : poly) c /= denom;
    coeffs[static_cast<std::size_t>(i)] = poly;
  }
  return coeffs;
}

std::size_t steps_for(double t, double h) {
  if (t < 0.0) throw ConfigError("semigroup: t must be nonnegative");
  const double ratio = t / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("semigroup: t must be a multiple of the grid step");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

LaplacianSpectrum laplacian_spectrum(std::size_t modes) {
  if (modes == 0) throw ConfigError("laplacian_spectrum: need at least one mode");
  LaplacianSpectrum s;
  s.eigenvalues.resize(modes);
  for (std::size_t k = 1; k <= modes; ++k) {
    s.eigenvalues[k - 1] = static_cast<double>(k) * static_cast<double>(k);
  }
  return s;
}

std::complex<double> characteristic_function(std::complex<double> lambda, double a, double sigma,
                                             double tau) {
  return lambda + a + sigma * std::exp(-lambda * tau);
}

RootSearch characteristic_roots(double a, double sigma, double tau, int n_branches,
                                std::size_t mode) {
  if (tau < 0.0) throw ConfigError("characteristic_roots: tau must be nonnegative");
  RootSearch out;
  if (tau == 0.0 || sigma == 0.0) {
    // delay-free or decoupled: a single real root, every other branch is empty
    const double lambda = tau == 0.0 ? -a - sigma : -a;
    out.roots.push_back({cd(lambda, 0.0), mode, 0, 0.0});
    return out;
  }
  if (n_branches < 1) throw ConfigError("characteristic_roots: need at least one branch");

  // z = -sigma tau e^{a tau}, kept in log form
  const cd log_z(std::log(std::abs(sigma) * tau) + a * tau, sigma > 0.0 ? std::numbers::pi : 0.0);

  for (int b = -n_branches; b < n_branches; ++b) {
    const auto w = lambert_w_from_log(log_z, b);
    if (!w) {
      out.failures.push_back({mode, b, "Lambert W iteration did not converge"});
      continue;
    }
    cd lambda = -a + *w / tau;
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      const cd e = std::exp(-lambda * tau);
      const cd g = lambda + a + sigma * e;
      const cd dg = 1.0 - sigma * tau * e;
      const cd step = g / dg;
      lambda -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(lambda))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      out.failures.push_back({mode, b, "Newton did not converge in 100 steps"});
      continue;
    }
    const double residual = std::abs(characteristic_function(lambda, a, sigma, tau));
    if (!(residual < kResidualTol)) {
      out.failures.push_back({mode, b, "residual " + std::to_string(residual)});
      continue;
    }
    if (std::abs(lambda.imag()) < 1e-13 * (1.0 + std::abs(lambda.real()))) {
      lambda = cd(lambda.real(), 0.0);
    }
    const bool dup = std::any_of(out.roots.begin(), out.roots.end(), [&](const auto& r) {
      return std::abs(r.lambda - lambda) < kDuplicateTol;
    });
    if (dup) {
      out.failures.push_back({mode, b, "converged to a root already found on another branch"});
      continue;
    }
    out.roots.push_back({lambda, mode, b, residual});
  }
  // Real coefficients: close the set under conjugation. The branch range is
  // only conjugation-closed for one sign of z, and Newton can drift a seed onto
  // the partner of a root already found.
  const std::size_t found = out.roots.size();
  for (std::size_t i = 0; i < found; ++i) {
    const cd conj = std::conj(out.roots[i].lambda);
    if (conj.imag() == 0.0) continue;
    const bool present = std::any_of(out.roots.begin(), out.roots.end(), [&](const auto& r) {
      return std::abs(r.lambda - conj) < kDuplicateTol;
    });
    if (present) continue;
    const int b = out.roots[i].branch;
    out.roots.push_back({conj, mode, sigma > 0.0 ? -b - 1 : -b,
                         std::abs(characteristic_function(conj, a, sigma, tau))});
  }
  std::sort(out.roots.begin(), out.roots.end(), by_decreasing_real);
  return out;
}

LinearDelaySemigroup::LinearDelaySemigroup(std::vector<double> eigenvalues, DelayParams params,
                                           std::size_t delay_steps)
    : eigenvalues_(std::move(eigenvalues)), params_(params), delay_steps_(delay_steps) {
  if (delay_steps_ < 3) throw ConfigError("LinearDelaySemigroup: need at least 3 steps per delay");
  if (!(params_.tau > 0.0)) throw ConfigError("LinearDelaySemigroup: tau must be positive");
  const double h = params_.tau / static_cast<double>(delay_steps_);
  const auto basis = lagrange_cubic();
  decay_.resize(eigenvalues_.size());
  weights_.resize(eigenvalues_.size() * 4);
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    const double x = (eigenvalues_[k] + params_.mu) * h;
    decay_[k] = std::exp(-x);
    const auto moments = exp_moments(x);
    for (std::size_t i = 0; i < 4; ++i) {
      double w = 0.0;
      for (std::size_t p = 0; p < 4; ++p) w += basis[i][p] * moments[p];
      weights_[k * 4 + i] = h * w;
    }
  }
}

void LinearDelaySemigroup::advance(HistorySegment& seg) const {
  const std::size_t n = seg.modes();
  auto data = seg.data();
  const auto last = seg.at(delay_steps_);
  std::vector<double> next(n);
  for (std::size_t k = 0; k < n; ++k) {
    double delayed = 0.0;
    for (std::size_t i = 0; i < 4; ++i) delayed += weights_[k * 4 + i] * seg(i, k);
    next[k] = decay_[k] * last[k] - params_.sigma * delayed;
  }
  std::copy(data.begin() + static_cast<std::ptrdiff_t>(n), data.end(), data.begin());
  std::copy(next.begin(), next.end(), seg.at(delay_steps_).begin());
}

HistorySegment LinearDelaySemigroup::apply(const HistorySegment& seg, std::size_t steps) const {
  if (seg.delay_steps() != delay_steps_ || seg.modes() != eigenvalues_.size()) {
    throw ConfigError("LinearDelaySemigroup: segment grid mismatch");
  }
  HistorySegment out = seg;
  for (std::size_t s = 0; s < steps; ++s) advance(out);
  return out;
}

HistorySegment LinearDelaySemigroup::apply(double t, const HistorySegment& seg) const {
  return apply(seg, steps_for(t, params_.tau / static_cast<double>(delay_steps_)));
}

HistorySegment semigroup_S(double t, const HistorySegment& seg, const LaplacianSpectrum& spectrum,
                           DelayParams params) {
  params.tau = seg.tau();
  LinearDelaySemigroup s(spectrum.eigenvalues, params, seg.delay_steps());
  return s.apply(t, seg);
}

std::vector<CharacteristicRoot> SpectralModel::retained_roots() const {
  std::vector<CharacteristicRoot> out;
  const double cut = rhom() - kGroupTol;
  for (const auto& r : roots) {
    if (r.lambda.real() >= cut) out.push_back(r);
  }
  return out;
}

HistorySegment random_unit_history(std::uint64_t seed, std::size_t index, double tau,
                                   std::size_t delay_steps, std::size_t modes) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;

  HistorySegment seg(tau, delay_steps, modes);
  constexpr std::size_t kHarmonics = 4;
  for (std::size_t k = 0; k < modes; ++k) {
    const double amp = normal(rng) / static_cast<double>(k + 1);
    std::array<double, kHarmonics> cos_c{};
    std::array<double, kHarmonics> sin_c{};
    for (std::size_t j = 0; j < kHarmonics; ++j) {
      cos_c[j] = normal(rng) / static_cast<double>(j + 1);
      sin_c[j] = normal(rng) / static_cast<double>(j + 1);
    }
    for (std::size_t i = 0; i < seg.points(); ++i) {
      const double s = std::numbers::pi * seg.theta(i) / tau;
      double v = cos_c[0];
      for (std::size_t j = 1; j < kHarmonics; ++j) {
        v += cos_c[j] * std::cos(static_cast<double>(j) * s) +
             sin_c[j] * std::sin(static_cast<double>(j) * s);
      }
      seg(i, k) = amp * v;
    }
  }
  const double n = seg.norm();
  if (n > 0.0) seg *= 1.0 / n;
  return seg;
}

SpectralModel build_model(const LaplacianSpectrum& spectrum, double mu, double sigma, double tau,
                          std::size_t cutoff_index, const ModelOptions& options) {
  if (!(mu > 0.0)) throw ConfigError("build_model: mu must be positive");
  if (!(tau > 0.0)) throw ConfigError("build_model: tau must be positive");
  if (cutoff_index == 0) throw ConfigError("build_model: cutoff_index is 1-based");

  SpectralModel model;
  model.eigenvalues = spectrum.eigenvalues;
  model.params = {mu, sigma, tau};
  model.n_branches = options.n_branches;
  model.cutoff_index = cutoff_index;

  double outer_branch_bound = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spectrum.modes(); ++k) {
    auto rs = characteristic_roots(spectrum.eigenvalues[k] + mu, sigma, tau, options.n_branches,
                                   k + 1);
    for (const auto& r : rs.roots) {
      if (sigma != 0.0 &&
          (r.branch == -options.n_branches || r.branch == options.n_branches - 1)) {
        outer_branch_bound = std::max(outer_branch_bound, r.lambda.real());
      }
      model.roots.push_back(r);
    }
    model.failures.insert(model.failures.end(), rs.failures.begin(), rs.failures.end());
  }
  std::sort(model.roots.begin(), model.roots.end(), by_decreasing_real);

  for (const auto& r : model.roots) {
    if (!model.rho.empty() && std::abs(r.lambda.real() - model.rho.back()) <= kGroupTol) {
      ++model.multiplicity.back();
    } else {
      model.rho.push_back(r.lambda.real());
      model.multiplicity.push_back(1);
    }
  }
  if (cutoff_index > model.rho.size()) {
    throw ConfigError("build_model: cutoff_index exceeds the number of distinct root real parts");
  }
  if (!(model.rhom() < 0.0)) {
    throw ConfigError("build_model: cutoff real part rho_m = " + std::to_string(model.rhom()) +
                      " is not negative");
  }
  if (model.rhom() <= outer_branch_bound + kGroupTol) {
    throw ConfigError("build_model: cutoff reaches the outermost computed branch; raise n_branches");
  }
  for (const auto& f : model.failures) {
    // a failed branch could hide a root above the cutoff
    if (f.reason.find("already found") == std::string::npos) {
      throw NumericalError("build_model: root search failed on mode " + std::to_string(f.mode) +
                           " branch " + std::to_string(f.branch) + ": " + f.reason);
    }
  }
  for (std::size_t i = 0; i < cutoff_index; ++i) model.k_m += model.multiplicity[i];
  model.gap = model.rho1() - model.rhom();

  // Sampled suprema for K and M.
  auto& meta = model.estimation;
  meta.samples = options.samples;
  meta.seed = options.seed;
  meta.delay_steps = options.delay_steps;
  meta.horizon = 5.0 * tau;
  const LinearDelaySemigroup semigroup(model.eigenvalues, model.params, options.delay_steps);
  const SpectralProjector projector(model, tau, options.delay_steps);
  const double h = tau / static_cast<double>(options.delay_steps);
  const std::size_t total = 5 * options.delay_steps;
  double k_best = 0.0;
  double m_best = 0.0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    HistorySegment x =
        random_unit_history(options.seed, s, tau, options.delay_steps, spectrum.modes());
    const double x_norm = x.norm();
    for (std::size_t n = 0; n <= total; ++n) {
      if (n > 0) semigroup.advance(x);
      const double t = static_cast<double>(n) * h;
      const double m_ratio = x.norm() * std::exp(-model.rho1() * t) / x_norm;
      const double k_ratio = projector.complement(x).norm() * std::exp(-model.rhom() * t) / x_norm;
      if (m_ratio > m_best) {
        m_best = m_ratio;
        meta.M_argmax_sample = s;
        meta.M_argmax_t = t;
      }
      if (k_ratio > k_best) {
        k_best = k_ratio;
        meta.K_argmax_sample = s;
        meta.K_argmax_t = t;
      }
    }
  }
  meta.K_sampled = k_best;
  meta.M_sampled = m_best;
  // Q is a nonzero projection, so its norm (and K) is at least 1.
  model.K = std::max(1.0, k_best);
  model.M = std::max(1.0, m_best);
  if (options.K_override) {
    model.K = *options.K_override;
    meta.K_source = "override";
  }
  if (options.M_override) {
    model.M = *options.M_override;
    meta.M_source = "override";
  }
  return model;
}

SpectralProjector::SpectralProjector(const SpectralModel& model, double tau,
                                     std::size_t delay_steps)
    : tau_(tau), delay_steps_(delay_steps), modes_(model.eigenvalues.size()) {
  const double sigma = model.params.sigma;
  const double h = tau / static_cast<double>(delay_steps);
  const std::size_t points = delay_steps + 1;
  const auto retained = model.retained_roots();

  for (std::size_t k = 0; k < modes_; ++k) {
    ModeBlock block;
    block.mode = k;
    for (const auto& r : retained) {
      if (r.mode == k + 1) block.lambdas.push_back(r.lambda);
    }
    if (block.lambdas.empty()) continue;
    const std::size_t r = block.lambdas.size();
    block.adjoint.assign(r * points, cd(0.0, 0.0));
    block.basis.assign(r * points, cd(0.0, 0.0));
    for (std::size_t a = 0; a < r; ++a) {
      const cd lambda = block.lambdas[a];
      const cd normalizer = 1.0 - sigma * tau * std::exp(-lambda * tau);
      if (std::abs(normalizer) < 1e-12) {
        throw NumericalError("SpectralProjector: defective root (1 - sigma tau e^{-lambda tau} = 0)");
      }
      for (std::size_t i = 0; i < points; ++i) {
        const double theta = -tau + static_cast<double>(i) * h;
        const double w = (i == 0 || i + 1 == points) ? 0.5 * h : h;
        block.adjoint[a * points + i] = -sigma * w * std::exp(-lambda * (theta + tau));
        block.basis[a * points + i] = std::exp(lambda * theta);
      }
      block.adjoint[a * points + points - 1] += 1.0;
    }
    Eigen::MatrixXcd gram(r, r);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) {
        cd g(0.0, 0.0);
        for (std::size_t i = 0; i < points; ++i) {
          g += block.adjoint[a * points + i] * block.basis[b * points + i];
        }
        gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
      }
    }
    const Eigen::MatrixXcd inv = gram.fullPivLu().inverse();
    block.gram_inv.resize(r * r);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) {
        block.gram_inv[a * r + b] = inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
    blocks_.push_back(std::move(block));
  }
}

HistorySegment SpectralProjector::project(const HistorySegment& seg) const {
  if (seg.delay_steps() != delay_steps_ || seg.modes() != modes_ || seg.tau() != tau_) {
    throw ConfigError("SpectralProjector: segment grid does not match the projector grid");
  }
  HistorySegment out(seg.tau(), seg.delay_steps(), seg.modes());
  const std::size_t points = seg.points();
  std::vector<cd> b;
  std::vector<cd> c;
  for (const auto& block : blocks_) {
    const std::size_t r = block.lambdas.size();
    b.assign(r, cd(0.0, 0.0));
    c.assign(r, cd(0.0, 0.0));
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t i = 0; i < points; ++i) b[a] += block.adjoint[a * points + i] * seg(i, block.mode);
    }
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t q = 0; q < r; ++q) c[a] += block.gram_inv[a * r + q] * b[q];
    }
    for (std::size_t i = 0; i < points; ++i) {
      cd v(0.0, 0.0);
      for (std::size_t a = 0; a < r; ++a) v += c[a] * block.basis[a * points + i];
      out(i, block.mode) = v.real();
    }
  }
  return out;
}

HistorySegment SpectralProjector::complement(const HistorySegment& seg) const {
  return seg - project(seg);
}

HistorySegment project_P(const HistorySegment& seg, const SpectralModel& model) {
  if (std::abs(seg.tau() - model.params.tau) > 1e-12 * model.params.tau) {
    throw ConfigError("project_P: segment delay does not match the model");
  }
  return SpectralProjector(model, seg.tau(), seg.delay_steps()).project(seg);
}

}  // namespace delaydim
