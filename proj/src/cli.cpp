#include "delaydim/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "delaydim/attractor.hpp"
#include "delaydim/bound.hpp"
#include "delaydim/config.hpp"
#include "delaydim/errors.hpp"
#include "delaydim/geometry.hpp"
#include "delaydim/io.hpp"
#include "delaydim/noise.hpp"
#include "delaydim/solver.hpp"
#include "delaydim/spectral.hpp"

namespace delaydim {

namespace {

namespace fs = std::filesystem;

struct Context {
  RunConfig cfg;
  std::string out;
  std::string hash;
  unsigned workers = 1;
  std::optional<std::string> inputs_path;
  std::optional<std::string> cloud_path;

  std::optional<SpectralModel> model;
  std::optional<double> c;
  std::string c_source;
  std::optional<ErgodicAverages> ergodic;
  std::optional<BoundReport> bound;
  std::optional<PointCloud> cloud;
  std::optional<Json> boxdim;
  std::optional<SqueezeReport> squeeze;

  std::string path(const std::string& name) const { return (fs::path(out) / name).string(); }

  Json provenance() const {
    return {{"tool", "delaydim"}, {"config_hash", hash}, {"seed", cfg.numerics.seed}};
  }

  void emit(const std::string& name, Json report) const {
    report["provenance"] = provenance();
    write_atomic(path(name), render(report));
    std::cout << "wrote " << path(name) << "\n";
  }
};

const SpectralModel& model_of(Context& ctx) {
  if (!ctx.model) {
    const auto& m = ctx.cfg.model;
    ModelOptions opts;
    opts.n_branches = ctx.cfg.numerics.n_branches;
    opts.samples = ctx.cfg.numerics.samples;
    opts.seed = ctx.cfg.numerics.seed;
    opts.delay_steps = std::max<std::size_t>(3, m.delay_steps());
    opts.K_override = ctx.cfg.bound.K_override;
    opts.M_override = ctx.cfg.bound.M_override;
    ctx.model = build_model(laplacian_spectrum(m.modes), m.mu, m.sigma, m.tau, ctx.cfg.bound.cutoff_index, opts);
  }
  return *ctx.model;
}

double c_of(Context& ctx) {
  if (!ctx.c) {
    if (ctx.cfg.bound.c) {
      ctx.c = *ctx.cfg.bound.c;
      ctx.c_source = "config";
    } else {
      const auto& n = ctx.cfg.numerics;
      ctx.c = estimate_absorbing_radius(ctx.cfg.model, n.seed, n.absorbing_T, n.absorbing_burn_in);
      ctx.c_source = "estimated: 1.5 x sup ||v_t|| over [absorbing_burn_in, absorbing_T]";
    }
  }
  return *ctx.c;
}

void stage_spectrum(Context& ctx) {
  Json j = to_json(model_of(ctx));
  ctx.emit("spectrum.json", j);
}

void stage_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const NoiseRealization noise = make_realization(cfg.model, cfg.numerics.seed, 0.0, cfg.numerics.T);
  const DelayRandomPDE pde(cfg.model);
  HistorySegment psi(cfg.model.tau, pde.delay_steps(), cfg.model.modes);
  for (std::size_t i = 0; i < psi.points(); ++i) psi(i, 0) = 1.0;

  const Json header = {{"kind", "trajectory"},
                       {"variables", "v (pathwise random PDE), sine coefficients"},
                       {"initial_history", "v(theta) = e_1 for theta in [-tau, 0]"},
                       {"h", cfg.model.h},
                       {"stride", cfg.numerics.csv_stride},
                       {"provenance", ctx.provenance()}};
  std::string csv = csv_header_block(header) + "t";
  for (std::size_t k = 1; k <= cfg.model.modes; ++k) csv += ",v_" + std::to_string(k);
  csv += ",norm_v\n";
  std::size_t n = 0;
  double max_norm = 0.0;
  IntegrateOptions opts;
  opts.observer = [&](double t, std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    max_norm = std::max(max_norm, std::sqrt(s));
    if (n++ % cfg.numerics.csv_stride != 0) return;
    csv += format_double(t);
    for (double x : v) csv += "," + format_double(x);
    csv += "," + format_double(std::sqrt(s)) + "\n";
  };
  const auto steps = static_cast<std::size_t>(std::llround(cfg.numerics.T / cfg.model.h));
  const Trajectory traj = pde.integrate_v(noise.field, noise.origin, psi, steps, opts);
  write_atomic(ctx.path("trajectory.csv"), csv);
  std::cout << "wrote " << ctx.path("trajectory.csv") << "\n";

  Json report = {{"T", cfg.numerics.T},
                 {"steps", steps},
                 {"terminal_norm", traj.terminal.norm()},
                 {"max_norm_v", max_norm},
                 {"step_rejections", traj.step_rejections},
                 {"trajectory_csv", "trajectory.csv"},
                 {"noise", noise.field.is_zero() ? "zero" : "stationary OU"}};
  if (!noise.field.is_zero()) {
    const Json ou_header = {{"kind", "ou_path"},
                            {"mu", cfg.model.mu},
                            {"h", cfg.model.h},
                            {"t_offset", -static_cast<double>(noise.origin) * cfg.model.h},
                            {"stride", cfg.numerics.csv_stride},
                            {"provenance", ctx.provenance()}};
    write_atomic(ctx.path("noise.csv"), ou_csv(noise.field.ou(), ou_header, cfg.numerics.csv_stride));
    std::cout << "wrote " << ctx.path("noise.csv") << "\n";
    report["noise_csv"] = "noise.csv";
  }
  ctx.emit("simulate.json", report);
}

OUProcessPath ergodic_path(const RunConfig& cfg) {
  const auto steps = static_cast<std::size_t>(std::llround(cfg.numerics.ergodic_T / cfg.model.h));
  bool zero = true;
  for (const auto& g : cfg.model.g_coeffs) {
    for (double x : g) zero = zero && x == 0.0;
  }
  if (zero) {
    OUProcessPath z;
    z.mu = cfg.model.mu;
    z.h = cfg.model.h;
    z.r_values.assign(steps + 1, 0.0);
    return z;
  }
  const WienerPath w = sample_wiener(cfg.numerics.seed, cfg.model.g_coeffs.size(), cfg.model.h, steps);
  return ou_path(w, cfg.model.mu, StationaryInit{});
}

void stage_ergodic(Context& ctx) {
  const double c = c_of(ctx);
  const OUProcessPath z = ergodic_path(ctx.cfg);
  ctx.ergodic = ergodic_averages(z, ctx.cfg.model.F_coeffs, c, ctx.cfg.numerics.ergodic_burn_in);
  if (ctx.ergodic->noisy) {
    std::cerr << "warning: ergodic batch-means standard error exceeds 5% of the mean\n";
  }
  Json j = to_json(*ctx.ergodic);
  j["c"] = c;
  j["c_source"] = ctx.c_source;
  j["F_coeffs"] = ctx.cfg.model.F_coeffs;
  j["R_definition"] = "sum_k |a_k| (c + (c+1) r)^(k-1), r = sum_j z_j^2";
  ctx.emit("ergodic.json", j);
}

BoundInputs composed_inputs(Context& ctx) {
  const SpectralModel& model = model_of(ctx);
  if (!ctx.ergodic) stage_ergodic(ctx);
  BoundInputs in;
  in.alpha = ctx.cfg.bound.alpha;
  in.t0 = ctx.cfg.t0();
  in.K = model.K;
  in.M = model.M;
  in.rho1 = model.rho1();
  in.rhom = model.rhom();
  in.k_m = model.k_m;
  in.L_f = ctx.cfg.model.f.is_zero() ? 0.0 : ctx.cfg.model.f.lipschitz;
  in.ER = ctx.ergodic->ER;
  in.ER2 = ctx.ergodic->ER2;
  in.c = c_of(ctx);
  in.F_coeffs = ctx.cfg.model.F_coeffs;
  return in;
}

void stage_bound(Context& ctx) {
  Json sources;
  BoundInputs in;
  if (ctx.inputs_path) {
    try {
      in = bound_inputs_from_json(Json::parse(read_file(*ctx.inputs_path)));
    } catch (const Json::parse_error& e) {
      throw ConfigError("bound inputs '" + *ctx.inputs_path + "': " + e.what());
    }
    sources = {{"inputs", "file"}};
  } else {
    in = composed_inputs(ctx);
    sources = {{"inputs", "spectrum + ergodic stages"},
               {"K", ctx.model->estimation.K_source},
               {"M", ctx.model->estimation.M_source},
               {"c", ctx.c_source}};
  }
  ctx.bound = hausdorff_bound(in);
  Json j = to_json(*ctx.bound);
  j["sources"] = sources;
  ctx.emit("bound.json", j);
}

void stage_cover(Context& ctx) {
  const auto& p = ctx.cfg.cover;
  const CoverResult res = grid_cover(p.m, p.r1, p.r2, p.norm);
  ctx.emit("cover.json", to_json(res, res.constructed_count <= 1000));
}

void stage_pullback(Context& ctx) {
  const auto& n = ctx.cfg.numerics;
  const NoiseRealization noise = make_realization(ctx.cfg.model, n.seed, n.horizons.back(), ctx.cfg.t0());
  PullbackOptions opts;
  opts.horizons = n.horizons;
  opts.n_initial = n.n_initial;
  opts.c = c_of(ctx);
  opts.workers = ctx.workers;
  ctx.cloud = pullback_sample(ctx.cfg.model, noise, opts);
  const std::string path = ctx.path("cloud.bin");
  write_cloud(path, *ctx.cloud, {{"provenance", ctx.provenance()}, {"c", opts.c}, {"c_source", ctx.c_source}});
  std::cout << "wrote " << path << " and " << sidecar_path(path) << "\n";
}

const PointCloud& cloud_of(Context& ctx) {
  if (!ctx.cloud) ctx.cloud = read_cloud(ctx.cloud_path.value_or(ctx.path("cloud.bin")));
  return *ctx.cloud;
}

void stage_boxdim(Context& ctx) {
  const PointCloud& cloud = cloud_of(ctx);
  const PointSet pts = cloud.as_points();
  const DimensionEstimate box = box_dimension(pts, ctx.cfg.numerics.box_scales);
  const DimensionEstimate corr = correlation_dimension(pts);
  Json warnings = Json::array();
  if (cloud.count() < 100) warnings.push_back("fewer than 100 points; estimates are unreliable");
  if (!box.clean_scaling) warnings.push_back("box counting: r2_fit < 0.98, no clean scaling regime");
  if (!corr.clean_scaling) warnings.push_back("correlation sum: r2_fit < 0.98, no clean scaling regime");
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << "\n";
  Json j = {{"count", cloud.count()},
            {"dim", cloud.dim},
            {"horizon", cloud.horizon},
            {"box", to_json(box)},
            {"correlation", to_json(corr)},
            {"warnings", warnings},
            {"note", "box-counting dimension dominates Hausdorff dimension; compare as box <= d_bound"}};
  ctx.boxdim = j;
  ctx.emit("boxdim.json", j);
}

void stage_squeeze(Context& ctx) {
  const PointCloud& cloud = cloud_of(ctx);
  const double t0 = ctx.cfg.t0();
  if (cloud.noise_future + 1e-12 < t0) {
    throw ConfigError("verify-squeeze: cloud noise covers t <= " + std::to_string(cloud.noise_future) +
                      " but bound.t0 = " + std::to_string(t0));
  }
  const auto& m = ctx.cfg.model;
  if (cloud.modes != m.modes || cloud.delay_steps != m.delay_steps() || cloud.tau != m.tau) {
    throw ConsistencyError("verify-squeeze: cloud grid (tau, delay steps, modes) does not match the model config");
  }
  const SpectralModel& model = model_of(ctx);
  const NoiseRealization noise = make_realization(ctx.cfg.model, cloud.seed, cloud.horizon, cloud.noise_future);
  SqueezeConstants k;
  k.K = model.K;
  k.M = model.M;
  k.L_f = ctx.cfg.model.f.is_zero() ? 0.0 : ctx.cfg.model.f.lipschitz;
  k.rho1 = model.rho1();
  k.rhom = model.rhom();
  k.c = c_of(ctx);
  k.F_coeffs = ctx.cfg.model.F_coeffs;
  ctx.squeeze = verify_squeezing(ctx.cfg.model, noise, cloud, model, k, t0, ctx.cfg.numerics.n_pairs,
                                 ctx.cfg.numerics.seed, ctx.workers);
  Json j = to_json(*ctx.squeeze);
  j["sources"] = {{"K", model.estimation.K_source}, {"M", model.estimation.M_source}, {"c", ctx.c_source}};
  ctx.emit("squeeze.json", j);
}

void stage_pipeline(Context& ctx) {
  stage_spectrum(ctx);
  stage_simulate(ctx);
  stage_ergodic(ctx);
  stage_bound(ctx);
  stage_cover(ctx);
  stage_pullback(ctx);
  stage_boxdim(ctx);
  stage_squeeze(ctx);

  Json consistency = {{"applicable", false}};
  const double box = (*ctx.boxdim)["box"]["slope"].get<double>();
  if (ctx.bound->d_bound) {
    consistency = {{"applicable", true},
                   {"box_dimension", box},
                   {"d_bound", *ctx.bound->d_bound},
                   {"tolerance", 0.3},
                   {"consistent", box <= *ctx.bound->d_bound + 0.3}};
  }
  Json j = {{"stages", {"spectrum", "simulate", "ergodic", "bound", "cover", "pullback", "boxdim", "verify-squeeze"}},
            {"feasible", ctx.bound->condition.feasible},
            {"d_bound", ctx.bound->d_bound ? Json(*ctx.bound->d_bound) : Json(nullptr)},
            {"box_dimension", box},
            {"correlation_dimension", (*ctx.boxdim)["correlation"]["slope"]},
            {"squeeze_rate_P", ctx.squeeze->rate_p},
            {"squeeze_rate_Q", ctx.squeeze->rate_q},
            {"squeeze_rate_both", ctx.squeeze->rate_both},
            {"dimension_consistency", consistency}};
  ctx.emit("pipeline.json", j);
  if (consistency["applicable"].get<bool>() && !consistency["consistent"].get<bool>()) {
    throw ConsistencyError("box-counting estimate exceeds d_bound + 0.3");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"delaydim: stochastic delayed parabolic equation toolkit", "delaydim"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  bool quick = false;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> inputs_path, cloud_path;
  std::optional<std::size_t> cover_m;
  std::optional<double> cover_r1, cover_r2;
  std::optional<std::string> cover_norm;

  app.add_option("--config", config_path, "run configuration (JSON or key = value)");
  app.add_option("--seed", seed, "override numerics.seed");
  app.add_option("--out", out_dir, std::string("output directory (default $") + kOutputEnv + " or ./delaydim_out)");
  app.add_flag("--quick", quick, "shrink experiment sizes 10x");
  app.add_option("--workers", workers, "worker threads for ensembles")->check(CLI::PositiveNumber);

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(Context&);
  };
  const Sub subs[] = {
      {"spectrum", "characteristic roots, decomposition and K, M", stage_spectrum},
      {"simulate", "integrate the random PDE and write the trajectory", stage_simulate},
      {"ergodic", "ergodic averages E(R), E(R^2)", stage_ergodic},
      {"bound", "feasibility condition and Hausdorff dimension bound", stage_bound},
      {"pullback", "pullback sample of the random attractor", stage_pullback},
      {"boxdim", "box-counting and correlation dimension of a cloud", stage_boxdim},
      {"cover", "constructive covering-lemma audit", stage_cover},
      {"verify-squeeze", "audit the squeezing estimates on cloud pairs", stage_squeeze},
      {"pipeline", "all stages in dependency order", stage_pipeline},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    if (std::string(s.name) == "bound") sub->add_option("--inputs", inputs_path, "BoundInputs JSON");
    if (std::string(s.name) == "boxdim" || std::string(s.name) == "verify-squeeze") {
      sub->add_option("--cloud", cloud_path, "cloud binary (default <out>/cloud.bin)");
    }
    if (std::string(s.name) == "cover") {
      sub->add_option("--m", cover_m, "subspace dimension");
      sub->add_option("--r1", cover_r1, "small radius");
      sub->add_option("--r2", cover_r2, "large radius");
      sub->add_option("--norm", cover_norm, "sup or euclidean");
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Context ctx;
    ctx.cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) ctx.cfg.numerics.seed = *seed;
    if (quick) ctx.cfg.apply_quick();
    if (cover_m) ctx.cfg.cover.m = *cover_m;
    if (cover_r1) ctx.cfg.cover.r1 = *cover_r1;
    if (cover_r2) ctx.cfg.cover.r2 = *cover_r2;
    if (cover_norm) ctx.cfg.cover.norm = norm_from_string(*cover_norm);
    ctx.cfg.validate();
    ctx.hash = fnv1a_hex(canonical_config(ctx.cfg));
    ctx.workers = workers;
    ctx.inputs_path = inputs_path;
    ctx.cloud_path = cloud_path;
    if (!out_dir.empty()) {
      ctx.out = out_dir;
    } else if (ctx.cfg.output_dir) {
      ctx.out = *ctx.cfg.output_dir;
    } else if (const char* env = std::getenv(kOutputEnv); env && *env) {
      ctx.out = env;
    } else {
      ctx.out = "delaydim_out";
    }
    const std::string chosen = app.get_subcommands().front()->get_name();
    for (const auto& s : subs) {
      if (chosen == s.name) s.run(ctx);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency fault: " << e.what() << "\n";
    return kExitConsistency;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace delaydim
