#include "delaydim/io.hpp"

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "delaydim/errors.hpp"

namespace delaydim {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const SpectralModel& model) {
  Json roots = Json::array();
  for (const auto& r : model.roots) {
    roots.push_back({{"re", r.lambda.real()},
                     {"im", r.lambda.imag()},
                     {"mode", r.mode},
                     {"branch", r.branch},
                     {"residual", r.residual}});
  }
  Json failures = Json::array();
  for (const auto& f : model.failures) {
    failures.push_back({{"mode", f.mode}, {"branch", f.branch}, {"reason", f.reason}});
  }
  const auto& e = model.estimation;
  return {{"eigenvalues", model.eigenvalues},
          {"params", {{"mu", model.params.mu}, {"sigma", model.params.sigma}, {"tau", model.params.tau}}},
          {"n_branches", model.n_branches},
          {"roots", roots},
          {"branch_failures", failures},
          {"rho_list", model.rho},
          {"multiplicities", model.multiplicity},
          {"cutoff_index", model.cutoff_index},
          {"rho1", model.rho1()},
          {"rhom", model.rhom()},
          {"k_m", model.k_m},
          {"K", model.K},
          {"M", model.M},
          {"gap", model.gap},
          {"estimation_metadata",
           {{"samples", e.samples},
            {"seed", e.seed},
            {"delay_steps", e.delay_steps},
            {"horizon", e.horizon},
            {"K_source", e.K_source},
            {"M_source", e.M_source},
            {"K_sampled", e.K_sampled},
            {"M_sampled", e.M_sampled},
            {"K_argmax_sample", e.K_argmax_sample},
            {"K_argmax_t", e.K_argmax_t},
            {"M_argmax_sample", e.M_argmax_sample},
            {"M_argmax_t", e.M_argmax_t},
            {"caveat", "K and M are sampled suprema over finitely many histories"}}}};
}

Json to_json(const BoundInputs& in) {
  return {{"alpha", in.alpha}, {"t0", in.t0},     {"K", in.K},   {"M", in.M},
          {"rho1", in.rho1},   {"rhom", in.rhom}, {"k_m", in.k_m}, {"L_f", in.L_f},
          {"ER", in.ER},       {"ER2", in.ER2},   {"c", in.c},   {"F_coeffs", in.F_coeffs}};
}

Json to_json(const ConditionResult& c) {
  return {{"eta", c.eta},
          {"exponent", c.exponent},
          {"product", c.product},
          {"margin", c.margin},
          {"feasible", c.feasible}};
}

Json to_json(const BoundReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"inputs", to_json(r.inputs)},
          {"condition", to_json(r.condition)},
          {"numerator", r.numerator},
          {"denominator", r.denominator},
          {"d_bound", opt(r.d_bound)},
          {"alpha2",
           {{"condition", to_json(r.condition_alpha2)},
            {"numerator", r.numerator_alpha2},
            {"denominator", r.denominator_alpha2},
            {"d_bound", opt(r.d_bound_alpha2)},
            {"Lambda", r.inputs.k_m}}},
          {"notes", r.notes}};
}

Json to_json(const ErgodicAverages& e) {
  return {{"ER", e.ER},
          {"ER2", e.ER2},
          {"stderr_R", e.stderr_R},
          {"stderr_R2", e.stderr_R2},
          {"batches", e.batches},
          {"averaging_time", e.averaging_time},
          {"noisy", e.noisy}};
}

Json to_json(const CoverResult& c, bool with_centers) {
  Json j = {{"m", c.m},
            {"r1", c.r1},
            {"r2", c.r2},
            {"norm", to_string(c.norm)},
            {"lemma_bound", c.lemma_bound},
            {"constructed_count", c.constructed_count},
            {"within_bound", c.within_bound},
            {"probes", c.probes},
            {"worst_probe_distance", c.worst_probe_distance}};
  if (with_centers) j["centers"] = c.centers;
  return j;
}

Json to_json(const DimensionEstimate& d) {
  Json table = Json::array();
  for (std::size_t i = 0; i < d.scales.size(); ++i) table.push_back({d.scales[i], d.counts[i]});
  return {{"method", d.method},
          {"slope", d.slope},
          {"r2_fit", d.r2_fit},
          {"clean_scaling", d.clean_scaling},
          {"diameter", d.diameter},
          {"window", {d.window_begin, d.window_end}},
          {"table", table}};
}

Json to_json(const SqueezeReport& s) {
  const auto& k = s.constants;
  Json pairs = Json::array();
  for (const auto& p : s.pairs) {
    pairs.push_back({{"i", p.first},
                     {"j", p.second},
                     {"delta0", p.delta0},
                     {"P_norm", p.p_norm},
                     {"Q_norm", p.q_norm},
                     {"rhs_P", p.rhs_p},
                     {"rhs_Q", p.rhs_q},
                     {"pass_P", p.pass_p},
                     {"pass_Q", p.pass_q}});
  }
  return {{"t0", s.t0},
          {"constants",
           {{"K", k.K}, {"M", k.M}, {"L_f", k.L_f}, {"rho1", k.rho1}, {"rhom", k.rhom}, {"c", k.c},
            {"F_coeffs", k.F_coeffs}}},
          {"int_R", s.int_R},
          {"int_R2", s.int_R2},
          {"rate_P", s.rate_p},
          {"rate_Q", s.rate_q},
          {"rate_both", s.rate_both},
          {"pairs", pairs},
          {"caveat", s.caveat}};
}

Json cloud_metadata(const PointCloud& cloud) {
  Json horizons = Json::array();
  for (const auto& h : cloud.horizons) {
    horizons.push_back({{"T", h.horizon},
                        {"diameter", h.diameter},
                        {"hausdorff_to_previous",
                         h.hausdorff_to_previous < 0.0 ? Json(nullptr) : Json(h.hausdorff_to_previous)}});
  }
  return {{"dim", cloud.dim},
          {"count", cloud.count()},
          {"horizon", cloud.horizon},
          {"seed", cloud.seed},
          {"tau", cloud.tau},
          {"delay_steps", cloud.delay_steps},
          {"modes", cloud.modes},
          {"init_radius", cloud.init_radius},
          {"noise_future", cloud.noise_future},
          {"horizons", horizons},
          {"layout", "row-major points; point = segment grid index major, sine mode minor"}};
}

BoundInputs bound_inputs_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("bound inputs: expected a JSON object");
  for (const char* key : {"K", "M", "rho1", "rhom", "k_m"}) {
    if (!j.contains(key)) throw ConfigError(std::string("bound inputs: missing field '") + key + "'");
  }
  BoundInputs in;
  auto num = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ConfigError(std::string("bound inputs.") + key + ": expected a number");
    dst = j.at(key).get<double>();
  };
  num("alpha", in.alpha);
  num("t0", in.t0);
  num("K", in.K);
  num("M", in.M);
  num("rho1", in.rho1);
  num("rhom", in.rhom);
  num("L_f", in.L_f);
  num("ER", in.ER);
  num("ER2", in.ER2);
  num("c", in.c);
  double km = 0.0;
  num("k_m", km);
  if (!(km >= 1.0) || km != static_cast<double>(static_cast<std::size_t>(km))) {
    throw ConfigError("bound inputs.k_m: expected a positive integer");
  }
  in.k_m = static_cast<std::size_t>(km);
  if (j.contains("F_coeffs")) {
    try {
      in.F_coeffs = j.at("F_coeffs").get<std::vector<double>>();
    } catch (const Json::exception&) {
      throw ConfigError("bound inputs.F_coeffs: expected a list of numbers");
    }
  }
  in.validate();
  return in;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header_block(const Json& header) {
  std::istringstream lines(header.dump(2));
  std::string out;
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  return out;
}

std::string ou_csv(const OUProcessPath& z, const Json& header, std::size_t stride) {
  std::string out = csv_header_block(header);
  out += "t";
  for (std::size_t j = 0; j < z.channels; ++j) out += ",z_" + std::to_string(j + 1);
  out += ",r\n";
  for (std::size_t n = 0; n < z.size(); n += std::max<std::size_t>(1, stride)) {
    out += format_double(static_cast<double>(n) * z.h);
    for (std::size_t j = 0; j < z.channels; ++j) out += "," + format_double(z.z(n, j));
    out += "," + format_double(z.r_values[n]) + "\n";
  }
  return out;
}

std::string sidecar_path(const std::string& cloud_path) {
  fs::path p(cloud_path);
  p.replace_extension(".json");
  return p.string();
}

void write_cloud(const std::string& path, const PointCloud& cloud, const Json& extra) {
  const std::uint64_t header[2] = {cloud.dim, cloud.count()};
  std::string bytes(sizeof header + cloud.points.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), header, sizeof header);
  std::memcpy(bytes.data() + sizeof header, cloud.points.data(), cloud.points.size() * sizeof(double));
  write_atomic(path, bytes);
  Json meta = cloud_metadata(cloud);
  meta.update(extra);
  write_atomic(sidecar_path(path), render(meta));
}

PointCloud read_cloud(const std::string& path) {
  const std::string bytes = read_file(path);
  std::uint64_t header[2] = {0, 0};
  if (bytes.size() < sizeof header) throw ConfigError("cloud file '" + path + "' is truncated");
  std::memcpy(header, bytes.data(), sizeof header);
  const std::uint64_t dim = header[0], count = header[1];
  if (dim == 0 || bytes.size() != sizeof header + dim * count * sizeof(double)) {
    throw ConfigError("cloud file '" + path + "' has an inconsistent size");
  }
  PointCloud cloud;
  cloud.dim = dim;
  cloud.points.resize(dim * count);
  std::memcpy(cloud.points.data(), bytes.data() + sizeof header, cloud.points.size() * sizeof(double));

  Json meta;
  try {
    meta = Json::parse(read_file(sidecar_path(path)));
    cloud.horizon = meta.at("horizon").get<double>();
    cloud.seed = meta.at("seed").get<std::uint64_t>();
    cloud.tau = meta.at("tau").get<double>();
    cloud.delay_steps = meta.at("delay_steps").get<std::size_t>();
    cloud.modes = meta.at("modes").get<std::size_t>();
    cloud.init_radius = meta.value("init_radius", 0.0);
    cloud.noise_future = meta.value("noise_future", 0.0);
    for (const auto& h : meta.value("horizons", Json::array())) {
      HorizonStats s;
      s.horizon = h.at("T").get<double>();
      s.diameter = h.at("diameter").get<double>();
      s.hausdorff_to_previous = h.at("hausdorff_to_previous").is_null() ? -1.0 : h.at("hausdorff_to_previous").get<double>();
      cloud.horizons.push_back(s);
    }
  } catch (const Json::exception& e) {
    throw ConfigError("cloud sidecar for '" + path + "': " + e.what());
  }
  if (meta.at("dim").get<std::uint64_t>() != dim || (cloud.delay_steps + 1) * cloud.modes != dim) {
    throw ConfigError("cloud sidecar for '" + path + "' disagrees with the payload");
  }
  return cloud;
}

}  // namespace delaydim
