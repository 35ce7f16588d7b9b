#include "delaydim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "delaydim/errors.hpp"

namespace delaydim {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json kv_scalar(const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (!v.empty() && end == v.c_str() + v.size()) return d;
  return v;
}

json kv_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) return json::array();
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
  };
  if (v.find(';') != std::string::npos) {
    json rows = json::array();
    for (const auto& row : split(v, ';')) {
      json r = json::array();
      for (const auto& x : split(row, ',')) {
        if (!trim(x).empty()) r.push_back(kv_scalar(x));
      }
      rows.push_back(r);
    }
    return rows;
  }
  if (v.find(',') != std::string::npos) {
    json arr = json::array();
    for (const auto& x : split(v, ',')) arr.push_back(kv_scalar(x));
    return arr;
  }
  return kv_scalar(v);
}

// "a.b.c = value" lines; '#' starts a comment.
json parse_key_value(const std::string& text) {
  json root = json::object();
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    json* node = &root;
    std::stringstream ks(key);
    std::vector<std::string> parts;
    for (std::string p; std::getline(ks, p, '.');) parts.push_back(trim(p));
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      json& child = (*node)[parts[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) throw ConfigError("config key '" + key + "' conflicts with a value");
      node = &child;
    }
    (*node)[parts.back()] = kv_value(line.substr(eq + 1));
  }
  return root;
}

// Reader that records consumed keys so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    used_.push_back(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) const { return j_.at(key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number or \"auto\"");
    return v.get<double>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const double d = number(key, 0.0);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9e15) {
      throw ConfigError(field(key) + ": expected a nonnegative integer");
    }
    return static_cast<std::size_t>(d);
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(field(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    return to_numbers(j_.at(key), field(key));
  }
  std::vector<std::vector<double>> matrix(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + ": expected a list of profiles");
    std::vector<std::vector<double>> out;
    if (!v.empty() && v.front().is_number()) {
      out.push_back(to_numbers(v, field(key)));  // single profile
      return out;
    }
    for (const auto& row : v) out.push_back(to_numbers(row, field(key)));
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw ConfigError(field(key) + ": unknown configuration key");
      }
    }
  }

 private:
  static std::vector<double> to_numbers(const json& v, const std::string& name) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(name + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(name + ": expected a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json& j_;
  std::string path_;
  std::vector<std::string> used_;
};

void read_model(Section s, ModelConfig& m) {
  m.mu = s.number("mu", m.mu);
  m.sigma = s.number("sigma", m.sigma);
  m.tau = s.number("tau", m.tau);
  m.h = s.number("h", m.h);
  m.modes = s.count("modes", m.modes);
  m.F_coeffs = s.numbers("F_coeffs", m.F_coeffs);
  m.g_coeffs = s.matrix("g_coeffs");
  m.blowup_ceiling = s.number("blowup_ceiling", m.blowup_ceiling);
  if (s.has("f")) {
    Section f(s.at("f"), s.field("f"));
    m.f.kind = nonlinearity_from_string(f.text("kind", "zero"));
    m.f.lipschitz = f.number("L_f", 0.0);
    f.reject_unknown();
  }
  s.reject_unknown();
}

void read_numerics(Section s, NumericsConfig& n) {
  n.T = s.number("T", n.T);
  const double seed = s.number("seed", static_cast<double>(n.seed));
  if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9e15) {
    throw ConfigError(s.field("seed") + ": expected a nonnegative integer");
  }
  n.seed = static_cast<std::uint64_t>(seed);
  n.horizons = s.numbers("horizons", n.horizons);
  n.n_initial = s.count("n_initial", n.n_initial);
  n.n_pairs = s.count("n_pairs", n.n_pairs);
  n.n_branches = static_cast<int>(s.count("n_branches", static_cast<std::size_t>(n.n_branches)));
  n.samples = s.count("samples", n.samples);
  n.ergodic_T = s.number("ergodic_T", n.ergodic_T);
  n.ergodic_burn_in = s.number("ergodic_burn_in", n.ergodic_burn_in);
  n.absorbing_T = s.number("absorbing_T", n.absorbing_T);
  n.absorbing_burn_in = s.number("absorbing_burn_in", n.absorbing_burn_in);
  n.box_scales = s.count("box_scales", n.box_scales);
  n.csv_stride = s.count("csv_stride", n.csv_stride);
  s.reject_unknown();
}

void read_bound(Section s, BoundParams& b) {
  b.alpha = s.number("alpha", b.alpha);
  b.t0 = s.optional_number("t0");
  b.cutoff_index = s.count("cutoff_index", b.cutoff_index);
  b.c = s.optional_number("c");
  b.K_override = s.optional_number("K_override");
  b.M_override = s.optional_number("M_override");
  s.reject_unknown();
}

void read_cover(Section s, CoverParams& c) {
  c.m = s.count("m", c.m);
  c.r1 = s.number("r1", c.r1);
  c.r2 = s.number("r2", c.r2);
  c.norm = norm_from_string(s.text("norm", to_string(c.norm)));
  s.reject_unknown();
}

bool multiple_of(double t, double h) {
  const double q = t / h;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  const auto& n = numerics;
  if (!(n.T > 0.0) || !multiple_of(n.T, model.h)) {
    throw ConfigError("numerics.T: must be a positive multiple of model.h");
  }
  if (n.horizons.empty()) throw ConfigError("numerics.horizons: need at least one horizon");
  for (std::size_t i = 0; i < n.horizons.size(); ++i) {
    if (!(n.horizons[i] > 0.0) || !multiple_of(n.horizons[i], model.h)) {
      throw ConfigError("numerics.horizons: every horizon must be a positive multiple of model.h");
    }
    if (i > 0 && !(n.horizons[i] > n.horizons[i - 1])) {
      throw ConfigError("numerics.horizons: must be strictly increasing");
    }
  }
  if (n.n_initial < 2) throw ConfigError("numerics.n_initial: need at least 2 initial histories");
  if (n.n_pairs > n.n_initial * (n.n_initial - 1) / 2) {
    throw ConfigError("numerics.n_pairs: exceeds the number of distinct pairs of the cloud");
  }
  if (n.n_branches < 1) throw ConfigError("numerics.n_branches: must be at least 1");
  if (n.samples < 1) throw ConfigError("numerics.samples: must be at least 1");
  if (!(n.ergodic_burn_in >= 0.0 && n.ergodic_T > n.ergodic_burn_in)) {
    throw ConfigError("numerics.ergodic_T: must exceed numerics.ergodic_burn_in >= 0");
  }
  if (!multiple_of(n.ergodic_T, model.h)) throw ConfigError("numerics.ergodic_T: must be a multiple of model.h");
  if (!(n.absorbing_burn_in >= 0.0 && n.absorbing_T > n.absorbing_burn_in) ||
      !multiple_of(n.absorbing_T, model.h)) {
    throw ConfigError("numerics.absorbing_T: must be a multiple of model.h exceeding absorbing_burn_in");
  }
  if (n.box_scales < 5) throw ConfigError("numerics.box_scales: need at least 5 scales");
  if (n.csv_stride < 1) throw ConfigError("numerics.csv_stride: must be at least 1");
  if (!(bound.alpha > 0.0 && bound.alpha < 2.0)) throw ConfigError("bound.alpha: must lie in (0, 2)");
  if (!(t0() > 0.0) || !multiple_of(t0(), model.h)) {
    throw ConfigError("bound.t0: must be a positive multiple of model.h");
  }
  if (bound.cutoff_index < 1) throw ConfigError("bound.cutoff_index: must be at least 1");
  if (bound.c && !(*bound.c >= 0.0)) throw ConfigError("bound.c: must be nonnegative");
  if (bound.K_override && !(*bound.K_override >= 1.0)) throw ConfigError("bound.K_override: must be >= 1");
  if (bound.M_override && !(*bound.M_override >= 1.0)) throw ConfigError("bound.M_override: must be >= 1");
  if (cover.m < 1 || cover.m > 6) throw ConfigError("cover.m: must lie in 1..6");
  if (!(cover.r1 > 0.0 && cover.r2 > 0.0)) throw ConfigError("cover.r1, cover.r2: must be positive");
}

void RunConfig::apply_quick() {
  auto& n = numerics;
  n.n_initial = std::max<std::size_t>(10, n.n_initial / 10);
  n.n_pairs = std::min(std::max<std::size_t>(5, n.n_pairs / 10), n.n_initial * (n.n_initial - 1) / 2);
  n.samples = std::max<std::size_t>(20, n.samples / 10);
  const double h = model.h;
  auto shrink = [h](double t, double floor) {
    const double v = std::max(floor, t / 10.0);
    return std::round(v / h) * h;
  };
  n.ergodic_T = shrink(n.ergodic_T, n.ergodic_burn_in + 100.0 * h);
}

RunConfig parse_run_config(const std::string& text) {
  const std::string body = trim(text);
  json root;
  if (!body.empty() && body.front() == '{') {
    try {
      root = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
  } else {
    root = parse_key_value(body);
  }
  RunConfig cfg;
  Section top(root, "");
  if (top.has("model")) read_model(Section(top.at("model"), "model"), cfg.model);
  if (top.has("numerics")) read_numerics(Section(top.at("numerics"), "numerics"), cfg.numerics);
  if (top.has("bound")) read_bound(Section(top.at("bound"), "bound"), cfg.bound);
  if (top.has("cover")) read_cover(Section(top.at("cover"), "cover"), cfg.cover);
  if (top.has("output_dir")) cfg.output_dir = top.text("output_dir", "");
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string canonical_config(const RunConfig& cfg) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  const auto& m = cfg.model;
  const auto& n = cfg.numerics;
  json j;
  j["model"] = {{"mu", m.mu},
                {"sigma", m.sigma},
                {"tau", m.tau},
                {"h", m.h},
                {"modes", m.modes},
                {"F_coeffs", m.F_coeffs},
                {"f", {{"kind", to_string(m.f.kind)}, {"L_f", m.f.lipschitz}}},
                {"g_coeffs", m.g_coeffs},
                {"blowup_ceiling", m.blowup_ceiling}};
  j["numerics"] = {{"T", n.T},
                   {"seed", n.seed},
                   {"horizons", n.horizons},
                   {"n_initial", n.n_initial},
                   {"n_pairs", n.n_pairs},
                   {"n_branches", n.n_branches},
                   {"samples", n.samples},
                   {"ergodic_T", n.ergodic_T},
                   {"ergodic_burn_in", n.ergodic_burn_in},
                   {"absorbing_T", n.absorbing_T},
                   {"absorbing_burn_in", n.absorbing_burn_in},
                   {"box_scales", n.box_scales},
                   {"csv_stride", n.csv_stride}};
  j["bound"] = {{"alpha", cfg.bound.alpha},
                {"t0", cfg.t0()},
                {"cutoff_index", cfg.bound.cutoff_index},
                {"c", opt(cfg.bound.c)},
                {"K_override", opt(cfg.bound.K_override)},
                {"M_override", opt(cfg.bound.M_override)}};
  j["cover"] = {{"m", cfg.cover.m}, {"r1", cfg.cover.r1}, {"r2", cfg.cover.r2}, {"norm", to_string(cfg.cover.norm)}};
  return j.dump();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace delaydim
