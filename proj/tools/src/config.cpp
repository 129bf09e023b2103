#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ftlab/error.hpp"

namespace ftlab::cli {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::ConfigInvalid, message);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Reads one JSON object and rejects keys that were never asked for.
class Fields {
 public:
  Fields(Json object, std::string path) : object_(std::move(object)), path_(std::move(path)) {
    if (!object_.is_object()) invalid((path_.empty() ? "config" : path_) + " must be an object");
  }

  bool has(std::string_view key) const { return object_.contains(key); }

  const Json* take(std::string_view key) {
    seen_.insert(std::string(key));
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  double real(std::string_view key, double fallback) {
    const Json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) invalid(join(path_, key) + " must be a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) invalid(join(path_, key) + " must be finite");
    return d;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const Json* v = take(key);
    if (!v) return fallback;
    if (v->is_number_integer()) {
      if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        invalid(join(path_, key) + " is too large");
      }
      return v->get<std::int64_t>();
    }
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    invalid(join(path_, key) + " must be an integer");
  }

  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) {
    const Json* v = take(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) invalid(join(path_, key) + " must be non-negative");
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::isfinite(d) && d == std::floor(d) && d >= 0 && d < 9e15) return static_cast<std::uint64_t>(d);
    }
    invalid(join(path_, key) + " must be a non-negative integer");
  }

  std::string text(std::string_view key, std::string fallback, std::initializer_list<std::string_view> allowed) {
    const Json* v = take(key);
    std::string s = std::move(fallback);
    if (v) {
      if (!v->is_string()) invalid(join(path_, key) + " must be a string");
      s = v->get<std::string>();
    }
    if (allowed.size() > 0) {
      bool ok = false;
      std::string options;
      for (auto a : allowed) {
        ok = ok || a == s;
        options += (options.empty() ? "" : ", ") + std::string(a);
      }
      if (!ok) invalid(join(path_, key) + " must be one of: " + options);
    }
    return s;
  }

  std::vector<double> reals(std::string_view key, std::vector<double> fallback) {
    const Json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array()) invalid(join(path_, key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        invalid(join(path_, key) + " must be an array of finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  // Child object, or an empty object when absent.
  Json object(std::string_view key) {
    const Json* v = take(key);
    if (!v) return Json::object();
    if (!v->is_object()) invalid(join(path_, key) + " must be an object");
    return *v;
  }

  std::string path(std::string_view key) const { return join(path_, key); }

  void done() const {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.count(key)) invalid("unknown key '" + join(path_, key) + "'");
    }
  }

 private:
  Json object_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) invalid(message);
}

Json resolve_map(const Json& raw, const std::string& path) {
  Fields f(raw, path);
  const std::string id = f.text("id", "sine", {"sine", "linear"});
  std::vector<double> params = f.reals("params", {});
  f.done();
  if (id == "linear") {
    require(params.size() <= 1, path + ".params for the linear map is [degree]");
    if (params.empty()) params = {2.0};
  } else {
    require(params.size() <= 3, path + ".params for the sine map is [degree, amplitude, phase]");
    const std::vector<double> defaults = {2.0, 0.9, 0.4};
    for (std::size_t i = params.size(); i < 3; ++i) params.push_back(defaults[i]);
  }
  Json out;
  out["id"] = id;
  out["params"] = params;
  // Surfaces NonExpanding and parameter errors at resolution time.
  build_map(out);
  return out;
}

Json resolve_tau0(const Json& raw, const std::string& path, const std::string& fallback_kind) {
  Fields f(raw, path);
  Json out;
  const std::string kind = f.text("kind", fallback_kind, {"zero", "cos", "sin", "constant"});
  out["kind"] = kind;
  if (kind == "cos" || kind == "sin") out["amplitude"] = f.real("amplitude", 1.0);
  if (kind == "constant") out["value"] = f.real("value", 0.0);
  f.done();
  return out;
}

Json resolve_spectrum(const Json& raw, const std::string& path, bool allow_composite = true) {
  Fields f(raw, path);
  Json out;
  const std::string kind =
      f.text("kind", "default", {"default", "zero", "power_law", "bump", "composite", "custom"});
  out["kind"] = kind;
  auto regularity = [&](Json& o) {
    const auto k = f.integer("k", 1);
    const double eps = f.real("epsilon", 0.1);
    require(k >= 0 && k <= 16, f.path("k") + " must lie in [0, 16]");
    require(eps > 0.0, f.path("epsilon") + " must be positive");
    o["k"] = k;
    o["epsilon"] = eps;
  };
  if (kind == "default") {
    regularity(out);
  } else if (kind == "power_law") {
    out["C"] = f.real("C", 1.0);
    regularity(out);
    out["sigma0_sq"] = f.real("sigma0_sq", 0.0);
    out["P"] = f.integer("P", 0);
    require(out["C"].get<double>() > 0.0, f.path("C") + " must be positive");
    require(out["sigma0_sq"].get<double>() >= 0.0, f.path("sigma0_sq") + " must be non-negative");
    require(out["P"].get<std::int64_t>() >= 0, f.path("P") + " must be non-negative");
  } else if (kind == "bump") {
    out["j"] = f.integer("j", 1);
    regularity(out);
    out["M"] = f.real("M", 2.9);
    out["P"] = f.integer("P", 0);
    out["profile"] = f.text("profile", "smooth_bump", {"smooth_bump"});
    require(out["j"].get<std::int64_t>() >= 0 && out["j"].get<std::int64_t>() <= 12, f.path("j") + " must lie in [0, 12]");
    require(out["M"].get<double>() > 1.0, f.path("M") + " must exceed 1");
    require(out["P"].get<std::int64_t>() >= 0, f.path("P") + " must be non-negative");
  } else if (kind == "composite") {
    require(allow_composite, f.path("kind") + " cannot nest a composite spectrum");
    out["base"] = resolve_spectrum(f.object("base"), f.path("base"), false);
    require(out["base"]["kind"] == "power_law" || out["base"]["kind"] == "default",
            f.path("base.kind") + " must be power_law or default");
    out["j_max"] = f.integer("j_max", 1);
    out["M"] = f.real("M", 2.9);
    out["profile"] = f.text("profile", "smooth_bump", {"smooth_bump"});
    require(out["j_max"].get<std::int64_t>() >= 1 && out["j_max"].get<std::int64_t>() <= 12, f.path("j_max") + " must lie in [1, 12]");
    require(out["M"].get<double>() > 1.0, f.path("M") + " must exceed 1");
  } else if (kind == "custom") {
    const auto v = f.reals("variances", {});
    require(!v.empty(), f.path("variances") + " must list sigma_p^2 for p = 0..P");
    out["variances"] = v;
  }
  f.done();
  build_spectrum(out);
  return out;
}

void check_n(std::int64_t n, int degree, const std::string& key) {
  require(n >= 1, key + " must be at least 1");
  // Throws ResourceLimit beyond the point budget.
  fixed_point_count(degree, static_cast<int>(std::min<std::int64_t>(n, 200)));
}

int map_degree(const Json& map) {
  return static_cast<int>(map["params"][0].get<double>());
}

}  // namespace

ExpandingMap build_map(const Json& map) {
  const auto params = map["params"].get<std::vector<double>>();
  return make_catalog_map(map["id"].get<std::string>(), params);
}

SpectrumSpec build_spectrum(const Json& s) {
  const std::string kind = s["kind"].get<std::string>();
  if (kind == "zero") return build_zero_spectrum();
  if (kind == "default") return build_default_spectrum(s["k"].get<int>(), s["epsilon"].get<double>());
  if (kind == "power_law") {
    return build_power_law(s["C"].get<double>(), s["k"].get<int>(), s["epsilon"].get<double>(),
                           s["sigma0_sq"].get<double>(), s["P"].get<std::size_t>());
  }
  if (kind == "bump") {
    return build_bump_spectrum(s["j"].get<int>(), s["k"].get<int>(), s["epsilon"].get<double>(),
                               s["M"].get<double>(), s["P"].get<std::size_t>(),
                               s["profile"].get<std::string>());
  }
  if (kind == "composite") {
    return build_composite_spectrum(build_spectrum(s["base"]), s["j_max"].get<int>(), s["M"].get<double>(),
                                    s["profile"].get<std::string>())
        .total;
  }
  return build_custom_spectrum(s["variances"].get<std::vector<double>>());
}

Tau0Spec build_tau0(const Json& t) {
  Tau0Spec spec;
  spec.kind = t["kind"].get<std::string>();
  if (t.contains("amplitude")) spec.amplitude = t["amplitude"].get<double>();
  if (t.contains("value")) spec.value = t["value"].get<double>();
  return spec;
}

ExperimentConfig build_experiment_config(const Json& r) {
  ExperimentConfig c;
  c.map_id = r["map"]["id"].get<std::string>();
  c.map_params = r["map"]["params"].get<std::vector<double>>();
  c.n = r["n"].get<int>();
  c.mode = r["mode"] == "random_xi" ? ExperimentMode::random_xi : ExperimentMode::random_field;
  if (c.mode == ExperimentMode::random_field) {
    c.xi = r["xi"].get<double>();
  } else {
    c.xi0 = r["xi0"].get<double>();
    c.xi_width = r["xi_width"].get<double>();
  }
  c.tau0 = build_tau0(r["tau0"]);
  c.spectrum = build_spectrum(r["spectrum"]);
  c.spectrum_is_default = r["spectrum"]["kind"] == "default";
  c.sampler = r["sampler"] == "fourier" ? SamplerBackend::fourier : SamplerBackend::covariance;
  c.samples = r["samples"].get<std::size_t>();
  c.seed = r["seed"].get<std::uint64_t>();
  c.ehrenfest_c = r["ehrenfest_c"].get<double>();
  c.thresholds.ks = r["thresholds"]["ks"].get<double>();
  c.thresholds.mean_sq_tolerance = r["thresholds"]["mean_sq_tolerance"].get<double>();
  c.thresholds.char_fn = r["thresholds"]["char_fn"].get<double>();
  return c;
}

Json resolve_config(const Json& raw, const RunOptions& options) {
  if (raw.is_null() || (raw.is_object() && raw.empty())) {
    throw Error(ErrorCode::ConfigMissing, "the config is empty");
  }
  Fields f(raw, "");
  Json out;
  std::string sub = f.text("subcommand", options.subcommand, {});
  if (sub.empty()) throw Error(ErrorCode::ConfigMissing, "no subcommand in the config or on the command line");
  if (!options.subcommand.empty() && options.subcommand != sub) {
    invalid("command line subcommand '" + options.subcommand + "' disagrees with config subcommand '" + sub + "'");
  }
  bool known = false;
  for (auto s : kSubcommands) known = known || s == sub;
  if (!known) invalid("unknown subcommand '" + sub + "'");
  out["subcommand"] = sub;
  const std::uint64_t seed = f.unsigned_integer("seed", 0);
  out["seed"] = options.seed.value_or(seed);

  if (sub == "orbits") {
    out["map"] = resolve_map(f.object("map"), "map");
    out["n"] = f.integer("n", 3);
    check_n(out["n"].get<std::int64_t>(), map_degree(out["map"]), "n");
  } else if (sub == "sample-field") {
    out["spectrum"] = resolve_spectrum(f.object("spectrum"), "spectrum");
    out["draw_index"] = f.unsigned_integer("draw_index", 0);
    out["grid"] = f.integer("grid", 256);
    out["regularity_draws"] = f.integer("regularity_draws", 100);
    require(out["grid"].get<std::int64_t>() >= 1 && out["grid"].get<std::int64_t>() <= 1 << 20, "grid must lie in [1, 2^20]");
    require(out["regularity_draws"].get<std::int64_t>() >= 1 && out["regularity_draws"].get<std::int64_t>() <= 100000,
            "regularity_draws must lie in [1, 100000]");
  } else if (sub == "trace") {
    out["map"] = resolve_map(f.object("map"), "map");
    out["n"] = f.integer("n", 11);
    check_n(out["n"].get<std::int64_t>(), map_degree(out["map"]), "n");
    out["xi"] = f.real("xi", 2e6);
    out["tau0"] = resolve_tau0(f.object("tau0"), "tau0", "cos");
    out["spectrum"] = resolve_spectrum(f.object("spectrum"), "spectrum");
    out["sampler"] = f.text("sampler", "covariance", {"covariance", "fourier"});
    out["draw_index"] = f.unsigned_integer("draw_index", 0);
  } else if (sub == "experiment") {
    out["map"] = resolve_map(f.object("map"), "map");
    out["n"] = f.integer("n", 11);
    check_n(out["n"].get<std::int64_t>(), map_degree(out["map"]), "n");
    const std::string mode = f.text("mode", "random_field", {"random_field", "random_xi"});
    out["mode"] = mode;
    if (mode == "random_field") {
      require(!f.has("xi0") && !f.has("xi_width"), "xi0 and xi_width apply only to random_xi mode");
      out["xi"] = f.real("xi", 2e6);
    } else {
      require(!f.has("xi"), "xi applies only to random_field mode");
      out["xi0"] = f.real("xi0", 2e6);
      out["xi_width"] = f.real("xi_width", 10.0);
      require(out["xi_width"].get<double>() > 0.0, "xi_width must be positive");
    }
    out["tau0"] = resolve_tau0(f.object("tau0"), "tau0", "cos");
    out["spectrum"] = resolve_spectrum(f.object("spectrum"), "spectrum");
    out["sampler"] = f.text("sampler", "covariance", {"covariance", "fourier"});
    out["samples"] = f.integer("samples", 10000);
    require(out["samples"].get<std::int64_t>() >= static_cast<std::int64_t>(kMinSamples) &&
                out["samples"].get<std::int64_t>() <= 10000000,
            "samples must lie in [100, 10^7]");
    out["ehrenfest_c"] = f.real("ehrenfest_c", 0.5);
    require(out["ehrenfest_c"].get<double>() > 0.0 && out["ehrenfest_c"].get<double>() < 1.0,
            "ehrenfest_c must lie in (0, 1)");
    Fields t(f.object("thresholds"), "thresholds");
    const Thresholds defaults;
    out["thresholds"]["ks"] = t.real("ks", defaults.ks);
    out["thresholds"]["mean_sq_tolerance"] = t.real("mean_sq_tolerance", defaults.mean_sq_tolerance);
    out["thresholds"]["char_fn"] = t.real("char_fn", defaults.char_fn);
    t.done();
  } else if (sub == "pressure") {
    out["map"] = resolve_map(f.object("map"), "map");
    out["n_min"] = f.integer("n_min", 1);
    out["n_max"] = f.integer("n_max", 14);
    require(out["n_min"].get<std::int64_t>() >= 1, "n_min must be at least 1");
    require(out["n_max"].get<std::int64_t>() >= out["n_min"].get<std::int64_t>(), "n_max must be at least n_min");
    check_n(out["n_max"].get<std::int64_t>(), map_degree(out["map"]), "n_max");
    const auto betas = f.reals("betas", {0.5, 1.0, 2.0, 3.0, 4.0});
    for (double b : betas) require(b > 0.0, "betas must be positive");
    out["betas"] = betas;
  } else {
    out["map"] = resolve_map(f.object("map"), "map");
    out["tau0"] = resolve_tau0(f.object("tau0"), "tau0", "sin");
    out["xi"] = f.real("xi", 0.0);
    require(std::fabs(out["xi"].get<double>()) <= 100.0, "xi must satisfy |xi| <= 100");
    out["N"] = f.integer("N", 128);
    require(out["N"].get<std::int64_t>() >= 1 && out["N"].get<std::int64_t>() <= 1024, "N must lie in [1, 1024]");
    const Json* r = f.take("r");
    if (r && !r->is_null()) {
      if (!r->is_number() || !(r->get<double>() >= 0.0)) invalid("r must be a non-negative number or null");
      out["r"] = r->get<double>();
    } else {
      out["r"] = nullptr;
    }
    out["n_min"] = f.integer("n_min", 2);
    out["n_max"] = f.integer("n_max", 10);
    require(out["n_min"].get<std::int64_t>() >= 1, "n_min must be at least 1");
    require(out["n_max"].get<std::int64_t>() >= out["n_min"].get<std::int64_t>(), "n_max must be at least n_min");
    check_n(out["n_max"].get<std::int64_t>(), map_degree(out["map"]), "n_max");
  }
  f.done();
  return out;
}

Json load_config(const RunOptions& options) {
  if (options.config_path.empty()) throw Error(ErrorCode::ConfigMissing, "no config file given");
  std::ifstream in(options.config_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ConfigMissing, "cannot open config file " + options.config_path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  const std::string content = text.str();
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::ConfigMissing, "config file " + options.config_path.string() + " is empty");
  }
  Json raw;
  try {
    raw = Json::parse(content);
  } catch (const Json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return resolve_config(raw, options);
}

}  // namespace ftlab::cli
