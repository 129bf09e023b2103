#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "ftlab/covariance_sampler.hpp"
#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"
#include "ftlab/flat_trace.hpp"
#include "ftlab/periodic_orbits.hpp"
#include "ftlab/pressure.hpp"
#include "ftlab/resonances.hpp"
#include "ftlab/statistics.hpp"

namespace ftlab::cli {

namespace {

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  const std::vector<WrittenFile>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<WrittenFile> files_;
};

Json complex_json(std::complex<double> z) {
  return Json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

Json map_json(const ExpandingMap& map) {
  return Json{{"name", map.name()},
              {"degree", map.degree()},
              {"min_derivative", map.min_derivative()},
              {"max_derivative", map.max_derivative()}};
}

Json spectrum_json(const SpectrumSpec& spec) {
  return Json{{"description", spec.describe()},
              {"truncation", spec.truncation()},
              {"kernel_at_zero", spec.kernel_at_zero()}};
}

std::vector<double> table_coordinates(const OrbitTable& table) {
  std::vector<double> xs;
  xs.reserve(table.total_points());
  for (const auto& p : table.points()) xs.push_back(p.x.value());
  return xs;
}

void run_orbits(const Json& cfg, Parallelism par, OutputSet& out) {
  const ExpandingMap map = build_map(cfg["map"]);
  const OrbitTable table = build_orbit_table(map, cfg["n"].get<int>(), par);
  std::ostringstream csv;
  write_orbit_csv(csv, table);
  out.write("orbits.csv", csv.str());

  Json periods = Json::object();
  for (int m : table.prime_periods()) periods[std::to_string(m)] = table.orbits_with_period(m).size();
  Json summary;
  summary["config"] = cfg;
  summary["map"] = map_json(map);
  summary["total_points"] = table.total_points();
  summary["orbit_count"] = table.orbits().size();
  summary["orbits_by_prime_period"] = periods;
  summary["min_separation"] = min_separation(table.points());
  summary["A_n"] = compute_An(table);
  out.write_json("orbits.json", summary);
}

void run_sample_field(const Json& cfg, OutputSet& out) {
  const SpectrumSpec spec = build_spectrum(cfg["spectrum"]);
  const auto seed = cfg["seed"].get<std::uint64_t>();
  const FieldSample s = sample(spec, seed, cfg["draw_index"].get<std::uint64_t>());

  std::ostringstream coefficients;
  write_field_sample_csv(coefficients, s);
  out.write("field_coefficients.csv", coefficients.str());

  const int grid = cfg["grid"].get<int>();
  std::ostringstream values;
  CsvWriter csv(values, {"x", "value"});
  for (int i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    csv.row(x, evaluate(s, x));
  }
  out.write("field_values.csv", values.str());

  const RegularityReport r = regularity_diagnostic(spec, cfg["regularity_draws"].get<int>(), seed);
  Json report;
  report["config"] = cfg;
  report["spectrum"] = spectrum_json(spec);
  report["draws"] = r.draws;
  report["k"] = r.k;
  report["max_normalized_coefficient"] = r.max_normalized_coefficient;
  report["fitted_exponent"] = r.fitted_exponent;
  report["empirical_exponent"] = r.empirical_exponent;
  report["partial_sum_half"] = r.partial_sum_half;
  report["partial_sum_full"] = r.partial_sum_full;
  report["ck_sum_converges"] = r.ck_sum_converges;
  out.write_json("regularity.json", report);
}

void run_trace(const Json& cfg, Parallelism par, OutputSet& out) {
  const ExpandingMap map = build_map(cfg["map"]);
  const int n = cfg["n"].get<int>();
  const OrbitTable table = build_orbit_table(map, n, par);
  const SpectrumSpec spec = build_spectrum(cfg["spectrum"]);
  const std::vector<double> xs = table_coordinates(table);
  const FieldDrawer drawer(spec, cfg["sampler"] == "fourier" ? SamplerBackend::fourier : SamplerBackend::covariance, xs);
  const auto index = cfg["draw_index"].get<std::uint64_t>();
  const auto field = drawer.draw_batch(cfg["seed"].get<std::uint64_t>(), index / kSamplerBatch)[index % kSamplerBatch];
  const PointFunction tau0 = build_tau0(cfg["tau0"]).function();
  std::vector<double> tau(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) tau[i] = tau0(xs[i]) + field[i];
  const double xi = cfg["xi"].get<double>();
  const TraceResult t = TracePlan(table).trace(tau, xi);

  Json report;
  report["config"] = cfg;
  report["map"] = map_json(map);
  report["spectrum"] = spectrum_json(spec);
  report["raw"] = complex_json(t.raw);
  report["normalized"] = complex_json(t.normalized);
  report["A_n"] = t.A_n;
  report["total_points"] = table.total_points();
  report["orbit_count"] = table.orbits().size();
  if (std::fabs(xi) > 1.0) {
    const double bound = ehrenfest_bound(std::fabs(xi), map.degree(), map.max_derivative(), spec.k, spec.epsilon, 0.5);
    report["ehrenfest"] = Json{{"c", 0.5}, {"bound", bound}, {"satisfied", n <= bound}};
  }
  out.write_json("trace.json", report);
}

void run_experiment_command(const Json& cfg, Parallelism par, OutputSet& out) {
  const ExperimentConfig config = build_experiment_config(cfg);
  const ExperimentReport r = run_experiment(config, par);

  std::ostringstream samples;
  write_samples_csv(samples, r);
  out.write("samples.csv", samples.str());
  std::ostringstream hist;
  write_histogram_csv(hist, r.modulus_histogram);
  out.write("histogram.csv", hist.str());

  Json report;
  report["config"] = cfg;
  report["map"] = map_json(build_map(cfg["map"]));
  report["spectrum"] = spectrum_json(config.spectrum);
  report["spectrum_is_default"] = config.spectrum_is_default;
  report["samples"] = r.samples.size();
  report["failed_samples"] = r.failed_samples;
  report["statistics"] = Json{{"ks_modulus", r.ks_modulus},
                              {"ks_argument", r.ks_argument},
                              {"mean_sq_modulus", r.mean_sq_modulus},
                              {"char_fn_residual", r.char_fn_residual},
                              {"degenerate", r.degenerate}};
  report["pass"] = Json{{"ks_modulus", r.ks_modulus_pass},
                        {"ks_argument", r.ks_argument_pass},
                        {"mean_sq_modulus", r.mean_sq_pass},
                        {"char_fn_residual", r.char_fn_pass},
                        {"all", r.all_pass()}};
  report["orbits"] = Json{{"A_n", r.A_n}, {"total_points", r.total_points}, {"orbit_count", r.orbit_count}};
  report["ehrenfest"] = Json{{"c", config.ehrenfest_c},
                             {"bound", r.ehrenfest_bound},
                             {"satisfied", r.ehrenfest_satisfied}};
  if (config.mode == ExperimentMode::random_xi) report["C_e"] = r.C_e;
  report["histogram"] = Json{{"lo", r.modulus_histogram.lo},
                             {"hi", r.modulus_histogram.hi},
                             {"bins", r.modulus_histogram.counts.size()},
                             {"overflow", r.modulus_histogram.overflow}};
  out.write_json("report.json", report);
}

std::string beta_id(double beta) {
  std::ostringstream o;
  o << "F_beta_" << beta;
  return o.str();
}

void run_pressure(const Json& cfg, Parallelism par, OutputSet& out) {
  const ExpandingMap map = build_map(cfg["map"]);
  const auto betas = cfg["betas"].get<std::vector<double>>();
  std::vector<SequenceRow> rows;
  std::vector<std::string> ids = {"pressure_phi0", "pressure_minus_2J", "j_min", "lemma_ref_ratio"};
  for (double b : betas) ids.push_back(beta_id(b));
  std::vector<std::vector<double>> sequences(ids.size());
  for (int n = cfg["n_min"].get<int>(); n <= cfg["n_max"].get<int>(); ++n) {
    const OrbitTable table = build_orbit_table(map, n, par);
    std::vector<double> v = {pressure_estimate(table, [](double) { return 0.0; }),
                             pressure_of_minus_beta_J(table, 2.0), j_min_estimate(table),
                             lemma_ref_ratio(table)};
    for (double b : betas) v.push_back(F_of_beta(table, b));
    for (std::size_t q = 0; q < ids.size(); ++q) {
      rows.push_back({n, ids[q], v[q]});
      sequences[q].push_back(v[q]);
    }
  }
  std::ostringstream csv;
  write_sequence_csv(csv, rows);
  out.write("pressure.csv", csv.str());

  Json summary;
  summary["config"] = cfg;
  summary["map"] = map_json(map);
  Json quantities = Json::object();
  for (std::size_t q = 0; q < ids.size(); ++q) {
    quantities[ids[q]] = Json{{"last", sequences[q].back()}, {"aitken", aitken_extrapolate(sequences[q])}};
  }
  summary["quantities"] = quantities;
  out.write_json("pressure.json", summary);
}

void run_resonances(const Json& cfg, Parallelism par, OutputSet& out) {
  const ExpandingMap map = build_map(cfg["map"]);
  const PointFunction tau = build_tau0(cfg["tau0"]).function();
  const double xi = cfg["xi"].get<double>();
  const double r = cfg["r"].is_null() ? -1.0 : cfg["r"].get<double>();
  const ResonanceSet set = compute_resonances(map, tau, xi, cfg["N"].get<int>(), r, par);
  const auto rows = trace_residual(map, tau, xi, set.eigenvalues, cfg["n_min"].get<int>(), cfg["n_max"].get<int>(), par);
  const ResidualFit fit = fit_residual(rows, set.r);

  std::ostringstream eig, res;
  write_resonance_csv(eig, set.eigenvalues);
  out.write("resonances.csv", eig.str());
  write_residual_csv(res, rows);
  out.write("residual.csv", res.str());

  Json summary;
  summary["config"] = cfg;
  summary["map"] = map_json(map);
  summary["r"] = set.r;
  summary["N_used"] = set.N_used;
  summary["resonance_count"] = set.eigenvalues.size();
  summary["stable_count"] = set.stable.size();
  summary["max_shift"] = set.max_shift;
  summary["resolution_floor"] = set.resolution_floor;
  summary["fit"] = Json{{"slope", fit.slope},
                        {"log_r", std::log(set.r)},
                        {"slope_within_log_r", fit.slope <= std::log(set.r) + 0.05},
                        {"C", fit.C},
                        {"max_ratio", fit.max_ratio},
                        {"fitted_points", fit.fitted_points}};
  out.write_json("resonances.json", summary);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoFailure, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

RunOutcome execute(const Json& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Parallelism par{std::max(1u, options.threads)};
  OutputSet out(options.output_dir);
  out.write_json("resolved_config.json", cfg);

  const std::string sub = cfg["subcommand"].get<std::string>();
  if (sub == "orbits") {
    run_orbits(cfg, par, out);
  } else if (sub == "sample-field") {
    run_sample_field(cfg, out);
  } else if (sub == "trace") {
    run_trace(cfg, par, out);
  } else if (sub == "experiment") {
    run_experiment_command(cfg, par, out);
  } else if (sub == "pressure") {
    run_pressure(cfg, par, out);
  } else {
    run_resonances(cfg, par, out);
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest;
  manifest["config"] = cfg;
  Json files = Json::array();
  for (const auto& f : out.files()) files.push_back(Json{{"path", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  manifest["files"] = files;
  manifest["execution"] = Json{{"threads", par.threads}, {"wall_seconds", seconds}};
  const std::string text = manifest.dump(2) + "\n";
  std::ofstream m(out.dir() / "manifest.json", std::ios::binary | std::ios::trunc);
  m << text;
  m.close();
  if (!m) throw Error(ErrorCode::IoFailure, "cannot write manifest.json");
  return {cfg, out.files()};
}

int run(const RunOptions& options, std::ostream& err) {
  try {
    const Json cfg = load_config(options);
    execute(cfg, options);
    return kExitOk;
  } catch (const Error& e) {
    err << to_string(e.code()) << ": " << e.what() << "\n";
    return is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const Json::exception& e) {
    err << "CONFIG_INVALID: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "INTERNAL_ERROR: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace ftlab::cli
