#include "ftlab/experiment.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "ftlab/covariance_sampler.hpp"
#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"
#include "ftlab/rng.hpp"

namespace ftlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t batch_count(std::size_t samples) {
  return (samples + kSamplerBatch - 1) / kSamplerBatch;
}

void validate(const ExperimentConfig& c) {
  if (c.samples < kMinSamples) {
    throw Error(ErrorCode::InvalidArgument, "an experiment needs at least 100 samples");
  }
  if (c.mode == ExperimentMode::random_xi && !(c.xi_width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "random_xi mode needs xi_width > 0");
  }
}

}  // namespace

PointFunction Tau0Spec::function() const {
  const double a = amplitude;
  const double v = value;
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "cos") return [a](double x) { return a * std::cos(kTwoPi * x); };
  if (kind == "sin") return [a](double x) { return a * std::sin(kTwoPi * x); };
  if (kind == "constant") return [v](double) { return v; };
  throw Error(ErrorCode::InvalidArgument, "unknown tau0 kind '" + kind + "'");
}

std::string Tau0Spec::describe() const {
  std::ostringstream o;
  o.precision(17);
  if (kind == "cos" || kind == "sin") {
    o << amplitude << "*" << kind << "(2*pi*x)";
  } else if (kind == "constant") {
    o << value;
  } else {
    o << kind;
  }
  return o.str();
}

std::string to_string(ExperimentMode mode) {
  return mode == ExperimentMode::random_field ? "random_field" : "random_xi";
}

std::string to_string(SamplerBackend backend) {
  return backend == SamplerBackend::covariance ? "covariance" : "fourier";
}

struct FieldDrawer::Impl {
  SpectrumSpec spec;
  SamplerBackend backend;
  std::vector<double> points;
  std::optional<CovarianceSampler> covariance;
  bool zero = false;
};

FieldDrawer::FieldDrawer(const SpectrumSpec& spec, SamplerBackend backend,
                         std::span<const double> points) {
  auto impl = std::make_shared<Impl>();
  impl->spec = spec;
  impl->backend = backend;
  impl->points.assign(points.begin(), points.end());
  impl->zero = spec.kernel_at_zero() == 0.0;
  if (!impl->zero && backend == SamplerBackend::covariance) {
    impl->covariance.emplace(spec, points);
  }
  impl_ = std::move(impl);
}

std::size_t FieldDrawer::dimension() const {
  if (impl_->zero) return 0;
  if (impl_->covariance) return impl_->covariance->rank();
  return 2 * impl_->spec.truncation() + 1;
}

std::vector<std::vector<double>> FieldDrawer::draw_batch(std::uint64_t seed,
                                                         std::uint64_t batch) const {
  const std::size_t npts = impl_->points.size();
  std::vector<std::vector<double>> out(kSamplerBatch);
  if (impl_->zero) {
    for (auto& v : out) v.assign(npts, 0.0);
    return out;
  }
  if (impl_->covariance) {
    const Eigen::MatrixXd X = impl_->covariance->draw_batch(seed, batch);
    for (std::size_t c = 0; c < kSamplerBatch; ++c) {
      const auto col = X.col(static_cast<Eigen::Index>(c));
      out[c].assign(col.data(), col.data() + col.size());
    }
    return out;
  }
  for (std::size_t c = 0; c < kSamplerBatch; ++c) {
    const FieldSample s = sample(impl_->spec, seed, batch * kSamplerBatch + c);
    out[c] = evaluate(s, impl_->points);
  }
  return out;
}

void summarize(ExperimentReport& r, const Thresholds& t) {
  std::vector<std::complex<double>> finite;
  finite.reserve(r.samples.size());
  for (const auto& z : r.samples) {
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) finite.push_back(z);
  }
  r.failed_samples = r.samples.size() - finite.size();
  if (static_cast<double>(r.failed_samples) > kMaxFailedFraction * static_cast<double>(r.samples.size())) {
    std::ostringstream msg;
    msg << r.failed_samples << " of " << r.samples.size() << " samples are not finite";
    throw Error(ErrorCode::PartialReport, msg.str());
  }
  if (finite.empty()) throw Error(ErrorCode::PartialReport, "no finite samples");

  std::vector<double> mods(finite.size()), args(finite.size());
  CompensatedSum sq, mre, mim;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    mods[i] = std::abs(finite[i]);
    args[i] = argument_0_2pi(finite[i]);
    sq.add(std::norm(finite[i]));
    mre.add(finite[i].real());
    mim.add(finite[i].imag());
  }
  const double n = static_cast<double>(finite.size());
  r.mean_sq_modulus = sq.value() / n;
  const std::complex<double> mean(mre.value() / n, mim.value() / n);
  CompensatedSum var;
  for (const auto& z : finite) var.add(std::norm(z - mean));
  r.degenerate = var.value() / n < kDegenerateRatio * r.mean_sq_modulus || r.mean_sq_modulus == 0.0;

  r.ks_modulus = ks_rayleigh(mods);
  r.ks_argument = ks_uniform_argument(args);
  r.char_fn_residual = char_fn_residual(finite);
  r.modulus_histogram = histogram(mods);

  const bool judged = !r.degenerate;
  r.ks_modulus_pass = judged && r.ks_modulus <= t.ks;
  r.ks_argument_pass = judged && r.ks_argument <= t.ks;
  r.mean_sq_pass = judged && std::fabs(r.mean_sq_modulus - 1.0) <= t.mean_sq_tolerance;
  r.char_fn_pass = judged && r.char_fn_residual <= t.char_fn;
}

namespace {

ExperimentReport start_report(const ExperimentConfig& c, const ExpandingMap& map,
                              const TracePlan& plan, double xi_for_bound) {
  ExperimentReport r;
  r.A_n = plan.A_n();
  r.total_points = plan.point_count();
  r.orbit_count = plan.orbit_count();
  if (xi_for_bound > 1.0) {
    r.ehrenfest_bound = ehrenfest_bound(xi_for_bound, map.degree(), map.max_derivative(),
                                        c.spectrum.k, c.spectrum.epsilon, c.ehrenfest_c);
    r.ehrenfest_satisfied = c.n <= r.ehrenfest_bound;
  }
  return r;
}

std::vector<double> table_coordinates(const OrbitTable& table) {
  std::vector<double> xs;
  xs.reserve(table.total_points());
  for (const auto& p : table.points()) xs.push_back(p.x.value());
  return xs;
}

}  // namespace

ExperimentReport run_random_field_experiment(const ExperimentConfig& config,
                                             const ExpandingMap& map, const OrbitTable& table,
                                             Parallelism par) {
  validate(config);
  const TracePlan plan(table);
  const std::vector<double> xs = table_coordinates(table);
  const PointFunction tau0 = config.tau0.function();
  std::vector<double> tau0_values(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) tau0_values[i] = tau0(xs[i]);

  const FieldDrawer drawer(config.spectrum, config.sampler, xs);
  ExperimentReport r = start_report(config, map, plan, std::fabs(config.xi));
  r.samples.resize(config.samples);
  r.xi_used.assign(config.samples, config.xi);

  parallel_for(batch_count(config.samples), par, [&](std::size_t b) {
    const auto fields = drawer.draw_batch(config.seed, b);
    std::vector<double> tau(xs.size());
    for (std::size_t c = 0; c < kSamplerBatch; ++c) {
      const std::size_t idx = b * kSamplerBatch + c;
      if (idx >= config.samples) break;
      for (std::size_t i = 0; i < xs.size(); ++i) tau[i] = tau0_values[i] + fields[c][i];
      r.samples[idx] = plan.trace(tau, config.xi).normalized;
    }
  });
  summarize(r, config.thresholds);
  return r;
}

ExperimentReport run_random_xi_experiment(const ExperimentConfig& config,
                                          const ExpandingMap& map, const OrbitTable& table,
                                          Parallelism par) {
  validate(config);
  const TracePlan plan(table);
  const std::vector<double> xs = table_coordinates(table);
  const PointFunction tau0 = config.tau0.function();

  // One field draw (index 0) shared by every frequency.
  const FieldDrawer drawer(config.spectrum, config.sampler, xs);
  const auto field = drawer.draw_batch(config.seed, 0).front();
  std::vector<double> tau(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) tau[i] = tau0(xs[i]) + field[i];
  const std::vector<double> sums = plan.orbit_sums(tau);

  ExperimentReport r = start_report(config, map, plan, config.xi0);
  if (config.xi0 > 1.0) {
    r.C_e = config.n * std::numbers::ln2 / std::log(config.xi0);
  }
  r.samples.resize(config.samples);
  r.xi_used.resize(config.samples);

  parallel_for(config.samples, par, [&](std::size_t i) {
    Engine engine = make_engine(config.seed, streams::xi_draw, i);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double xi = config.xi0 + config.xi_width * uniform(engine);
    std::vector<double> phases(sums.size());
    for (std::size_t o = 0; o < sums.size(); ++o) phases[o] = std::fmod(xi * sums[o], kTwoPi);
    r.xi_used[i] = xi;
    r.samples[i] = plan.trace_from_orbit_phases(phases, xi).normalized;
  });
  summarize(r, config.thresholds);
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config, Parallelism par) {
  validate(config);
  const ExpandingMap map = make_catalog_map(config.map_id, config.map_params);
  const OrbitTable table = build_orbit_table(map, config.n, par);
  if (config.mode == ExperimentMode::random_field) {
    return run_random_field_experiment(config, map, table, par);
  }
  return run_random_xi_experiment(config, map, table, par);
}

std::vector<std::complex<double>> synthetic_phase_samples(const TracePlan& plan, std::size_t count,
                                                          std::uint64_t seed, Parallelism par) {
  std::vector<std::complex<double>> out(count);
  parallel_for(count, par, [&](std::size_t i) {
    Engine engine = make_engine(seed, streams::synthetic_phase, i);
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    std::vector<double> phases(plan.orbit_count());
    for (auto& p : phases) p = uniform(engine);
    out[i] = plan.trace_from_orbit_phases(phases, 0.0).normalized;
  });
  return out;
}

void write_samples_csv(std::ostream& out, const ExperimentReport& r) {
  CsvWriter csv(out, {"index", "re_z", "im_z", "abs_z", "arg_z", "xi_used"});
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto z = r.samples[i];
    csv.row(i, z.real(), z.imag(), std::abs(z), argument_0_2pi(z), r.xi_used[i]);
  }
}

}  // namespace ftlab
