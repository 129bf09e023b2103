#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ftlab/circle_map.hpp"
#include "ftlab/flat_trace.hpp"
#include "ftlab/gaussian_field.hpp"
#include "ftlab/parallel.hpp"
#include "ftlab/periodic_orbits.hpp"
#include "ftlab/statistics.hpp"

namespace ftlab {

/// Deterministic part tau0 of the roof function.
struct Tau0Spec {
  /// "zero", "cos" (A cos 2 pi x), "sin" (A sin 2 pi x) or "constant" (value).
  std::string kind = "cos";
  double amplitude = 1.0;
  double value = 0.0;

  PointFunction function() const;
  std::string describe() const;
};

enum class ExperimentMode { random_field, random_xi };
enum class SamplerBackend { covariance, fourier };

std::string to_string(ExperimentMode mode);
std::string to_string(SamplerBackend backend);

struct Thresholds {
  double ks = 0.05;
  double mean_sq_tolerance = 0.05;
  double char_fn = 0.05;
};

inline constexpr std::size_t kMinSamples = 100;
inline constexpr double kDegenerateRatio = 1e-12;
inline constexpr double kMaxFailedFraction = 1e-3;

struct ExperimentConfig {
  std::string map_id = "sine";
  std::vector<double> map_params;
  int n = 11;
  ExperimentMode mode = ExperimentMode::random_field;
  /// Fixed frequency (random_field).
  double xi = 2e6;
  /// xi ~ Uniform[xi0, xi0 + xi_width] (random_xi).
  double xi0 = 2e6;
  double xi_width = 10.0;
  Tau0Spec tau0;
  SpectrumSpec spectrum;
  /// True when the spectrum is the built-in default rather than user-chosen.
  bool spectrum_is_default = false;
  SamplerBackend sampler = SamplerBackend::covariance;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  /// Constant c in the Ehrenfest constraint n <= c log xi / (...).
  double ehrenfest_c = 0.5;
  Thresholds thresholds;
};

struct ExperimentReport {
  std::vector<std::complex<double>> samples;
  std::vector<double> xi_used;
  std::size_t failed_samples = 0;
  double ks_modulus = 0.0;
  double ks_argument = 0.0;
  double mean_sq_modulus = 0.0;
  double char_fn_residual = 0.0;
  Histogram modulus_histogram;
  bool degenerate = false;

  double A_n = 0.0;
  std::size_t total_points = 0;
  std::size_t orbit_count = 0;
  double ehrenfest_bound = 0.0;
  bool ehrenfest_satisfied = false;
  /// n log 2 / log xi0 (random_xi only).
  double C_e = 0.0;

  bool ks_modulus_pass = false;
  bool ks_argument_pass = false;
  bool mean_sq_pass = false;
  bool char_fn_pass = false;
  bool all_pass() const { return ks_modulus_pass && ks_argument_pass && mean_sq_pass && char_fn_pass; }
};

/// Field values at fixed points from either backend. Draws come in batches
/// of kSamplerBatch; entry i of batch b is draw 64 b + i.
class FieldDrawer {
 public:
  FieldDrawer(const SpectrumSpec& spec, SamplerBackend backend, std::span<const double> points);
  std::vector<std::vector<double>> draw_batch(std::uint64_t seed, std::uint64_t batch) const;
  /// Rank of the covariance factor (covariance backend) or 2P+1.
  std::size_t dimension() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Fills the statistics fields of a report from its samples and thresholds.
void summarize(ExperimentReport& report, const Thresholds& thresholds);

ExperimentReport run_random_field_experiment(const ExperimentConfig& config,
                                             const ExpandingMap& map, const OrbitTable& table,
                                             Parallelism par = {});
ExperimentReport run_random_xi_experiment(const ExperimentConfig& config,
                                          const ExpandingMap& map, const OrbitTable& table,
                                          Parallelism par = {});
/// Builds the map and orbit table from the config and dispatches on mode.
ExperimentReport run_experiment(const ExperimentConfig& config, Parallelism par = {});

/// Null model: independent uniform phases per orbit in place of the field.
std::vector<std::complex<double>> synthetic_phase_samples(const TracePlan& plan, std::size_t count,
                                                          std::uint64_t seed, Parallelism par = {});

/// CSV: index, re_z, im_z, abs_z, arg_z, xi_used.
void write_samples_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace ftlab
