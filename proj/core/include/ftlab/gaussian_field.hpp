#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftlab/circle_map.hpp"
#include "ftlab/rng.hpp"

namespace ftlab {

enum class SpectrumKind { zero, power_law, bump, composite, custom };

std::string to_string(SpectrumKind kind);

inline constexpr double kTailRatio = 1e-6;
inline constexpr std::size_t kMaxTruncation = std::size_t{1} << 20;

/// Fourier variance profile sigma_p^2 for p = 0..P of a stationary field
/// sum_p c_p e^{2 i pi p x} with c_{-p} = conj(c_p).
struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::zero;
  /// sigma_p^2, p = 0..P.
  std::vector<double> variances{0.0};

  // Parameters of the generating law (unused ones stay at their defaults).
  double C = 0.0;
  int k = 1;
  double epsilon = 0.1;
  int j = 0;
  int j_max = 0;
  double M = 0.0;
  std::string profile;

  std::size_t truncation() const { return variances.size() - 1; }
  /// K(0) = sigma_0^2 + 2 sum_{p>=1} sigma_p^2.
  double kernel_at_zero() const;
  /// One-line human-readable description of the law and its parameters.
  std::string describe() const;
  /// Bump kernels are compactly supported: radius 1/(3 M^j).
  std::optional<double> support_radius() const;
};

SpectrumSpec build_zero_spectrum();

/// sigma_p^2 = C p^{-(2k+2+eps)} for p >= 1. With P = 0 the smallest P
/// meeting the tail bound is chosen; an explicit P must meet it too.
/// Throws TailTooHeavy when no P <= 2^20 suffices.
SpectrumSpec build_power_law(double C, int k, double epsilon, double sigma0_sq,
                             std::size_t P = 0);

/// Power law with sigma_0^2 = 0 and C fixed so that K(0) = 1.
SpectrumSpec build_default_spectrum(int k = 1, double epsilon = 0.1);

/// Arbitrary sigma_p^2 (p = 0..P). Throws NegativeSpectrum on negative entries.
SpectrumSpec build_custom_spectrum(std::vector<double> variances);

/// sigma_p^2 = M^{-j(2k+2+eps)} FT(K_init)(2 pi p / M^j). P is the smallest
/// truncation meeting the tail bound unless given.
SpectrumSpec build_bump_spectrum(int j, int k, double epsilon, double M,
                                 std::size_t P = 0, std::string_view profile = "smooth_bump");

/// Sum of bump spectra j = 1..j_max plus a compensator
/// sigma_{p,0}^2 = C base_p - sum_j sigma_{p,j}^2, clipped at 0, with C the
/// smallest constant making the compensator nonnegative for 1 <= p <= P.
/// The total equals C base_p for p >= 1; at p = 0 it is
/// max(C base_0, sum_j sigma_{0,j}^2).
struct CompositeSpectrum {
  SpectrumSpec total;
  double C = 0.0;
  std::vector<SpectrumSpec> bumps;
  SpectrumSpec compensator;
};

CompositeSpectrum build_composite_spectrum(const SpectrumSpec& base, int j_max, double M,
                                           std::string_view profile = "smooth_bump");

/// Stationary covariance K(x) = sum_p sigma_p^2 e^{2 i pi p x}.
class CovarianceKernel {
 public:
  explicit CovarianceKernel(const SpectrumSpec& spec);
  /// Arbitrary even 1-periodic kernel; positive-definiteness is not checked.
  CovarianceKernel(PointFunction kernel, double at_zero);

  /// Cosine series by Clenshaw, or the closed form for bump spectra.
  double operator()(double x) const;
  double at_zero() const { return at_zero_; }
  std::optional<double> support_radius() const { return support_radius_; }

 private:
  std::vector<double> variances_;
  PointFunction function_;
  double at_zero_;
  std::optional<double> support_radius_;
  double bump_scale_ = 0.0;  // M^j
  double bump_height_ = 0.0;  // M^{-j(2k+1+eps)}
};

/// One draw of the coefficients: c_0 real, c_p complex for p = 1..P.
struct FieldSample {
  double c0 = 0.0;
  std::vector<std::complex<double>> c;  // c[p-1] = c_p

  std::size_t truncation() const { return c.size(); }
};

/// c_0 ~ N(0, sigma_0^2), c_p ~ N_C(0, sigma_p^2) with independent real and
/// imaginary parts of variance sigma_p^2 / 2.
FieldSample sample(const SpectrumSpec& spec, Engine& engine);
FieldSample sample(const SpectrumSpec& spec, std::uint64_t seed, std::uint64_t index);

/// tau(x) = c_0 + 2 Re sum_p c_p e^{2 i pi p x}.
double evaluate(const FieldSample& s, double x);
std::vector<double> evaluate(const FieldSample& s, std::span<const double> points);

/// Coefficient-decay check of C^k regularity over independent draws.
struct RegularityReport {
  int draws = 0;
  int k = 1;
  /// max over draws and p of |c_p| p^{k+1+eps/4} / sqrt(C); C is the
  /// power-law constant, or K(0) for other spectra.
  double max_normalized_coefficient = 0.0;
  /// Least-squares slope of log E|c_p| (2 pi p)^k against log p on the upper
  /// half of the retained modes, using E|c_p| = sigma_p sqrt(pi)/2.
  double fitted_exponent = 0.0;
  /// Same fit with E|c_p| replaced by the mean over draws.
  double empirical_exponent = 0.0;
  /// Mean of sum_p |c_p| (2 pi p)^k over draws, at P/2 and P.
  double partial_sum_half = 0.0;
  double partial_sum_full = 0.0;
  /// The C^k series converges when the fitted exponent is below -1.
  bool ck_sum_converges = true;
};

RegularityReport regularity_diagnostic(const SpectrumSpec& spec, int n_draws,
                                       std::uint64_t seed);

/// CSV: p, re_c, im_c (p = 0 carries c_0).
void write_field_sample_csv(std::ostream& out, const FieldSample& s);

}  // namespace ftlab
