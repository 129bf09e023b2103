#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ftlab {

/// Kolmogorov-Smirnov distance between the empirical law of |Z| and the
/// Rayleigh law of |N_C(0,1)|, CDF 1 - e^{-s^2}.
double ks_rayleigh(std::span<const double> moduli);

/// KS distance of arg/(2 pi) against Uniform[0,1]; arguments in [0, 2 pi).
double ks_uniform_argument(std::span<const double> args);

/// Two-sample KS distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

inline constexpr double kCharFnStep = 0.5;
inline constexpr double kCharFnRadius = 3.0;

/// max over the grid (i h, j h), |(i h, j h)| <= radius, of
/// |mean exp(i(s1 Re Z + s2 Im Z)) - e^{-(s1^2 + s2^2)/4}|.
double char_fn_residual(std::span<const std::complex<double>> samples,
                        double step = kCharFnStep, double radius = kCharFnRadius);

/// Argument in [0, 2 pi).
double argument_0_2pi(std::complex<double> z);

/// Density of |N_C(0,1)|: 2 s e^{-s^2}.
double rayleigh_density(double s);

struct Histogram {
  double lo = 0.0;
  double hi = 3.0;
  std::vector<std::size_t> counts;
  /// Samples at or above hi.
  std::size_t overflow = 0;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

inline constexpr std::size_t kHistogramBins = 60;

Histogram histogram(std::span<const double> values, double lo = 0.0, double hi = 3.0,
                    std::size_t bins = kHistogramBins);

/// CSV: bin_left, bin_right, count, rayleigh_density_at_midpoint.
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// |P(alpha <= t X mod 2 pi <= beta) - (beta - alpha)/(2 pi)| for X ~ N(0,1),
/// summing the interval masses over |k| <= 10 t + 10.
double wrapped_gaussian_deviation(double t, double alpha, double beta);

}  // namespace ftlab
