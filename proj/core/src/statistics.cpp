#include "ftlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "ftlab/circle_map.hpp"
#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"

namespace ftlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class Cdf>
double ks_one_sample(std::span<const double> values, Cdf cdf) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "KS distance of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// P(a <= X <= b) for X ~ N(0,1), using the tail on the side away from 0.
double normal_mass(double a, double b) {
  constexpr double r = std::numbers::sqrt2;
  if (a >= 0.0) return 0.5 * (std::erfc(a / r) - std::erfc(b / r));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / r) - std::erfc(-a / r));
  return 1.0 - 0.5 * (std::erfc(-a / r) + std::erfc(b / r));
}

}  // namespace

double ks_rayleigh(std::span<const double> moduli) {
  return ks_one_sample(moduli, [](double s) { return s <= 0.0 ? 0.0 : -std::expm1(-s * s); });
}

double ks_uniform_argument(std::span<const double> args) {
  return ks_one_sample(args, [](double a) { return std::clamp(a / kTwoPi, 0.0, 1.0); });
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "KS distance of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double char_fn_residual(std::span<const std::complex<double>> samples, double step,
                        double radius) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "characteristic function of an empty sample");
  const int steps = static_cast<int>(std::floor(radius / step + 1e-9));
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      const double s1 = i * step, s2 = j * step;
      if (s1 * s1 + s2 * s2 > radius * radius * (1.0 + 1e-12)) continue;
      CompensatedSum re, im;
      for (const auto& z : samples) {
        const double ph = s1 * z.real() + s2 * z.imag();
        re.add(std::cos(ph));
        im.add(std::sin(ph));
      }
      const std::complex<double> emp(re.value() / n, im.value() / n);
      const double target = std::exp(-(s1 * s1 + s2 * s2) / 4.0);
      worst = std::max(worst, std::abs(emp - target));
    }
  }
  return worst;
}

double argument_0_2pi(std::complex<double> z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double rayleigh_density(double s) { return s <= 0.0 ? 0.0 : 2.0 * s * std::exp(-s * s); }

Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "histogram needs bins > 0 and hi > lo");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (!(v >= lo)) continue;
    if (v >= hi) {
      ++h.overflow;
      continue;
    }
    const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
    ++h.counts[b];
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  CsvWriter csv(out, {"bin_left", "bin_right", "count", "rayleigh_density_at_midpoint"});
  const double w = h.bin_width();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double left = h.lo + static_cast<double>(b) * w;
    const double right = left + w;
    csv.row(left, right, h.counts[b], rayleigh_density(0.5 * (left + right)));
  }
}

double wrapped_gaussian_deviation(double t, double alpha, double beta) {
  if (!(t >= 1.0) || !(beta - alpha > 0.0) || !(beta - alpha < kTwoPi)) {
    throw Error(ErrorCode::InvalidArgument,
                "wrapped_gaussian_deviation needs t >= 1 and 0 < beta - alpha < 2 pi");
  }
  const auto K = static_cast<long>(std::ceil(10.0 * t)) + 10;
  CompensatedSum mass;
  for (long k = -K; k <= K; ++k) {
    const double shift = kTwoPi * static_cast<double>(k);
    mass.add(normal_mass((alpha + shift) / t, (beta + shift) / t));
  }
  mass.add(-(beta - alpha) / kTwoPi);
  return std::fabs(mass.value());
}

}  // namespace ftlab
