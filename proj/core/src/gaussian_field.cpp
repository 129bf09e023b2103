#include "ftlab/gaussian_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "ftlab/bump_kernel.hpp"
#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"

namespace ftlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Bump transforms are evaluated out to this many multiples of M^j before
// the tail is judged.
constexpr double kBumpScanFactor = 64.0;

// Smallest P with sum_{p>P} v_p <= ratio * sum_{p<=P} v_p, or nullopt.
std::optional<std::size_t> tail_truncation(const std::vector<double>& v, double ratio) {
  std::vector<double> tail(v.size() + 1, 0.0);
  for (std::size_t i = v.size(); i-- > 0;) tail[i] = tail[i + 1] + v[i];
  double head = 0.0;
  for (std::size_t P = 0; P < v.size(); ++P) {
    head += v[P];
    if (tail[P + 1] <= ratio * head) return P;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::zero: return "zero";
    case SpectrumKind::power_law: return "power_law";
    case SpectrumKind::bump: return "bump";
    case SpectrumKind::composite: return "composite";
    case SpectrumKind::custom: return "custom";
  }
  return "unknown";
}

double SpectrumSpec::kernel_at_zero() const {
  CompensatedSum s;
  for (std::size_t p = variances.size(); p-- > 1;) s.add(2.0 * variances[p]);
  s.add(variances[0]);
  return s.value();
}

std::string SpectrumSpec::describe() const {
  std::ostringstream o;
  o.precision(17);
  o << to_string(kind) << "(";
  switch (kind) {
    case SpectrumKind::power_law:
      o << "C=" << C << ",k=" << k << ",eps=" << epsilon << ",sigma0_sq=" << variances[0];
      break;
    case SpectrumKind::bump:
      o << "j=" << j << ",k=" << k << ",eps=" << epsilon << ",M=" << M << ",profile=" << profile;
      break;
    case SpectrumKind::composite:
      o << "j_max=" << j_max << ",k=" << k << ",eps=" << epsilon << ",M=" << M << ",C=" << C;
      break;
    default:
      break;
  }
  o << ";P=" << truncation() << ")";
  return o.str();
}

std::optional<double> SpectrumSpec::support_radius() const {
  if (kind != SpectrumKind::bump) return std::nullopt;
  return 1.0 / (3.0 * std::pow(M, j));
}

SpectrumSpec build_zero_spectrum() { return SpectrumSpec{}; }

SpectrumSpec build_power_law(double C, int k, double epsilon, double sigma0_sq,
                             std::size_t P) {
  if (!(C > 0.0) || k < 1 || !(epsilon > 0.0) || !(sigma0_sq >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "power law needs C > 0, k >= 1, eps > 0, sigma0_sq >= 0");
  }
  const double s = 2.0 * k + 2.0 + epsilon;
  // sum_{p>P} p^{-s}: 16 explicit terms, then Euler-Maclaurin from P+16
  // where the first omitted correction is negligible.
  auto tail_ok = [&](std::size_t p_max, double head) {
    double tail = 0.0;
    const std::size_t start = p_max + 16;
    for (std::size_t p = p_max + 1; p <= start; ++p) tail += std::pow(static_cast<double>(p), -s);
    const double Q = static_cast<double>(start);
    tail += std::pow(Q, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(Q, -s) +
            s / 12.0 * std::pow(Q, -s - 1.0) -
            s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(Q, -s - 3.0);
    return C * tail <= kTailRatio * head;
  };

  SpectrumSpec spec;
  spec.kind = SpectrumKind::power_law;
  spec.C = C;
  spec.k = k;
  spec.epsilon = epsilon;
  spec.variances = {sigma0_sq};
  double head = sigma0_sq;
  const std::size_t cap = P > 0 ? P : kMaxTruncation;
  for (std::size_t p = 1; p <= cap; ++p) {
    const double v = C * std::pow(static_cast<double>(p), -s);
    spec.variances.push_back(v);
    head += v;
    if (P == 0 && tail_ok(p, head)) return spec;
  }
  if (P > 0 && tail_ok(P, head)) return spec;
  std::ostringstream msg;
  msg << "power law tail exceeds " << kTailRatio << " of the retained variance at P=" << cap;
  throw Error(ErrorCode::TailTooHeavy, msg.str());
}

SpectrumSpec build_default_spectrum(int k, double epsilon) {
  const SpectrumSpec unit = build_power_law(1.0, k, epsilon, 0.0);
  return build_power_law(1.0 / unit.kernel_at_zero(), k, epsilon, 0.0, unit.truncation());
}

SpectrumSpec build_custom_spectrum(std::vector<double> variances) {
  if (variances.empty()) variances.push_back(0.0);
  for (std::size_t p = 0; p < variances.size(); ++p) {
    if (!(variances[p] >= 0.0) || !std::isfinite(variances[p])) {
      std::ostringstream msg;
      msg << "sigma_" << p << "^2 = " << variances[p] << " is not a valid variance";
      throw Error(ErrorCode::NegativeSpectrum, msg.str());
    }
  }
  SpectrumSpec spec;
  spec.kind = SpectrumKind::custom;
  spec.variances = std::move(variances);
  return spec;
}

SpectrumSpec build_bump_spectrum(int j, int k, double epsilon, double M, std::size_t P,
                                 std::string_view profile) {
  if (j < 1 || k < 1 || !(epsilon > 0.0) || !(M > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "bump spectrum needs j >= 1, k >= 1, eps > 0, M > 1");
  }
  if (profile != "smooth_bump") {
    throw Error(ErrorCode::InvalidArgument, "unknown K_init profile '" + std::string(profile) + "'");
  }
  const BumpKernel& kernel = default_bump_kernel();
  const double scale = std::pow(M, j);
  const double scan = std::ceil(kBumpScanFactor * scale);
  const std::size_t count = P > 0 ? P + 1 : static_cast<std::size_t>(scan) + 1;
  if (count > kMaxTruncation + 1) {
    std::ostringstream msg;
    msg << "bump spectrum j=" << j << " needs more than 2^20 modes";
    throw Error(ErrorCode::TailTooHeavy, msg.str());
  }
  const double prefactor = std::pow(M, -j * (2.0 * k + 2.0 + epsilon));
  std::vector<double> v = kernel.fourier_progression(0.0, kTwoPi / scale, count);
  for (auto& x : v) x *= prefactor;

  if (P == 0) {
    const auto cut = tail_truncation(v, kTailRatio);
    if (!cut) throw Error(ErrorCode::TailTooHeavy, "bump spectrum tail bound not met");
    v.resize(*cut + 1);
  }
  SpectrumSpec spec;
  spec.kind = SpectrumKind::bump;
  spec.variances = std::move(v);
  spec.j = j;
  spec.k = k;
  spec.epsilon = epsilon;
  spec.M = M;
  spec.profile = std::string(profile);
  return spec;
}

CompositeSpectrum build_composite_spectrum(const SpectrumSpec& base, int j_max, double M,
                                           std::string_view profile) {
  if (j_max < 1) throw Error(ErrorCode::InvalidArgument, "composite spectrum needs j_max >= 1");
  const std::size_t P = base.truncation();
  CompositeSpectrum out;
  std::vector<double> bump_sum(P + 1, 0.0);
  for (int j = 1; j <= j_max; ++j) {
    out.bumps.push_back(build_bump_spectrum(j, base.k, base.epsilon, M, P, profile));
    const auto& v = out.bumps.back().variances;
    for (std::size_t p = 0; p <= P; ++p) bump_sum[p] += v[p];
  }
  // The constant mode does not enter the decay condition, so C is fixed on
  // p >= 1 and the p = 0 compensator only tops the bumps up to C base_0.
  double C = 0.0;
  for (std::size_t p = 1; p <= P; ++p) {
    if (base.variances[p] > 0.0) {
      C = std::max(C, bump_sum[p] / base.variances[p]);
    } else if (bump_sum[p] > 0.0) {
      std::ostringstream msg;
      msg << "base spectrum vanishes at p=" << p << " where the bump fields do not";
      throw Error(ErrorCode::NegativeSpectrum, msg.str());
    }
  }
  std::vector<double> comp(P + 1), total(P + 1);
  for (std::size_t p = 0; p <= P; ++p) {
    const double target = C * base.variances[p];
    comp[p] = target - bump_sum[p];
    if (comp[p] < 0.0) {
      if (p > 0 && comp[p] < -1e-12 * target) {
        throw Error(ErrorCode::NegativeSpectrum, "negative compensator variance");
      }
      comp[p] = 0.0;
    }
    total[p] = bump_sum[p] + comp[p];
  }
  out.C = C;
  out.compensator = build_custom_spectrum(std::move(comp));
  out.total = build_custom_spectrum(std::move(total));
  out.total.kind = SpectrumKind::composite;
  out.total.C = C;
  out.total.k = base.k;
  out.total.epsilon = base.epsilon;
  out.total.j_max = j_max;
  out.total.M = M;
  out.total.profile = std::string(profile);
  return out;
}

CovarianceKernel::CovarianceKernel(const SpectrumSpec& spec)
    : variances_(spec.variances),
      at_zero_(spec.kernel_at_zero()),
      support_radius_(spec.support_radius()) {
  if (spec.kind == SpectrumKind::bump) {
    if (spec.profile != "smooth_bump") {
      throw Error(ErrorCode::InvalidArgument, "closed-form kernel only for smooth_bump");
    }
    bump_scale_ = std::pow(spec.M, spec.j);
    bump_height_ = std::pow(spec.M, -spec.j * (2.0 * spec.k + 1.0 + spec.epsilon));
    at_zero_ = bump_height_;
  }
}

CovarianceKernel::CovarianceKernel(PointFunction kernel, double at_zero)
    : variances_{0.0}, function_(std::move(kernel)), at_zero_(at_zero) {}

double CovarianceKernel::operator()(double x) const {
  if (function_) return function_(x);
  if (support_radius_) {
    const double d = circle_distance(x, 0.0);
    if (d >= *support_radius_) return 0.0;
    return bump_height_ * default_bump_kernel().value(bump_scale_ * d);
  }
  // Clenshaw for sum_{p>=1} v_p cos(p theta).
  const double theta = kTwoPi * (x - std::floor(x));
  const double two_cos = 2.0 * std::cos(theta);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t p = variances_.size(); p-- > 1;) {
    const double b0 = variances_[p] + two_cos * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double series = b1 * std::cos(theta) - b2;
  return variances_[0] + 2.0 * series;
}

FieldSample sample(const SpectrumSpec& spec, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FieldSample s;
  s.c0 = std::sqrt(spec.variances[0]) * normal(engine);
  s.c.resize(spec.truncation());
  for (std::size_t p = 1; p <= spec.truncation(); ++p) {
    const double sd = std::sqrt(0.5 * spec.variances[p]);
    const double re = normal(engine);
    const double im = normal(engine);
    s.c[p - 1] = {sd * re, sd * im};
  }
  return s;
}

FieldSample sample(const SpectrumSpec& spec, std::uint64_t seed, std::uint64_t index) {
  Engine engine = make_engine(seed, streams::field_draw, index);
  return sample(spec, engine);
}

double evaluate(const FieldSample& s, double x) {
  if (s.c.empty()) return s.c0;
  const double theta = kTwoPi * (x - std::floor(x));
  const std::complex<double> z(std::cos(theta), std::sin(theta));
  std::complex<double> acc = 0.0;
  for (std::size_t p = s.c.size(); p-- > 0;) acc = (acc + s.c[p]) * z;
  return s.c0 + 2.0 * acc.real();
}

std::vector<double> evaluate(const FieldSample& s, std::span<const double> points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate(s, points[i]);
  return out;
}

namespace {

double log_log_slope(const std::vector<double>& logp, const std::vector<double>& logv) {
  const double n = static_cast<double>(logp.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    mx += logp[i];
    my += logv[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    sxy += (logp[i] - mx) * (logv[i] - my);
    sxx += (logp[i] - mx) * (logp[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

RegularityReport regularity_diagnostic(const SpectrumSpec& spec, int n_draws,
                                       std::uint64_t seed) {
  RegularityReport r;
  r.draws = n_draws;
  r.k = spec.k;
  const std::size_t P = spec.truncation();
  const double C = spec.kind == SpectrumKind::power_law ? spec.C : spec.kernel_at_zero();
  const double expo = spec.k + 1.0 + spec.epsilon / 4.0;
  const std::size_t half = P / 2;

  std::vector<double> mean_abs(P + 1, 0.0);
  for (int d = 0; d < n_draws; ++d) {
    Engine engine = make_engine(seed, streams::regularity, static_cast<std::uint64_t>(d));
    const FieldSample s = sample(spec, engine);
    double partial = 0.0;
    for (std::size_t p = 1; p <= P; ++p) {
      const double a = std::abs(s.c[p - 1]);
      mean_abs[p] += a / n_draws;
      if (C > 0.0) {
        r.max_normalized_coefficient = std::max(
            r.max_normalized_coefficient, a * std::pow(static_cast<double>(p), expo) / std::sqrt(C));
      }
      partial += a * std::pow(kTwoPi * static_cast<double>(p), spec.k);
      if (p == half) r.partial_sum_half += partial / n_draws;
    }
    r.partial_sum_full += partial / n_draws;
  }

  std::vector<double> logp, logv, loge;
  const double mean_factor = std::sqrt(std::numbers::pi) / 2.0;
  for (std::size_t p = std::max<std::size_t>(half, 1); p <= P; ++p) {
    if (spec.variances[p] <= 0.0 || mean_abs[p] <= 0.0) continue;
    const double w = std::pow(kTwoPi * static_cast<double>(p), spec.k);
    logp.push_back(std::log(static_cast<double>(p)));
    logv.push_back(std::log(mean_factor * std::sqrt(spec.variances[p]) * w));
    loge.push_back(std::log(mean_abs[p] * w));
  }
  if (logp.size() >= 2) {
    r.fitted_exponent = log_log_slope(logp, logv);
    r.empirical_exponent = log_log_slope(logp, loge);
    r.ck_sum_converges = r.fitted_exponent < -1.0;
  } else {
    r.fitted_exponent = -std::numeric_limits<double>::infinity();
    r.empirical_exponent = r.fitted_exponent;
    r.ck_sum_converges = true;
  }
  return r;
}

void write_field_sample_csv(std::ostream& out, const FieldSample& s) {
  CsvWriter csv(out, {"p", "re_c", "im_c"});
  csv.row(std::size_t{0}, s.c0, 0.0);
  for (std::size_t p = 1; p <= s.c.size(); ++p) {
    csv.row(p, s.c[p - 1].real(), s.c[p - 1].imag());
  }
}

}  // namespace ftlab
