#include "ftlab/bump_kernel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "ftlab/circle_map.hpp"
#include "ftlab/error.hpp"

namespace ftlab {

namespace {

constexpr double kHalfWidth = 1.0 / 6.0;
constexpr int kStartNodes = 512;
constexpr int kMaxNodes = 1 << 16;
constexpr double kRefineTol = 1e-8;
constexpr double kNegativeTol = 1e-6;
// Frequencies used by the refinement check, as multiples of 2 pi.
constexpr int kCheckFrequencies = 256;
// Reseed the rotation recurrence this often to bound drift.
constexpr std::size_t kReseedInterval = 256;

double smooth_bump(double x) {
  const double t = 6.0 * x;
  if (std::fabs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

struct Rule {
  std::vector<double> x;
  std::vector<double> wg;
};

// Interior trapezoid nodes; g and all its derivatives vanish at +-1/6.
Rule make_rule(int nodes) {
  Rule r;
  const double h = 2.0 * kHalfWidth / nodes;
  for (int i = 1; i < nodes; ++i) {
    const double x = -kHalfWidth + i * h;
    r.x.push_back(x);
    r.wg.push_back(h * smooth_bump(x));
  }
  return r;
}

double ghat(const Rule& r, double w) {
  CompensatedSum s;
  for (std::size_t i = 0; i < r.x.size(); ++i) s.add(r.wg[i] * std::cos(w * r.x[i]));
  return s.value();
}

}  // namespace

BumpKernel::BumpKernel(std::string_view profile) : profile_(profile) {
  if (profile_ != "smooth_bump") {
    throw Error(ErrorCode::InvalidArgument, "unknown K_init profile '" + profile_ + "'");
  }
  Rule coarse = make_rule(kStartNodes);
  for (int nodes = 2 * kStartNodes;; nodes *= 2) {
    Rule fine = make_rule(nodes);
    double diff = 0.0;
    const double scale = std::fabs(ghat(fine, 0.0));
    for (int f = 0; f <= kCheckFrequencies; ++f) {
      const double w = 2.0 * std::numbers::pi * f;
      diff = std::max(diff, std::fabs(ghat(fine, w) - ghat(coarse, w)));
    }
    coarse = std::move(fine);
    if (diff <= kRefineTol * scale) break;
    if (nodes >= kMaxNodes) {
      throw Error(ErrorCode::NegativeSpectrum,
                  "K_init transform did not stabilise under grid refinement");
    }
  }
  x_ = std::move(coarse.x);
  wg_ = std::move(coarse.wg);
  CompensatedSum sq;
  for (std::size_t i = 0; i < x_.size(); ++i) sq.add(wg_[i] * smooth_bump(x_[i]));
  g_sq_integral_ = sq.value();

  for (int f = 0; f <= kCheckFrequencies; ++f) {
    const double v = fourier(2.0 * std::numbers::pi * f);
    if (v < -kNegativeTol) {
      std::ostringstream msg;
      msg << "FT(K_init) = " << v << " at w = 2pi*" << f;
      throw Error(ErrorCode::NegativeSpectrum, msg.str());
    }
  }
}

double BumpKernel::g(double x) const { return smooth_bump(x); }

double BumpKernel::value(double x) const {
  x = std::fabs(x);
  if (x >= 2.0 * kHalfWidth) return 0.0;
  // (g*g)(x) = int g(y) g(x - y) dy over y in [x - 1/6, 1/6], with the same
  // node count as the normalising integral so that value(0) == 1 exactly.
  const int nodes = static_cast<int>(x_.size()) + 1;
  const double lo = x - kHalfWidth;
  const double h = (kHalfWidth - lo) / nodes;
  CompensatedSum s;
  for (int i = 1; i < nodes; ++i) {
    const double y = lo + i * h;
    s.add(smooth_bump(y) * smooth_bump(x - y));
  }
  return h * s.value() / g_sq_integral_;
}

double BumpKernel::fourier(double w) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < x_.size(); ++i) s.add(wg_[i] * std::cos(w * x_[i]));
  const double gh = s.value();
  return gh * gh / g_sq_integral_;
}

std::vector<double> BumpKernel::fourier_progression(double w0, double dw,
                                                    std::size_t count) const {
  const std::size_t nx = x_.size();
  std::vector<std::complex<double>> phase(nx), step(nx);
  for (std::size_t i = 0; i < nx; ++i) step[i] = std::polar(1.0, dw * x_[i]);
  std::vector<double> out(count);
  for (std::size_t p = 0; p < count; ++p) {
    if (p % kReseedInterval == 0) {
      const double w = w0 + static_cast<double>(p) * dw;
      for (std::size_t i = 0; i < nx; ++i) phase[i] = std::polar(1.0, w * x_[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      acc += wg_[i] * phase[i].real();
      phase[i] *= step[i];
    }
    out[p] = acc * acc / g_sq_integral_;
  }
  return out;
}

const BumpKernel& default_bump_kernel() {
  static const BumpKernel kernel("smooth_bump");
  return kernel;
}

}  // namespace ftlab
