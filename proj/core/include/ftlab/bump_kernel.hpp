#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ftlab {

/// K_init = (g * g) / (g * g)(0) for an even smooth bump g supported in
/// [-1/6, 1/6], so K_init is supported in [-1/3, 1/3], K_init(0) = 1 and its
/// Fourier transform ghat^2 / int g^2 is nonnegative.
class BumpKernel {
 public:
  /// Profile ids: "smooth_bump" (g(x) = exp(-1/(1 - (6x)^2))).
  explicit BumpKernel(std::string_view profile = "smooth_bump");

  const std::string& profile() const { return profile_; }
  /// Trapezoid nodes on [-1/6, 1/6] after the refinement check.
  int nodes() const { return static_cast<int>(x_.size()); }

  double g(double x) const;
  /// K_init(x); zero for |x| >= 1/3.
  double value(double x) const;
  /// FT(K_init)(w) = int K_init(x) e^{-i w x} dx.
  double fourier(double w) const;
  /// FT(K_init)(w0 + i dw) for i = 0..count-1, by a rotation recurrence.
  std::vector<double> fourier_progression(double w0, double dw, std::size_t count) const;

 private:
  std::string profile_;
  std::vector<double> x_;
  std::vector<double> wg_;  // trapezoid weight times g at each node
  double g_sq_integral_ = 0.0;
};

/// Shared instance for the default profile (construction runs the
/// refinement check once).
const BumpKernel& default_bump_kernel();

}  // namespace ftlab
