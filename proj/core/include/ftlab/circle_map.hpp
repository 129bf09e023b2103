#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace ftlab {

/// A point of T = R/Z, stored in [0, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  /// Reduces any real modulo 1.
  explicit CirclePoint(double x);

  double value() const { return x_; }

  friend bool operator==(CirclePoint, CirclePoint) = default;

 private:
  double x_ = 0.0;
};

/// Distance on the circle, in [0, 1/2].
double circle_distance(double a, double b);

/// Real function on T given through a 1-periodic function on R.
using PointFunction = std::function<double(double)>;

enum class Summation { plain, compensated };

/// Result of iterating the lift n times from x in [0,1):
/// lift^n(x) = winding + frac, and log (E^n)'(x) = log_derivative.
struct LiftIterate {
  std::int64_t winding = 0;
  double frac = 0.0;
  double log_derivative = 0.0;
};

/// Orientation-preserving expanding circle map of degree l, given by a lift
/// and its exact derivative. Immutable once built; safe to share between
/// threads as long as the supplied callables are.
class ExpandingMap {
 public:
  /// Checks degree consistency, periodicity of the derivative and
  /// m <= E' <= M on a 10^4-point grid. The lift is shifted by an integer so
  /// that lift(0) lies in [0,1).
  ExpandingMap(std::string name, PointFunction lift_fn, PointFunction derivative_fn,
               int degree, double min_derivative, double max_derivative);

  const std::string& name() const { return name_; }
  int degree() const { return degree_; }
  /// m = inf E'.
  double min_derivative() const { return m_; }
  /// M = sup E'.
  double max_derivative() const { return M_; }

  double lift(double x) const { return lift_(x) - shift_; }
  double derivative(double x) const { return derivative_(x); }

  CirclePoint eval_mod1(CirclePoint x) const;
  /// J(x) = log E'(x). Throws NonExpanding when E'(x) <= 1.
  double log_derivative(CirclePoint x) const;

  /// n-fold lift iteration with integer bookkeeping; x must lie in [0,1).
  LiftIterate lift_iterate(double x, int n) const;

 private:
  std::string name_;
  PointFunction lift_;
  PointFunction derivative_;
  int degree_;
  double m_;
  double M_;
  double shift_ = 0.0;
};

/// x -> l x.
ExpandingMap make_linear_map(int degree);

/// x -> l x + a/(2 pi) sin(2 pi (x + phase)); m = l - |a|, M = l + |a|.
ExpandingMap make_sine_map(int degree, double amplitude, double phase);

/// The sine map with l = 2, a = 0.9, phase 0.4 used by the reference
/// experiments.
ExpandingMap make_reference_map();

/// Catalog lookup: "linear" with params [l], "sine" with params
/// [l, amplitude, phase] (missing trailing params take the reference
/// values). Throws InvalidArgument for unknown ids.
ExpandingMap make_catalog_map(std::string_view id, std::span<const double> params);

/// Sum_{k<n} phi(E^k x), iterating with eval_mod1.
double birkhoff_sum(const ExpandingMap& map, const PointFunction& phi,
                    CirclePoint x, int n, Summation mode = Summation::plain);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace ftlab
