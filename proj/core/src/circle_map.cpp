#include "ftlab/circle_map.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "ftlab/error.hpp"

namespace ftlab {

namespace {

constexpr int kValidationGrid = 10000;
constexpr double kConsistencyTol = 1e-12;

double reduce_mod1(double x) {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

CirclePoint::CirclePoint(double x) : x_(reduce_mod1(x)) {}

double circle_distance(double a, double b) {
  double d = std::fabs(reduce_mod1(a) - reduce_mod1(b));
  return std::min(d, 1.0 - d);
}

ExpandingMap::ExpandingMap(std::string name, PointFunction lift_fn,
                           PointFunction derivative_fn, int degree,
                           double min_derivative, double max_derivative)
    : name_(std::move(name)),
      lift_(std::move(lift_fn)),
      derivative_(std::move(derivative_fn)),
      degree_(degree),
      m_(min_derivative),
      M_(max_derivative) {
  if (!lift_ || !derivative_) {
    throw Error(ErrorCode::InvalidMap, name_ + ": lift and derivative are required");
  }
  if (degree_ < 2) {
    throw Error(ErrorCode::InvalidMap, name_ + ": an expanding map has degree >= 2");
  }
  if (!(m_ > 1.0)) {
    throw Error(ErrorCode::NonExpanding, name_ + ": inf E' must exceed 1");
  }
  if (!(M_ >= m_)) {
    throw Error(ErrorCode::InvalidMap, name_ + ": sup E' below inf E'");
  }
  shift_ = std::floor(lift_(0.0));

  for (int i = 0; i < kValidationGrid; ++i) {
    const double x = static_cast<double>(i) / kValidationGrid;
    const double step = lift(x + 1.0) - lift(x) - degree_;
    if (std::fabs(step) > kConsistencyTol * std::max(1.0, std::fabs(lift(x)))) {
      std::ostringstream msg;
      msg << name_ << ": lift(x+1) - lift(x) != degree at x=" << x;
      throw Error(ErrorCode::InvalidMap, msg.str());
    }
    const double d = derivative_(x);
    if (std::fabs(derivative_(x + 1.0) - d) > kConsistencyTol * std::max(1.0, std::fabs(d))) {
      std::ostringstream msg;
      msg << name_ << ": derivative is not 1-periodic at x=" << x;
      throw Error(ErrorCode::InvalidMap, msg.str());
    }
    if (d <= 1.0) {
      std::ostringstream msg;
      msg << name_ << ": E'(" << x << ") = " << d << " <= 1";
      throw Error(ErrorCode::NonExpanding, msg.str());
    }
    if (d < m_ - kConsistencyTol || d > M_ + kConsistencyTol) {
      std::ostringstream msg;
      msg << name_ << ": E'(" << x << ") = " << d << " outside [m, M]";
      throw Error(ErrorCode::InvalidMap, msg.str());
    }
  }
}

CirclePoint ExpandingMap::eval_mod1(CirclePoint x) const {
  return CirclePoint(lift(x.value()));
}

double ExpandingMap::log_derivative(CirclePoint x) const {
  const double d = derivative_(x.value());
  if (!(d > 1.0)) {
    std::ostringstream msg;
    msg << name_ << ": E'(" << x.value() << ") = " << d << " <= 1";
    throw Error(ErrorCode::NonExpanding, msg.str());
  }
  return std::log(d);
}

LiftIterate ExpandingMap::lift_iterate(double x, int n) const {
  // lift(y + K) = lift(y) + l K, so only the fractional part is ever fed to
  // the lift and the integer part is carried exactly.
  LiftIterate out;
  double y = x;
  for (int j = 0; j < n; ++j) {
    out.log_derivative += std::log(derivative_(y));
    const double z = lift(y);
    double f = std::floor(z);
    y = z - f;
    if (y >= 1.0) {
      y -= 1.0;
      f += 1.0;
    }
    out.winding = out.winding * degree_ + static_cast<std::int64_t>(f);
  }
  out.frac = y;
  return out;
}

ExpandingMap make_linear_map(int degree) {
  const double l = degree;
  std::ostringstream name;
  name << "linear(" << degree << ")";
  return ExpandingMap(
      name.str(), [l](double x) { return l * x; }, [l](double) { return l; },
      degree, l, l);
}

ExpandingMap make_sine_map(int degree, double amplitude, double phase) {
  const double l = degree;
  const double a = amplitude;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::ostringstream name;
  name.precision(17);
  name << "sine(" << degree << "," << amplitude << "," << phase << ")";
  return ExpandingMap(
      name.str(),
      [=](double x) { return l * x + a / two_pi * std::sin(two_pi * (x + phase)); },
      [=](double x) { return l + a * std::cos(two_pi * (x + phase)); }, degree,
      l - std::fabs(a), l + std::fabs(a));
}

ExpandingMap make_reference_map() { return make_sine_map(2, 0.9, 0.4); }

ExpandingMap make_catalog_map(std::string_view id, std::span<const double> params) {
  auto integer_degree = [&](double v) {
    if (v != std::floor(v) || v < 2 || v > 64) {
      throw Error(ErrorCode::InvalidArgument, "map degree must be an integer in [2, 64]");
    }
    return static_cast<int>(v);
  };
  if (id == "linear") {
    if (params.size() > 1) {
      throw Error(ErrorCode::InvalidArgument, "linear map takes at most one parameter [degree]");
    }
    return make_linear_map(params.empty() ? 2 : integer_degree(params[0]));
  }
  if (id == "sine") {
    if (params.size() > 3) {
      throw Error(ErrorCode::InvalidArgument,
                  "sine map takes at most three parameters [degree, amplitude, phase]");
    }
    const int l = params.size() > 0 ? integer_degree(params[0]) : 2;
    const double a = params.size() > 1 ? params[1] : 0.9;
    const double phase = params.size() > 2 ? params[2] : 0.4;
    return make_sine_map(l, a, phase);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown map id '" + std::string(id) + "'");
}

double birkhoff_sum(const ExpandingMap& map, const PointFunction& phi,
                    CirclePoint x, int n, Summation mode) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "birkhoff_sum needs n >= 1");
  CompensatedSum compensated;
  double plain = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = phi(x.value());
    if (mode == Summation::compensated) {
      compensated.add(v);
    } else {
      plain += v;
    }
    x = map.eval_mod1(x);
  }
  return mode == Summation::compensated ? compensated.value() : plain;
}

}  // namespace ftlab
