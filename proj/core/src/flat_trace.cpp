#include "ftlab/flat_trace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ftlab/error.hpp"

namespace ftlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double inverse_expm1(double J) {
  // e^{-J} / (1 - e^{-J}); expm1 keeps the denominator accurate for small J.
  return std::exp(-J) / -std::expm1(-J);
}

double compute_An(const OrbitTable& table) {
  CompensatedSum s;
  for (const auto& orbit : table.orbits()) {
    const double m = orbit.prime_period;
    const double w = inverse_expm1(orbit.log_multiplier());
    s.add(m * m * w * w);
  }
  return 1.0 / std::sqrt(s.value());
}

double compute_An_pointwise(const OrbitTable& table, const ExpandingMap& map) {
  CompensatedSum s;
  const auto points = table.points();
  const auto orbits = table.orbits();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const LiftIterate it = map.lift_iterate(points[i].x.value(), table.n());
    const double w = inverse_expm1(it.log_derivative);
    s.add(orbits[table.orbit_of_point(i)].prime_period * w * w);
  }
  return 1.0 / std::sqrt(s.value());
}

TracePlan::TracePlan(const OrbitTable& table, Summation mode)
    : n_(table.n()), A_n_(compute_An(table)), point_count_(table.total_points()), mode_(mode) {
  member_offsets_.push_back(0);
  for (const auto& orbit : table.orbits()) {
    members_.insert(members_.end(), orbit.members.begin(), orbit.members.end());
    member_offsets_.push_back(members_.size());
    multiplicity_.push_back(static_cast<double>(n_ / orbit.prime_period));
    const double w = orbit.prime_period * inverse_expm1(orbit.log_multiplier());
    weights_.push_back(w);
  }
  CompensatedSum s;
  for (double w : weights_) s.add(w);
  weight_sum_ = s.value();
}

std::vector<double> TracePlan::orbit_sums(std::span<const double> tau_at_points) const {
  if (tau_at_points.size() != point_count_) {
    std::ostringstream msg;
    msg << "field values cover " << tau_at_points.size() << " points, table has "
        << point_count_;
    throw Error(ErrorCode::IndexMismatch, msg.str());
  }
  std::vector<double> out(weights_.size());
  for (std::size_t o = 0; o < weights_.size(); ++o) {
    double sum = 0.0;
    if (mode_ == Summation::compensated) {
      CompensatedSum cs;
      for (std::size_t k = member_offsets_[o]; k < member_offsets_[o + 1]; ++k) {
        cs.add(tau_at_points[members_[k]]);
      }
      sum = cs.value();
    } else {
      for (std::size_t k = member_offsets_[o]; k < member_offsets_[o + 1]; ++k) {
        sum += tau_at_points[members_[k]];
      }
    }
    out[o] = multiplicity_[o] * sum;
  }
  return out;
}

TraceResult TracePlan::trace(std::span<const double> tau_at_points, double xi) const {
  std::vector<double> phases = orbit_sums(tau_at_points);
  for (auto& p : phases) p = std::fmod(xi * p, kTwoPi);
  return trace_from_orbit_phases(phases, xi);
}

TraceResult TracePlan::trace_from_orbit_phases(std::span<const double> phases, double xi) const {
  if (phases.size() != weights_.size()) {
    throw Error(ErrorCode::IndexMismatch, "one phase per orbit is required");
  }
  CompensatedSum re, im;
  for (std::size_t o = 0; o < weights_.size(); ++o) {
    const double ph = std::fmod(phases[o], kTwoPi);
    re.add(weights_[o] * std::cos(ph));
    im.add(weights_[o] * std::sin(ph));
  }
  TraceResult r;
  r.raw = {re.value(), im.value()};
  r.A_n = A_n_;
  r.normalized = A_n_ * r.raw;
  r.n = n_;
  r.xi = xi;
  return r;
}

TraceResult flat_trace(const OrbitTable& table, const PointFunction& tau0,
                       std::span<const double> field_values, double xi, Summation mode) {
  if (field_values.size() != table.total_points()) {
    std::ostringstream msg;
    msg << "field values cover " << field_values.size() << " points, table has "
        << table.total_points();
    throw Error(ErrorCode::IndexMismatch, msg.str());
  }
  std::vector<double> tau(field_values.size());
  const auto points = table.points();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    tau[i] = (tau0 ? tau0(points[i].x.value()) : 0.0) + field_values[i];
  }
  return TracePlan(table, mode).trace(tau, xi);
}

std::complex<double> flat_trace_pointwise(const OrbitTable& table, const ExpandingMap& map,
                                          const PointFunction& tau, double xi) {
  CompensatedSum re, im;
  for (const auto& p : table.points()) {
    const double phase = std::fmod(xi * birkhoff_sum(map, tau, p.x, table.n()), kTwoPi);
    const double w = inverse_expm1(map.lift_iterate(p.x.value(), table.n()).log_derivative);
    re.add(w * std::cos(phase));
    im.add(w * std::sin(phase));
  }
  return {re.value(), im.value()};
}

double ehrenfest_bound(double xi, int l, double M, int k, double epsilon, double c) {
  if (!(xi > 1.0) || !(c > 0.0 && c < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ehrenfest_bound needs xi > 1 and c in (0,1)");
  }
  return c * std::log(xi) / (std::log(static_cast<double>(l)) + (k + 0.5 + epsilon / 2.0) * std::log(M));
}

}  // namespace ftlab
