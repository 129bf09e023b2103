#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ftlab/circle_map.hpp"
#include "ftlab/periodic_orbits.hpp"

namespace ftlab {

struct TraceResult {
  std::complex<double> raw;
  double A_n = 0.0;
  /// A_n * raw.
  std::complex<double> normalized;
  int n = 0;
  double xi = 0.0;
};

/// 1/(e^J - 1) in a form that stays accurate for small and large J.
double inverse_expm1(double J);

/// (sum_{m|n} m^2 sum_{O in P_m} (e^{J^n_O} - 1)^{-2})^{-1/2}.
double compute_An(const OrbitTable& table);
/// Same quantity summed point by point with (E^n)'(x) from the map and the
/// prime period of each point taken from the table.
double compute_An_pointwise(const OrbitTable& table, const ExpandingMap& map);

/// Precomputed per-orbit data for repeated traces over one OrbitTable.
class TracePlan {
 public:
  TracePlan(const OrbitTable& table, Summation mode = Summation::plain);

  int n() const { return n_; }
  double A_n() const { return A_n_; }
  std::size_t point_count() const { return point_count_; }
  std::size_t orbit_count() const { return weights_.size(); }
  /// m / (e^{J^n_O} - 1) per orbit.
  std::span<const double> weights() const { return weights_; }
  /// sum over orbits of the weights (the trace at xi = 0).
  double weight_sum() const { return weight_sum_; }

  /// tau^n_O = (n/m) sum_{p in O} tau(p) for each orbit, from values
  /// indexed like table.points(). Throws IndexMismatch on a size mismatch.
  std::vector<double> orbit_sums(std::span<const double> tau_at_points) const;

  /// Trace from values of the full roof function tau0 + delta tau at the
  /// table points.
  TraceResult trace(std::span<const double> tau_at_points, double xi) const;
  /// Trace from per-orbit phases xi tau^n_O (already reduced or not).
  TraceResult trace_from_orbit_phases(std::span<const double> phases, double xi) const;

 private:
  int n_;
  double A_n_;
  std::size_t point_count_;
  Summation mode_;
  std::vector<std::size_t> member_offsets_;
  std::vector<std::size_t> members_;
  std::vector<double> multiplicity_;  // n / m
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
};

/// Tr^flat L^n_{xi,tau} with tau = tau0 + field, field given at the table
/// points; orbit-grouped form.
TraceResult flat_trace(const OrbitTable& table, const PointFunction& tau0,
                       std::span<const double> field_values, double xi,
                       Summation mode = Summation::plain);

/// Point-by-point form sum_x e^{i xi tau^n_x} / ((E^n)'(x) - 1), with the
/// Birkhoff sums computed by forward iteration of the map.
std::complex<double> flat_trace_pointwise(const OrbitTable& table, const ExpandingMap& map,
                                          const PointFunction& tau, double xi);

/// c log xi / (log l + (k + 1/2 + eps/2) log M).
double ehrenfest_bound(double xi, int l, double M, int k, double epsilon, double c);

}  // namespace ftlab
