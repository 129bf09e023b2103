#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ftlab/circle_map.hpp"
#include "ftlab/parallel.hpp"

namespace ftlab {

/// Solution of lift^n(x) = x + winding.
struct PeriodicPoint {
  CirclePoint x;
  std::int64_t winding = 0;
  double residual = 0.0;
};

/// A prime periodic orbit inside Per(n).
struct Orbit {
  /// Indices into OrbitTable::points, in dynamical order x, E(x), ...,
  /// starting from the smallest x.
  std::vector<std::size_t> members;
  int prime_period = 0;
  /// Birkhoff sum of J over one prime period.
  double log_multiplier_prime = 0.0;
  /// Ambient period n (prime_period divides n).
  int n = 0;

  /// J^n_O = (n/m) J_m.
  double log_multiplier() const {
    return static_cast<double>(n / prime_period) * log_multiplier_prime;
  }
};

/// All fixed points of E^n grouped into prime orbits.
class OrbitTable {
 public:
  OrbitTable(int n, int degree, std::vector<PeriodicPoint> points,
             std::vector<Orbit> orbits);

  int n() const { return n_; }
  int degree() const { return degree_; }
  std::size_t total_points() const { return points_.size(); }

  /// Sorted by x.
  std::span<const PeriodicPoint> points() const { return points_; }
  /// Sorted by (prime period, smallest member x).
  std::span<const Orbit> orbits() const { return orbits_; }
  /// Orbits of one prime period m (empty when m does not divide n).
  std::span<const Orbit> orbits_with_period(int m) const;
  /// Index into orbits() of the orbit containing point i.
  std::size_t orbit_of_point(std::size_t i) const { return orbit_of_point_[i]; }
  std::vector<int> prime_periods() const;

 private:
  int n_;
  int degree_;
  std::vector<PeriodicPoint> points_;
  std::vector<Orbit> orbits_;
  std::vector<std::size_t> orbit_of_point_;
};

inline constexpr double kRootResidualTol = 1e-10;
inline constexpr int kNewtonIterationCap = 60;
inline constexpr int kBisectionIterationCap = 200;
inline constexpr double kMaxPeriodicPoints = 1e8;

/// Number of fixed points l^n - 1; throws ResourceLimit above 1e8.
std::int64_t fixed_point_count(int degree, int n);

/// All l^n - 1 fixed points of E^n, sorted by x. For each winding k the
/// function lift^n(x) - x - k is strictly increasing on [0,1], so its root is
/// bracketed and found by safeguarded Newton with bisection fallback.
std::vector<PeriodicPoint> find_fixed_points(const ExpandingMap& map, int n,
                                             Parallelism par = {});

/// Chains each point to the enumerated point nearest to its image and
/// splits the resulting permutation into cycles. Throws SnapAmbiguity if an
/// image is farther than 1/(2(M^n - 1)) from every enumerated point.
OrbitTable group_into_orbits(std::vector<PeriodicPoint> points,
                             const ExpandingMap& map, int n);

OrbitTable build_orbit_table(const ExpandingMap& map, int n, Parallelism par = {});

/// J^n_O = (n/m) sum_{p in O} J(p), recomputed from the map.
double orbit_log_multiplier(const Orbit& orbit, const OrbitTable& table,
                            const ExpandingMap& map);

/// Smallest circle distance between two distinct points.
double min_separation(std::span<const PeriodicPoint> points);

/// CSV: x, winding, prime_period, orbit_id, J_n_of_orbit.
void write_orbit_csv(std::ostream& out, const OrbitTable& table);

}  // namespace ftlab
