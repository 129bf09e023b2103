#include "ftlab/periodic_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"

namespace ftlab {

OrbitTable::OrbitTable(int n, int degree, std::vector<PeriodicPoint> points,
                       std::vector<Orbit> orbits)
    : n_(n), degree_(degree), points_(std::move(points)), orbits_(std::move(orbits)) {
  orbit_of_point_.assign(points_.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t o = 0; o < orbits_.size(); ++o) {
    for (auto i : orbits_[o].members) orbit_of_point_.at(i) = o;
  }
}

std::span<const Orbit> OrbitTable::orbits_with_period(int m) const {
  auto lo = std::lower_bound(orbits_.begin(), orbits_.end(), m,
                             [](const Orbit& o, int v) { return o.prime_period < v; });
  auto hi = std::upper_bound(lo, orbits_.end(), m,
                             [](int v, const Orbit& o) { return v < o.prime_period; });
  return {lo, hi};
}

std::vector<int> OrbitTable::prime_periods() const {
  std::vector<int> out;
  for (const auto& o : orbits_) {
    if (out.empty() || out.back() != o.prime_period) out.push_back(o.prime_period);
  }
  return out;
}

std::int64_t fixed_point_count(int degree, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "period n must be >= 1");
  const double count = std::pow(static_cast<double>(degree), n) - 1.0;
  if (count > kMaxPeriodicPoints) {
    std::ostringstream msg;
    msg << "l^n - 1 = " << count << " periodic points exceeds the 1e8 limit";
    throw Error(ErrorCode::ResourceLimit, msg.str());
  }
  std::int64_t p = 1;
  for (int i = 0; i < n; ++i) p *= degree;
  return p - 1;
}

namespace {

struct RootOutcome {
  double x = 0.0;
  double residual = 0.0;
  double slope = 0.0;
  bool converged = false;
};

// Root of g(x) = lift^n(x) - x - k on [0, 1). g(0) <= 0 < g(1) is assumed.
RootOutcome solve_winding(const ExpandingMap& map, int n, std::int64_t k,
                          double start, double g_at_zero) {
  RootOutcome out;
  auto g = [&](double x, double* slope) {
    const LiftIterate it = map.lift_iterate(x, n);
    if (slope) *slope = std::expm1(it.log_derivative);
    return static_cast<double>(it.winding - k) + (it.frac - x);
  };

  if (g_at_zero == 0.0) {
    out.x = 0.0;
    g(0.0, &out.slope);
    out.converged = true;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(start, 0.0, std::nextafter(1.0, 0.0));
  int newton_steps = 0;
  int bisection_steps = 0;
  double best_x = x;
  double best_g = std::numeric_limits<double>::infinity();
  double best_slope = 0.0;

  while (newton_steps + bisection_steps < kNewtonIterationCap + kBisectionIterationCap) {
    double slope = 0.0;
    const double gx = g(x, &slope);
    if (std::fabs(gx) < std::fabs(best_g)) {
      best_g = gx;
      best_x = x;
      best_slope = slope;
    }
    if (gx == 0.0) break;
    if (gx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (!(hi > lo) || std::nextafter(lo, 1.0) >= hi) break;

    double next = x - gx / slope;
    const bool newton_ok = newton_steps < kNewtonIterationCap && slope > 0.0 &&
                           next > lo && next < hi;
    if (newton_ok) {
      ++newton_steps;
      if (std::fabs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(x, 1e-300)) {
        x = next;
        double s = 0.0;
        const double gn = g(x, &s);
        if (std::fabs(gn) < std::fabs(best_g)) {
          best_g = gn;
          best_x = x;
          best_slope = s;
        }
        break;
      }
    } else {
      if (bisection_steps >= kBisectionIterationCap) break;
      ++bisection_steps;
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  out.x = best_x;
  out.residual = std::fabs(best_g);
  out.slope = best_slope;
  out.converged = out.residual <= kRootResidualTol;
  return out;
}

}  // namespace

std::vector<PeriodicPoint> find_fixed_points(const ExpandingMap& map, int n,
                                             Parallelism par) {
  const std::int64_t count = fixed_point_count(map.degree(), n);
  const LiftIterate at_zero = map.lift_iterate(0.0, n);
  // lift^n(0) = a; winding k has a root in [0,1) iff a - k <= 0 < a + l^n - 1 - k.
  const std::int64_t k_first =
      at_zero.frac == 0.0 ? at_zero.winding : at_zero.winding + 1;
  const double a_frac = at_zero.frac;
  const double count_d = static_cast<double>(count);
  const double min_slope = std::pow(map.min_derivative(), n) - 1.0;

  std::vector<PeriodicPoint> points(static_cast<std::size_t>(count));
  std::vector<int> failures(points.size(), 0);

  parallel_for(points.size(), par, [&](std::size_t i) {
    const std::int64_t k = k_first + static_cast<std::int64_t>(i);
    const double g0 = static_cast<double>(at_zero.winding - k) + a_frac;
    const double g1 = g0 + count_d;
    if (!(g0 <= 0.0 && g1 > 0.0)) {
      failures[i] = 1;
      return;
    }
    // Exact for the linear map; the conjugacy makes it a good start otherwise.
    const double start = -g0 / count_d;
    const RootOutcome root = solve_winding(map, n, k, start, g0);
    if (!root.converged) {
      failures[i] = 2;
      return;
    }
    if (root.slope < min_slope * (1.0 - 1e-9)) {
      failures[i] = 1;
      return;
    }
    points[i] = PeriodicPoint{CirclePoint(root.x), k, root.residual};
  });

  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i] == 1) {
      std::ostringstream msg;
      msg << map.name() << ", n=" << n << ": winding " << k_first + static_cast<std::int64_t>(i)
          << " does not give exactly one monotone sign change";
      throw Error(ErrorCode::CountMismatch, msg.str());
    }
    if (failures[i] == 2) {
      std::ostringstream msg;
      msg << map.name() << ", n=" << n << ": root for winding "
          << k_first + static_cast<std::int64_t>(i) << " did not reach residual "
          << kRootResidualTol;
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
  }

  // Roots are increasing in k; anything else means two windings collapsed.
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].x.value() > points[i - 1].x.value())) {
      std::ostringstream msg;
      msg << map.name() << ", n=" << n << ": roots for windings " << points[i - 1].winding
          << " and " << points[i].winding << " are not strictly ordered";
      throw Error(ErrorCode::CountMismatch, msg.str());
    }
  }
  return points;
}

double min_separation(std::span<const PeriodicPoint> points) {
  if (points.size() < 2) return 1.0;
  std::vector<double> xs(points.size());
  std::transform(points.begin(), points.end(), xs.begin(),
                 [](const PeriodicPoint& p) { return p.x.value(); });
  std::sort(xs.begin(), xs.end());
  double best = 1.0 - xs.back() + xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) best = std::min(best, xs[i] - xs[i - 1]);
  return best;
}

OrbitTable group_into_orbits(std::vector<PeriodicPoint> points,
                             const ExpandingMap& map, int n) {
  const std::int64_t expected = fixed_point_count(map.degree(), n);
  if (static_cast<std::int64_t>(points.size()) != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " periodic points, got " << points.size();
    throw Error(ErrorCode::CountMismatch, msg.str());
  }
  std::sort(points.begin(), points.end(), [](const PeriodicPoint& a, const PeriodicPoint& b) {
    return a.x.value() < b.x.value();
  });

  const std::size_t size = points.size();
  const double snap_radius = 0.5 / (std::pow(map.max_derivative(), n) - 1.0);

  std::vector<double> xs(size);
  for (std::size_t i = 0; i < size; ++i) xs[i] = points[i].x.value();

  std::vector<std::size_t> image(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double y = map.eval_mod1(points[i].x).value();
    const auto it = std::lower_bound(xs.begin(), xs.end(), y);
    const std::size_t above = it == xs.end() ? 0 : static_cast<std::size_t>(it - xs.begin());
    const std::size_t below = (above + size - 1) % size;
    const double d_above = circle_distance(y, xs[above]);
    const double d_below = circle_distance(y, xs[below]);
    const std::size_t nearest = d_above <= d_below ? above : below;
    const double d = std::min(d_above, d_below);
    if (!(d < snap_radius)) {
      std::ostringstream msg;
      msg << map.name() << ", n=" << n << ": image of x=" << xs[i] << " is " << d
          << " from the nearest periodic point (snap radius " << snap_radius << ")";
      throw Error(ErrorCode::SnapAmbiguity, msg.str());
    }
    image[i] = nearest;
  }

  std::vector<char> hit(size, 0);
  for (auto j : image) {
    if (hit[j]) {
      throw Error(ErrorCode::SnapAmbiguity,
                  map.name() + ": two periodic points snapped to the same image");
    }
    hit[j] = 1;
  }

  std::vector<Orbit> orbits;
  std::vector<char> seen(size, 0);
  for (std::size_t start = 0; start < size; ++start) {
    if (seen[start]) continue;
    Orbit orbit;
    orbit.n = n;
    std::size_t j = start;
    while (!seen[j]) {
      seen[j] = 1;
      orbit.members.push_back(j);
      j = image[j];
    }
    orbit.prime_period = static_cast<int>(orbit.members.size());
    if (j != start || n % orbit.prime_period != 0) {
      std::ostringstream msg;
      msg << map.name() << ", n=" << n << ": cycle of length " << orbit.prime_period
          << " does not close consistently";
      throw Error(ErrorCode::SnapAmbiguity, msg.str());
    }
    double J = 0.0;
    for (auto idx : orbit.members) J += map.log_derivative(points[idx].x);
    orbit.log_multiplier_prime = J;
    orbits.push_back(std::move(orbit));
  }
  // Cycles are discovered from their smallest member, so a stable sort by
  // period keeps them ordered by smallest x within each period.
  std::stable_sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
    return a.prime_period < b.prime_period;
  });
  return OrbitTable(n, map.degree(), std::move(points), std::move(orbits));
}

OrbitTable build_orbit_table(const ExpandingMap& map, int n, Parallelism par) {
  return group_into_orbits(find_fixed_points(map, n, par), map, n);
}

double orbit_log_multiplier(const Orbit& orbit, const OrbitTable& table,
                            const ExpandingMap& map) {
  double J = 0.0;
  for (auto idx : orbit.members) J += map.log_derivative(table.points()[idx].x);
  return static_cast<double>(table.n() / orbit.prime_period) * J;
}

void write_orbit_csv(std::ostream& out, const OrbitTable& table) {
  CsvWriter csv(out, {"x", "winding", "prime_period", "orbit_id", "J_n_of_orbit"});
  const auto points = table.points();
  const auto orbits = table.orbits();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t o = table.orbit_of_point(i);
    csv.row(points[i].x.value(), points[i].winding, orbits[o].prime_period, o,
            orbits[o].log_multiplier());
  }
}

}  // namespace ftlab
