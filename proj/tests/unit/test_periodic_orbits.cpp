#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ftlab/error.hpp"
#include "ftlab/periodic_orbits.hpp"

using namespace ftlab;

TEST_CASE("doubling map, n=3: points k/7") {
  const auto doubling = make_linear_map(2);
  const auto pts = find_fixed_points(doubling, 3);
  REQUIRE(pts.size() == 7);
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(std::fabs(pts[k].x.value() - k / 7.0) <= 1e-12);
    CHECK(pts[k].residual <= 1e-10);
  }
}

TEST_CASE("linear maps match k/(l^n - 1)") {
  for (int l : {2, 3}) {
    const auto map = make_linear_map(l);
    for (int n = 1; n <= (l == 2 ? 12 : 7); ++n) {
      const auto pts = find_fixed_points(map, n);
      const double denom = std::pow(l, n) - 1;
      REQUIRE(pts.size() == static_cast<std::size_t>(denom));
      double worst = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) worst = std::max(worst, std::fabs(pts[k].x.value() - k / denom));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("count, residual and separation laws for the catalog") {
  const double sine3[] = {3.0, 0.5, 0.1};
  const std::vector<ExpandingMap> maps = {make_reference_map(), make_sine_map(2, -0.5, 0.0),
                                          make_catalog_map("sine", sine3)};
  for (const auto& map : maps) {
    const int n_max = map.degree() == 2 ? 12 : 7;
    for (int n = 1; n <= n_max; ++n) {
      const auto pts = find_fixed_points(map, n);
      CHECK(pts.size() == static_cast<std::size_t>(std::pow(map.degree(), n) - 1));
      for (const auto& p : pts) CHECK(p.residual <= 1e-10);
      CHECK(min_separation(pts) >= (1 - 1e-6) / (std::pow(map.max_derivative(), n) - 1));
    }
  }
}

TEST_CASE("reference map, n=11 gives 2047 points") {
  const auto E = make_reference_map();
  const auto pts = find_fixed_points(E, 11);
  CHECK(pts.size() == 2047);
}

TEST_CASE("n=1 has a single fixed point for degree 2") {
  const auto E = make_reference_map();
  const auto table = build_orbit_table(E, 1);
  REQUIRE(table.total_points() == 1);
  REQUIRE(table.orbits().size() == 1);
  CHECK(table.orbits()[0].prime_period == 1);
  const double x0 = table.points()[0].x.value();
  CHECK(std::fabs(E.lift(x0) - x0 - std::round(E.lift(x0) - x0)) <= 1e-10);
  CHECK(orbit_log_multiplier(table.orbits()[0], table, E) == doctest::Approx(std::log(E.derivative(x0))));
}

TEST_CASE("grouping for the doubling map") {
  const auto doubling = make_linear_map(2);
  const auto t2 = build_orbit_table(doubling, 2);
  REQUIRE(t2.orbits().size() == 2);
  CHECK(t2.orbits_with_period(1).size() == 1);
  REQUIRE(t2.orbits_with_period(2).size() == 1);
  const auto& o2 = t2.orbits_with_period(2)[0];
  CHECK(t2.points()[o2.members[0]].x.value() == doctest::Approx(1.0 / 3));
  CHECK(t2.points()[o2.members[1]].x.value() == doctest::Approx(2.0 / 3));

  const auto t3 = build_orbit_table(doubling, 3);
  CHECK(t3.orbits_with_period(1).size() == 1);
  CHECK(t3.orbits_with_period(3).size() == 2);
  CHECK(t3.orbits_with_period(2).empty());
  for (const auto& o : t3.orbits()) {
    CHECK(orbit_log_multiplier(o, t3, doubling) == doctest::Approx(3 * std::log(2.0)));
    CHECK(o.log_multiplier() == doctest::Approx(3 * std::log(2.0)));
  }
}

TEST_CASE("orbit table invariants, reference map") {
  const auto E = make_reference_map();
  for (int n : {1, 4, 6, 9, 12}) {
    const auto table = build_orbit_table(E, n);
    std::size_t covered = 0;
    std::set<std::size_t> seen;
    for (const auto& o : table.orbits()) {
      CHECK(n % o.prime_period == 0);
      CHECK(o.members.size() == static_cast<std::size_t>(o.prime_period));
      covered += o.members.size();
      for (auto i : o.members) seen.insert(i);
      // Chaining: each member maps to the next within the snap radius.
      const double snap = 0.5 / (std::pow(E.max_derivative(), n) - 1);
      for (std::size_t k = 0; k < o.members.size(); ++k) {
        const auto from = table.points()[o.members[k]].x;
        const auto to = table.points()[o.members[(k + 1) % o.members.size()]].x;
        CHECK(circle_distance(E.eval_mod1(from).value(), to.value()) < snap);
      }
      CHECK(o.log_multiplier() == doctest::Approx(orbit_log_multiplier(o, table, E)).epsilon(1e-12));
      CHECK(o.log_multiplier() > 0.0);
    }
    CHECK(covered == table.total_points());
    CHECK(seen.size() == table.total_points());
  }
}

TEST_CASE("J^n_O does not depend on the starting point") {
  const auto E = make_reference_map();
  const auto table = build_orbit_table(E, 8);
  for (const auto& o : table.orbits()) {
    if (o.prime_period < 4) continue;
    const double a = birkhoff_sum(E, [&](double x) { return E.log_derivative(CirclePoint(x)); },
                                  table.points()[o.members[0]].x, o.prime_period);
    const double b = birkhoff_sum(E, [&](double x) { return E.log_derivative(CirclePoint(x)); },
                                  table.points()[o.members[2]].x, o.prime_period);
    CHECK(std::fabs(a - b) <= 1e-10);
  }
}

TEST_CASE("prime-period sanity against smaller periods") {
  const auto E = make_reference_map();
  const int n = 6;
  const auto table = build_orbit_table(E, n);
  const double snap = 0.5 / (std::pow(E.max_derivative(), n) - 1);
  for (int m : {1, 2, 3}) {
    const auto smaller = find_fixed_points(E, m);
    for (const auto& o : table.orbits()) {
      const double x = table.points()[o.members[0]].x.value();
      bool found = false;
      for (const auto& p : smaller) found = found || circle_distance(p.x.value(), x) < snap;
      CHECK(found == (m % o.prime_period == 0));
    }
  }
  std::size_t sum = 0;
  for (int m : table.prime_periods()) sum += m * table.orbits_with_period(m).size();
  CHECK(sum == 63);
}

TEST_CASE("resource guard and argument checks") {
  const auto doubling = make_linear_map(2);
  CHECK_THROWS_AS(find_fixed_points(doubling, 27), Error);
  try {
    find_fixed_points(doubling, 27);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceLimit);
  }
  CHECK(fixed_point_count(2, 26) == (1 << 26) - 1);
  CHECK_THROWS_AS(find_fixed_points(doubling, 0), Error);
}

TEST_CASE("incomplete point sets are rejected") {
  const auto E = make_reference_map();
  auto pts = find_fixed_points(E, 5);
  pts.pop_back();
  try {
    group_into_orbits(pts, E, 5);
    FAIL("expected CountMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CountMismatch);
  }
  auto shifted = find_fixed_points(E, 5);
  // Move one point halfway to its neighbour: its predecessor's image no
  // longer lands within the snap radius of any enumerated point.
  shifted[3].x = CirclePoint(0.5 * (shifted[3].x.value() + shifted[4].x.value()));
  try {
    group_into_orbits(shifted, E, 5);
    FAIL("expected SnapAmbiguity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SnapAmbiguity);
  }
}

TEST_CASE("enumeration is bitwise identical across thread counts") {
  const auto E = make_reference_map();
  const auto a = find_fixed_points(E, 10, Parallelism{1});
  const auto b = find_fixed_points(E, 10, Parallelism{4});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x.value() == b[i].x.value());
    CHECK(a[i].winding == b[i].winding);
  }
}

TEST_CASE("orbit CSV") {
  const auto table = build_orbit_table(make_linear_map(2), 3);
  std::ostringstream out;
  write_orbit_csv(out, table);
  const std::string s = out.str();
  CHECK(s.rfind("x,winding,prime_period,orbit_id,J_n_of_orbit\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 8);
  CHECK(s.find('\r') == std::string::npos);
}
