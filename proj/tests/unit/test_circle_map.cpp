#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ftlab/circle_map.hpp"
#include "ftlab/error.hpp"

using namespace ftlab;

namespace {

const double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ftlab::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("circle points are reduced into [0,1)") {
  CHECK(CirclePoint(1.25).value() == doctest::Approx(0.25));
  CHECK(CirclePoint(-0.25).value() == doctest::Approx(0.75));
  CHECK(CirclePoint(-1e-18).value() < 1.0);
  CHECK(circle_distance(0.05, 0.95) == doctest::Approx(0.1));
}

TEST_CASE("eval_mod1") {
  const auto doubling = make_linear_map(2);
  CHECK(doubling.eval_mod1(CirclePoint(0.3)).value() == doctest::Approx(0.6).epsilon(1e-15));

  const auto E = make_reference_map();
  const double expected = 0.9 / (2 * kPi) * std::sin(0.8 * kPi);
  CHECK(E.eval_mod1(CirclePoint(0.0)).value() == doctest::Approx(expected - std::floor(expected)).epsilon(1e-15));
  CHECK(doubling.eval_mod1(CirclePoint(0.0)).value() == 0.0);
}

TEST_CASE("log_derivative") {
  const auto doubling = make_linear_map(2);
  for (double x : {0.0, 0.2, 0.77}) CHECK(doubling.log_derivative(CirclePoint(x)) == doctest::Approx(std::log(2.0)));

  const auto E = make_reference_map();
  CHECK(E.log_derivative(CirclePoint(0.1)) == doctest::Approx(std::log(1.1)).epsilon(1e-14));
  CHECK(E.log_derivative(CirclePoint(0.6)) == doctest::Approx(std::log(2.9)).epsilon(1e-14));
  for (int i = 0; i < 1000; ++i) CHECK(E.log_derivative(CirclePoint(i / 1000.0)) > 0.0);
}

TEST_CASE("construction validates the map") {
  CHECK(code_of([] { make_sine_map(2, 1.2, 0.0); }) == ErrorCode::NonExpanding);
  CHECK(code_of([] {
          ExpandingMap("bad", [](double x) { return 2.5 * x; }, [](double) { return 2.5; }, 2, 2.5, 2.5);
        }) == ErrorCode::InvalidMap);
  CHECK(code_of([] {
          ExpandingMap("loose", [](double x) { return 2 * x; }, [](double) { return 2.0; }, 2, 1.5, 1.8);
        }) == ErrorCode::InvalidMap);
  CHECK(code_of([] { make_linear_map(1); }) == ErrorCode::InvalidMap);
  CHECK(code_of([] { make_catalog_map("tent", {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("reference map constants and lift normalisation") {
  const auto E = make_reference_map();
  CHECK(E.degree() == 2);
  CHECK(E.min_derivative() == doctest::Approx(1.1));
  CHECK(E.max_derivative() == doctest::Approx(2.9));
  CHECK(E.lift(0.0) >= 0.0);
  CHECK(E.lift(0.0) < 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = i / 100.0 - 0.3;
    CHECK(E.lift(x + 1) - E.lift(x) == doctest::Approx(2.0).epsilon(1e-13));
  }
  const double params[] = {3.0, 0.5, 0.1};
  const auto S = make_catalog_map("sine", params);
  CHECK(S.degree() == 3);
  CHECK(S.min_derivative() == doctest::Approx(2.5));
}

TEST_CASE("lift_iterate tracks the winding exactly") {
  const auto E = make_reference_map();
  for (double x : {0.0, 0.123, 0.5, 0.999}) {
    double y = x;
    double logd = 0.0;
    for (int j = 0; j < 6; ++j) {
      logd += std::log(E.derivative(y));
      y = E.lift(y);
    }
    const LiftIterate it = E.lift_iterate(x, 6);
    CHECK(static_cast<double>(it.winding) + it.frac == doctest::Approx(y).epsilon(1e-13));
    CHECK(it.log_derivative == doctest::Approx(logd).epsilon(1e-13));
    CHECK(it.frac >= 0.0);
    CHECK(it.frac < 1.0);
  }
}

TEST_CASE("birkhoff_sum") {
  const auto doubling = make_linear_map(2);
  const auto E = make_reference_map();
  CHECK(birkhoff_sum(E, [](double) { return 1.0; }, CirclePoint(0.3), 7) == 7.0);
  CHECK(birkhoff_sum(doubling, [](double x) { return x; }, CirclePoint(1.0 / 7), 3) ==
        doctest::Approx(1.0).epsilon(1e-15));
  auto J = [&](double x) { return doubling.log_derivative(CirclePoint(x)); };
  CHECK(birkhoff_sum(doubling, J, CirclePoint(0.41), 5) == doctest::Approx(5 * std::log(2.0)));
  CHECK_THROWS_AS(birkhoff_sum(E, J, CirclePoint(0.1), 0), Error);
}

TEST_CASE("birkhoff cocycle") {
  const auto E = make_reference_map();
  auto phi = [](double x) { return std::cos(2 * kPi * x) + 0.3 * x; };
  for (double x : {0.05, 0.4, 0.83}) {
    for (auto [a, b] : {std::pair{1, 4}, {3, 3}, {5, 2}}) {
      const CirclePoint p(x);
      CirclePoint q = p;
      for (int i = 0; i < a; ++i) q = E.eval_mod1(q);
      const double whole = birkhoff_sum(E, phi, p, a + b);
      const double split = birkhoff_sum(E, phi, p, a) + birkhoff_sum(E, phi, q, b);
      CHECK(std::fabs(whole - split) <= 1e-12);
      CHECK(birkhoff_sum(E, phi, p, a + b, Summation::compensated) == doctest::Approx(whole).epsilon(1e-13));
    }
  }
}
