#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ftlab/error.hpp"
#include "ftlab/flat_trace.hpp"
#include "ftlab/periodic_orbits.hpp"
#include "ftlab/pressure.hpp"
#include "ftlab/resonances.hpp"

using namespace ftlab;
using cplx = std::complex<double>;

namespace {

const double kTwoPi = 2 * std::numbers::pi;

PointFunction zero_tau() {
  return [](double) { return 0.0; };
}
PointFunction sin_tau() {
  return [](double x) { return std::sin(kTwoPi * x); };
}

}  // namespace

TEST_CASE("doubling map at xi = 0 is pure composition") {
  const auto op = assemble_galerkin(make_linear_map(2), sin_tau(), 0.0, 16);
  CHECK(op.Q >= 8 * 16);
  double worst = 0.0;
  for (int p = -16; p <= 16; ++p) {
    for (int q = -16; q <= 16; ++q) {
      const cplx expected = p == 2 * q ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(op.matrix(p + 16, q + 16) - expected));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("quadrature matches a direct sum") {
  const auto map = make_reference_map();
  const auto tau = sin_tau();
  const double xi = 3.0;
  const int N = 6;
  const auto op = assemble_galerkin(map, tau, xi, N, 256);
  const int Q = 4096;
  for (int p : {-4, 0, 3}) {
    for (int q : {-2, 0, 5}) {
      cplx s = 0.0;
      for (int j = 0; j < Q; ++j) {
        const double x = static_cast<double>(j) / Q;
        s += std::exp(cplx(0.0, -kTwoPi * p * x + xi * tau(x) + kTwoPi * q * map.lift(x)));
      }
      CHECK(std::abs(op.matrix(p + N, q + N) - s / static_cast<double>(Q)) <= 1e-10);
    }
  }
}

TEST_CASE("tau = 0 gives an xi-independent operator") {
  const auto map = make_reference_map();
  const auto a = assemble_galerkin(map, zero_tau(), 0.0, 12);
  const auto b = assemble_galerkin(map, zero_tau(), 10.0, 12);
  CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("assembly is independent of the thread count") {
  const auto map = make_reference_map();
  const auto a = assemble_galerkin(map, sin_tau(), 3.0, 20, 0, {1});
  const auto b = assemble_galerkin(map, sin_tau(), 3.0, 20, 0, {3});
  CHECK(a.matrix == b.matrix);
}

TEST_CASE("assembly guards") {
  const auto map = make_reference_map();
  CHECK_THROWS_AS(assemble_galerkin(map, sin_tau(), 101.0, 8), Error);
  CHECK_THROWS_AS(assemble_galerkin(map, sin_tau(), 1.0, 8, 32), Error);
  // e^{i xi tau} with xi = 90 needs far more than 64 nodes.
  try {
    assemble_galerkin(map, sin_tau(), 90.0, 8, 64);
    FAIL("expected QuadratureNotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureNotConverged);
  }
}

TEST_CASE("leading eigenvalue at xi = 0 is 1") {
  const auto map = make_reference_map();
  const auto set = compute_resonances(map, sin_tau(), 0.0, 32);
  REQUIRE_FALSE(set.eigenvalues.empty());
  CHECK(std::abs(set.eigenvalues.front() - 1.0) <= 1e-10);
  CHECK(set.max_shift <= kStabilityTol);
  CHECK(set.r > set.resolution_floor);
  for (auto l : set.eigenvalues) CHECK(std::abs(l) > set.r);

  const auto above = compute_resonances(map, sin_tau(), 0.0, 32, 1.5);
  CHECK(above.eigenvalues.empty());
  CHECK(above.r == 1.5);
}

TEST_CASE("doubling resonances and residual") {
  const auto map = make_linear_map(2);
  const auto set = compute_resonances(map, zero_tau(), 0.0, 16);
  REQUIRE(set.eigenvalues.size() == 1);
  CHECK(std::abs(set.eigenvalues.front() - 1.0) <= 1e-12);
  const auto rows = trace_residual(map, zero_tau(), 0.0, set.eigenvalues, 1, 10);
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows) {
    CHECK(std::abs(row.trace - 1.0) <= 1e-12);
    CHECK(row.residual <= 1e-12);
  }
}

TEST_CASE("residual decays on the reference map") {
  const auto map = make_reference_map();
  const auto set = compute_resonances(map, sin_tau(), 0.0, 32, 0.8);
  const auto rows = trace_residual(map, sin_tau(), 0.0, set.eigenvalues, 2, 10);
  const auto fit = fit_residual(rows, 0.8);
  CHECK(fit.max_ratio <= 10.0);
  CHECK(fit.slope <= std::log(0.8) + 0.05);
}

TEST_CASE("trace residual uses the flat trace") {
  const auto map = make_reference_map();
  const std::vector<cplx> none;
  const auto rows = trace_residual(map, sin_tau(), 3.0, none, 3, 3);
  const auto table = build_orbit_table(map, 3);
  std::vector<double> tau;
  for (const auto& p : table.points()) tau.push_back(std::sin(kTwoPi * p.x.value()));
  const auto direct = TracePlan(table).trace(tau, 3.0);
  CHECK(std::abs(rows.front().trace - direct.raw) <= 1e-13);
  CHECK(rows.front().residual == doctest::Approx(std::abs(direct.raw)));
}

TEST_CASE("stable matching and radius selection") {
  const std::vector<cplx> coarse = {1.0, 0.5, cplx(0.0, 0.3), 0.1};
  const std::vector<cplx> fine = {1.0 + 1e-9, 0.5, cplx(0.0, 0.3 + 5e-7), 0.2, 0.0};
  double shift = 0.0;
  const auto stable = stable_eigenvalues(coarse, fine, 1e-6, &shift);
  REQUIRE(stable.size() == 3);
  CHECK(shift == doctest::Approx(5e-7).epsilon(1e-6));
  // Moduli 1, 0.5, 0.3: the widest ratio gap is between 1 and 0.5.
  CHECK(select_radius(stable) == doctest::Approx(std::sqrt(0.5)));
  const std::vector<cplx> single = {0.8, 1e-12};
  CHECK(select_radius(single) == doctest::Approx(0.4));
  // Eigenvalues below the floor are ignored and the floor closes the last gap.
  const std::vector<cplx> noisy = {1.0, 0.6, 1e-6};
  CHECK(select_radius(noisy, 0.05) == doctest::Approx(std::sqrt(0.6 * 0.05)));
  CHECK(select_radius(noisy, 0.55) == doctest::Approx(std::sqrt(0.6)));
  CHECK_THROWS_AS(select_radius(noisy, 2.0), Error);
}

TEST_CASE("unstable spectrum") {
  GalerkinOperator a, b;
  a.N = 0;
  b.N = 0;
  a.matrix = Eigen::MatrixXcd::Constant(1, 1, 0.5);
  b.matrix = Eigen::MatrixXcd::Constant(1, 1, 0.6);
  try {
    resonances_outside(a, b);
    FAIL("expected UnstableSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnstableSpectrum);
  }
}

TEST_CASE("selected radius exceeds the essential radius bound for a large Sobolev index") {
  const auto map = make_reference_map();
  const auto set = compute_resonances(map, sin_tau(), 0.0, 32);
  const auto table = build_orbit_table(map, 10);
  CHECK(essential_radius_bound(table, map, 40.0) < set.r);
}

TEST_CASE("CSV output") {
  const std::vector<cplx> l = {cplx(0.0, -2.0)};
  std::ostringstream a;
  write_resonance_csv(a, l);
  CHECK(a.str() == "re_lambda,im_lambda,abs_lambda\n0,-2,2\n");
  const std::vector<ResidualRow> rows = {{2, cplx(1.0, 0.5), cplx(1.0, 0.0), 0.5}};
  std::ostringstream b;
  write_residual_csv(b, rows);
  CHECK(b.str() == "n,trace_re,trace_im,resonance_sum_re,resonance_sum_im,residual\n2,1,0.5,1,0,0.5\n");
}
