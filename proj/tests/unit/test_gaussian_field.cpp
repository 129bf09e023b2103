#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ftlab/bump_kernel.hpp"
#include "ftlab/error.hpp"
#include "ftlab/gaussian_field.hpp"

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

TEST_CASE("power law values and truncation") {
  const auto s = build_power_law(1.0, 1, 0.1, 0.0);
  CHECK(s.variances[1] == 1.0);
  CHECK(s.variances[2] == doctest::Approx(std::pow(2.0, -4.1)).epsilon(1e-15));
  // Tail computed by brute force out to 10^6 terms plus the integral remainder.
  double head = 0.0, tail = 0.0;
  for (std::size_t p = 1; p <= s.truncation(); ++p) head += std::pow(p, -4.1);
  for (std::size_t p = s.truncation() + 1; p <= 1000000; ++p) tail += std::pow(p, -4.1);
  tail += std::pow(1e6, -3.1) / 3.1;
  CHECK(tail <= 1e-6 * head);
  // One mode fewer would violate the bound.
  CHECK(tail + std::pow(s.truncation(), -4.1) > 1e-6 * (head - std::pow(s.truncation(), -4.1)));
  CHECK(code_of([] { build_power_law(1.0, 1, 0.1, 0.0, 5); }) == ErrorCode::TailTooHeavy);
  CHECK(code_of([] { build_power_law(-1.0, 1, 0.1, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("default spectrum has K(0) = 1") {
  const auto s = build_default_spectrum();
  CHECK(s.kind == SpectrumKind::power_law);
  CHECK(s.variances[0] == 0.0);
  CHECK(s.kernel_at_zero() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.truncation() > 40);
  CHECK(s.truncation() < 80);
  CHECK(s.describe().find("power_law") == 0);
}

TEST_CASE("custom spectrum rejects negative variances") {
  CHECK(code_of([] { build_custom_spectrum({1.0, -0.5}); }) == ErrorCode::NegativeSpectrum);
  CHECK(build_custom_spectrum({0.5, 0.25}).kernel_at_zero() == doctest::Approx(1.0));
}

TEST_CASE("K_init") {
  const BumpKernel& K = default_bump_kernel();
  CHECK(std::fabs(K.value(0.0) - 1.0) <= 1e-10);
  CHECK(K.value(0.4) == 0.0);
  CHECK(K.value(-0.2) == doctest::Approx(K.value(0.2)).epsilon(1e-14));
  // int K_init by an independent midpoint rule on a fine grid.
  const int nodes = 20000;
  double integral = 0.0;
  for (int i = 0; i < nodes; ++i) integral += K.value(-1.0 / 3 + (i + 0.5) * (2.0 / 3) / nodes);
  integral *= (2.0 / 3) / nodes;
  CHECK(K.fourier(0.0) == doctest::Approx(integral).epsilon(1e-8));
  CHECK(K.fourier(0.0) > 0.0);
  for (int f = 0; f < 400; ++f) CHECK(K.fourier(0.7 * f) >= -1e-12);
  // Progression recurrence against direct evaluation.
  const auto prog = K.fourier_progression(1.0, 0.37, 2000);
  for (std::size_t i : {0u, 1u, 255u, 256u, 1999u}) {
    CHECK(prog[i] == doctest::Approx(K.fourier(1.0 + 0.37 * i)).epsilon(1e-9).scale(K.fourier(0.0)));
  }
  // Inverse transform at 0 recovers K_init(0) = 1.
  double inv = 0.0;
  const double dw = 0.05;
  for (int i = 0; i < 40000; ++i) inv += K.fourier(i * dw) * (i == 0 ? 0.5 : 1.0);
  CHECK(inv * dw / kPi == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bump spectrum") {
  const double M = 2.9;
  for (int j : {1, 2, 3}) {
    const auto s = build_bump_spectrum(j, 1, 0.1, M);
    const double k0 = std::pow(M, -j * 3.1);
    CHECK(s.kernel_at_zero() == doctest::Approx(k0).epsilon(2e-6));
    for (double v : s.variances) CHECK(v >= 0.0);
    REQUIRE(s.support_radius());
    CHECK(*s.support_radius() == doctest::Approx(1.0 / (3 * std::pow(M, j))));
    const CovarianceKernel closed(s);
    CHECK(closed.at_zero() == doctest::Approx(k0).epsilon(1e-14));
    CHECK(closed(0.5 / std::pow(M, j)) == 0.0);
    // Cosine series of the same variances against the closed form.
    const CovarianceKernel series(build_custom_spectrum(s.variances));
    for (double x : {0.0, 0.01, 0.05, 0.09, 0.2, 0.5, 0.93}) {
      CHECK(std::fabs(series(x) - closed(x)) <= 1e-5 * k0);
    }
  }
}

TEST_CASE("composite spectrum uses the minimal constant") {
  const auto base = build_default_spectrum();
  const auto comp = build_composite_spectrum(base, 3, 2.9);
  CHECK(comp.C > 0.0);
  bool tight = false;
  for (std::size_t p = 1; p <= base.truncation(); ++p) {
    double bumps = 0.0;
    for (const auto& b : comp.bumps) bumps += b.variances[p];
    CHECK(comp.compensator.variances[p] >= 0.0);
    CHECK(comp.total.variances[p] == doctest::Approx(comp.C * base.variances[p]));
    CHECK(comp.compensator.variances[p] + bumps == doctest::Approx(comp.total.variances[p]).epsilon(1e-12));
    if (base.variances[p] > 0 && std::fabs(bumps - comp.total.variances[p]) <= 1e-12 * comp.total.variances[p]) {
      tight = true;
    }
  }
  CHECK(tight);
  double bumps0 = 0.0;
  for (const auto& b : comp.bumps) bumps0 += b.variances[0];
  CHECK(comp.total.variances[0] == doctest::Approx(bumps0));
}

TEST_CASE("covariance kernel properties") {
  const CovarianceKernel K(build_default_spectrum());
  CHECK(K(0.0) == doctest::Approx(1.0));
  for (double x : {0.1, 0.3, 0.45, 0.77}) {
    CHECK(K(x) == doctest::Approx(K(-x)).epsilon(1e-13));
    CHECK(K(x) == doctest::Approx(K(x + 1.0)).epsilon(1e-12));
    CHECK(std::fabs(K(x)) <= K(0.0));
    // Direct cosine sum.
    double direct = 0.0;
    const auto s = build_default_spectrum();
    for (std::size_t p = 1; p <= s.truncation(); ++p) direct += 2 * s.variances[p] * std::cos(2 * kPi * p * x);
    CHECK(K(x) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("sampling moments") {
  SUBCASE("zero spectrum gives the zero field") {
    const auto s = sample(build_zero_spectrum(), 1, 0);
    CHECK(s.c0 == 0.0);
    CHECK(s.c.empty());
    CHECK(evaluate(s, 0.3) == 0.0);
  }
  SUBCASE("variance and independence over 1e5 draws") {
    const auto spec = build_custom_spectrum({0.5, 2.0, 0.8});
    const int N = 100000;
    double v_re1 = 0, v_im1 = 0, v_re2 = 0, c12_re = 0, v0 = 0;
    for (int i = 0; i < N; ++i) {
      const auto s = sample(spec, 42, i);
      v0 += s.c0 * s.c0;
      v_re1 += s.c[0].real() * s.c[0].real();
      v_im1 += s.c[0].imag() * s.c[0].imag();
      v_re2 += s.c[1].real() * s.c[1].real();
      c12_re += (s.c[0] * s.c[1]).real();
    }
    auto within = [&](double sum, double expected_var) {
      // Var of x^2 for x ~ N(0, v) is 2 v^2.
      const double se = std::sqrt(2.0 / N) * expected_var;
      return std::fabs(sum / N - expected_var) <= 3 * se;
    };
    CHECK(within(v0, 0.5));
    CHECK(within(v_re1, 1.0));
    CHECK(within(v_im1, 1.0));
    CHECK(within(v_re2, 0.4));
    // E[c1 c2] = 0; Re(c1 c2) has variance (2.0 * 0.8) / 2.
    CHECK(std::fabs(c12_re / N) <= 3 * std::sqrt(0.8 / N));
  }
  SUBCASE("deterministic in seed and index") {
    const auto spec = build_default_spectrum();
    const auto a = sample(spec, 7, 3), b = sample(spec, 7, 3), c = sample(spec, 7, 4);
    CHECK(a.c == b.c);
    CHECK(a.c != c.c);
  }
}

TEST_CASE("evaluate") {
  FieldSample s;
  s.c = {1.0, 0.0};
  for (double x : {0.0, 0.13, 0.5, 0.91}) {
    CHECK(evaluate(s, x) == doctest::Approx(2 * std::cos(2 * kPi * x)).epsilon(1e-14));
    CHECK(evaluate(s, x) == doctest::Approx(evaluate(s, x + 1.0)).epsilon(1e-12));
  }
  const auto r = sample(build_default_spectrum(), 3, 0);
  double direct = r.c0;
  const double x = 0.3141;
  for (std::size_t p = 1; p <= r.c.size(); ++p) {
    direct += 2 * (r.c[p - 1] * std::polar(1.0, 2 * kPi * p * x)).real();
  }
  CHECK(evaluate(r, x) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("regularity diagnostic") {
  const auto smooth = regularity_diagnostic(build_power_law(1.0, 1, 0.1, 0.0), 200, 5);
  CHECK(smooth.ck_sum_converges);
  CHECK(smooth.fitted_exponent == doctest::Approx(-1.05).epsilon(1e-9));
  CHECK(smooth.max_normalized_coefficient < 10.0);
  CHECK(smooth.partial_sum_full > smooth.partial_sum_half);

  const auto zero = regularity_diagnostic(build_zero_spectrum(), 10, 5);
  CHECK(zero.ck_sum_converges);

  std::vector<double> rough(2001);
  for (std::size_t p = 1; p < rough.size(); ++p) rough[p] = 1.0 / p;
  const auto r = regularity_diagnostic(build_custom_spectrum(rough), 50, 5);
  CHECK_FALSE(r.ck_sum_converges);
  CHECK(r.fitted_exponent == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.partial_sum_full > 2.0 * r.partial_sum_half);
}

TEST_CASE("field sample CSV") {
  FieldSample s;
  s.c0 = 0.5;
  s.c = {{1.0, -2.0}};
  std::ostringstream out;
  write_field_sample_csv(out, s);
  CHECK(out.str() == "p,re_c,im_c\n0,0.5,0\n1,1,-2\n");
}
