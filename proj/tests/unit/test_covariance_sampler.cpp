#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ftlab/covariance_sampler.hpp"
#include "ftlab/error.hpp"
#include "ftlab/periodic_orbits.hpp"

using namespace ftlab;

namespace {

std::vector<double> coordinates(const OrbitTable& t) {
  std::vector<double> xs;
  for (const auto& p : t.points()) xs.push_back(p.x.value());
  return xs;
}

}  // namespace

TEST_CASE("single point is N(0, K(0))") {
  const auto spec = build_default_spectrum();
  const double x[] = {0.37};
  const CovarianceSampler s(spec, x);
  CHECK(s.rank() == 1);
  const int N = 20000;
  double sum = 0, sq = 0;
  for (int b = 0; b < N / 64; ++b) {
    const auto X = s.draw_batch(9, b);
    for (int c = 0; c < 64; ++c) {
      sum += X(0, c);
      sq += X(0, c) * X(0, c);
    }
  }
  const int n = (N / 64) * 64;
  CHECK(std::fabs(sum / n) <= 3 * std::sqrt(1.0 / n));
  CHECK(std::fabs(sq / n - 1.0) <= 3 * std::sqrt(2.0 / n));
}

TEST_CASE("factor reproduces the covariance matrix") {
  const auto spec = build_default_spectrum();
  const auto table = build_orbit_table(make_reference_map(), 9);
  const auto xs = coordinates(table);
  const CovarianceSampler s(spec, xs);
  // A P-mode field lives in a (2P+1)-dimensional space.
  CHECK(s.rank() <= 2 * spec.truncation() + 1);
  const CovarianceKernel K(spec);
  const Eigen::MatrixXd& L = s.factor();
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); i += 7) {
    for (std::size_t j = 0; j < xs.size(); j += 5) {
      const double lij = L.row(static_cast<Eigen::Index>(i)).dot(L.row(static_cast<Eigen::Index>(j)));
      worst = std::max(worst, std::fabs(lij - K(xs[i] - xs[j])));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("antipodal points under a bump kernel are independent") {
  const auto spec = build_bump_spectrum(2, 1, 0.1, 2.9);
  const double x[] = {0.1, 0.6};
  const CovarianceSampler s(spec, x);
  CHECK(s.rank() == 2);
  const Eigen::MatrixXd& L = s.factor();
  CHECK(L.row(0).dot(L.row(1)) == 0.0);
}

TEST_CASE("empirical covariance at five points") {
  const auto spec = build_default_spectrum();
  const std::vector<double> xs = {0.0, 0.05, 0.2, 0.5, 0.81};
  const CovarianceSampler s(spec, xs);
  const CovarianceKernel K(spec);
  const int batches = 157;  // 10048 draws
  const int n = batches * 64;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(5, 5);
  for (int b = 0; b < batches; ++b) {
    const auto X = s.draw_batch(11, b);
    acc += X * X.transpose();
  }
  acc /= n;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double kij = K(xs[i] - xs[j]);
      const double se = std::sqrt((K(0) * K(0) + kij * kij) / n);
      CHECK(std::fabs(acc(i, j) - kij) <= 3 * se);
    }
  }
}

TEST_CASE("draws are deterministic and batch-consistent") {
  const auto spec = build_default_spectrum();
  const std::vector<double> xs = {0.1, 0.2, 0.3};
  const CovarianceSampler s(spec, xs);
  const auto X = s.draw_batch(5, 2);
  const auto d = s.draw(5, 2 * 64 + 10);
  for (int i = 0; i < 3; ++i) CHECK(d[i] == X(i, 10));
  CHECK(sample_at_points(spec, xs, 5, 138) == d);
  CHECK(s.draw(6, 138) != d);
}

TEST_CASE("zero spectrum gives zero draws") {
  const std::vector<double> xs = {0.1, 0.2};
  const CovarianceSampler s(build_zero_spectrum(), xs);
  CHECK(s.rank() == 0);
  const auto d = s.draw(1, 0);
  CHECK(d == std::vector<double>{0.0, 0.0});
}

TEST_CASE("errors") {
  // Points 0 and 0.5 anticorrelated, each strongly correlated with 0.25:
  // the 3x3 matrix has a negative eigenvalue.
  const std::vector<double> pts = {0.0, 0.5, 0.25};
  const CovarianceKernel indefinite([](double x) {
    const double d = std::fabs(x - std::round(x));
    return d < 1e-12 ? 1.0 : (d > 0.3 ? -0.99 : 0.99);
  }, 1.0);
  try {
    CovarianceSampler s(indefinite, pts);
    FAIL("expected FactorizationFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FactorizationFailure);
  }
  std::vector<double> many(10001, 0.5);
  try {
    CovarianceSampler s(build_default_spectrum(), many);
    FAIL("expected ResourceLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceLimit);
  }
}

TEST_CASE("sampled covariance matrices are positive semidefinite") {
  const auto spec = build_default_spectrum();
  std::vector<double> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(std::fmod(i * 0.618034, 1.0));
  const CovarianceKernel K(spec);
  Eigen::MatrixXd S(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) S(i, j) = K(xs[i] - xs[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * K(0.0));
}
