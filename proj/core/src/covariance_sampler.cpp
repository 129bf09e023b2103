#include "ftlab/covariance_sampler.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ftlab/error.hpp"
#include "ftlab/rng.hpp"

namespace ftlab {

CovarianceSampler::CovarianceSampler(const SpectrumSpec& spec, std::span<const double> points) {
  factorize(CovarianceKernel(spec), points);
}

CovarianceSampler::CovarianceSampler(const CovarianceKernel& kernel,
                                     std::span<const double> points) {
  factorize(kernel, points);
}

void CovarianceSampler::factorize(const CovarianceKernel& kernel,
                                  std::span<const double> points) {
  const std::size_t n = points.size();
  if (n > kMaxCovariancePoints) {
    std::ostringstream msg;
    msg << n << " points exceed the covariance sampler limit of " << kMaxCovariancePoints;
    throw Error(ErrorCode::ResourceLimit, msg.str());
  }
  const double k0 = kernel.at_zero();
  jitter_ = kJitterRatio * k0;
  if (n == 0 || k0 <= 0.0) {
    L_.resize(static_cast<Eigen::Index>(n), 0);
    return;
  }

  // Jitter is not added to the diagonal: through ill-conditioned pivot
  // blocks it would reappear in the Schur complement amplified well above
  // delta. It serves as the PSD tolerance and the stopping threshold.
  using Wide = long double;
  const Wide diag = static_cast<Wide>(kernel(0.0));
  std::vector<Wide> d(n, diag);
  std::vector<std::vector<Wide>> columns;
  std::vector<char> used(n, 0);

  while (columns.size() < n) {
    std::size_t pivot = 0;
    Wide best = -std::numeric_limits<Wide>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (d[i] < -jitter_) {
        std::ostringstream msg;
        msg << "covariance matrix not PSD within jitter: residual pivot "
            << static_cast<double>(d[i]);
        throw Error(ErrorCode::FactorizationFailure, msg.str());
      }
      if (d[i] > best) {
        best = d[i];
        pivot = i;
      }
    }
    if (best <= jitter_) break;
    used[pivot] = 1;
    const Wide root = std::sqrt(best);
    const double xp = points[pivot];
    std::vector<Wide> col(n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      Wide v = kernel(points[i] - xp);
      for (const auto& c : columns) v -= c[i] * c[pivot];
      col[i] = v / root;
      d[i] -= col[i] * col[i];
    }
    col[pivot] = root;
    d[pivot] = 0.0L;
    columns.push_back(std::move(col));
  }

  L_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      L_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = static_cast<double>(columns[c][i]);
    }
  }
}

Eigen::VectorXd CovarianceSampler::normals(std::uint64_t seed, std::uint64_t index) const {
  Engine engine = make_engine(seed, streams::field_draw, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(L_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(engine);
  return z;
}

std::vector<double> CovarianceSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  const Eigen::MatrixXd block = draw_batch(seed, index / kSamplerBatch);
  const Eigen::VectorXd x = block.col(static_cast<Eigen::Index>(index % kSamplerBatch));
  return {x.data(), x.data() + x.size()};
}

Eigen::MatrixXd CovarianceSampler::draw_batch(std::uint64_t seed, std::uint64_t batch) const {
  const std::size_t count = kSamplerBatch;
  const std::uint64_t first = batch * kSamplerBatch;
  Eigen::MatrixXd Z(L_.cols(), static_cast<Eigen::Index>(count));
  for (std::size_t c = 0; c < count; ++c) Z.col(static_cast<Eigen::Index>(c)) = normals(seed, first + c);
  if (L_.cols() == 0) return Eigen::MatrixXd::Zero(L_.rows(), static_cast<Eigen::Index>(count));
  return L_ * Z;
}

std::vector<double> sample_at_points(const SpectrumSpec& spec, std::span<const double> points,
                                     std::uint64_t seed, std::uint64_t index) {
  return CovarianceSampler(spec, points).draw(seed, index);
}

}  // namespace ftlab
