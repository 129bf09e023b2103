#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ftlab/gaussian_field.hpp"
#include "ftlab/parallel.hpp"

namespace ftlab {

inline constexpr double kJitterRatio = 1e-10;
inline constexpr std::size_t kMaxCovariancePoints = 10000;
/// Draws are generated in fixed batches so the result of draw i never
/// depends on how draws were split between threads.
inline constexpr std::size_t kSamplerBatch = 64;

/// Exact finite-dimensional sampler for a stationary field at fixed points:
/// Sigma_ij = K(x_i - x_j) is factored as L L^T by pivoted Cholesky, stopping
/// once every remaining pivot is at most delta = 1e-10 K(0). A remaining
/// pivot below -delta means Sigma is not PSD (FactorizationFailure).
class CovarianceSampler {
 public:
  CovarianceSampler(const SpectrumSpec& spec, std::span<const double> points);
  CovarianceSampler(const CovarianceKernel& kernel, std::span<const double> points);

  std::size_t size() const { return static_cast<std::size_t>(L_.rows()); }
  std::size_t rank() const { return static_cast<std::size_t>(L_.cols()); }
  const Eigen::MatrixXd& factor() const { return L_; }
  double jitter() const { return jitter_; }

  /// Field values for draw `index` (engine derived from seed, field stream, index).
  std::vector<double> draw(std::uint64_t seed, std::uint64_t index) const;
  /// Columns are draws 64 b .. 64 b + 63.
  Eigen::MatrixXd draw_batch(std::uint64_t seed, std::uint64_t batch) const;

 private:
  void factorize(const CovarianceKernel& kernel, std::span<const double> points);
  Eigen::VectorXd normals(std::uint64_t seed, std::uint64_t index) const;

  Eigen::MatrixXd L_;
  double jitter_ = 0.0;
};

/// One draw of the Gaussian vector (tau(x_i))_i with covariance K(x_i - x_j).
std::vector<double> sample_at_points(const SpectrumSpec& spec, std::span<const double> points,
                                     std::uint64_t seed, std::uint64_t index = 0);

}  // namespace ftlab
