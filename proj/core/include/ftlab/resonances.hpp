#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ftlab/circle_map.hpp"
#include "ftlab/parallel.hpp"

namespace ftlab {

inline constexpr double kMaxGalerkinXi = 100.0;
inline constexpr double kQuadratureTol = 1e-8;
inline constexpr double kStabilityTol = 1e-6;

/// Matrix of L_{xi,tau} v = e^{i xi tau} v o E on the modes |p| <= N:
/// M_pq = int e^{-2 i pi p x} e^{i xi tau(x)} e^{2 i pi q E(x)} dx.
/// Row/column index p + N.
struct GalerkinOperator {
  int N = 0;
  int Q = 0;
  double xi = 0.0;
  Eigen::MatrixXcd matrix;
  /// max |M(Q) - M(2Q)| from the refinement check.
  double quadrature_change = 0.0;
};

/// Q-point uniform quadrature, one FFT per column. Q = 0 picks the smallest
/// power of two >= 8N. Throws QuadratureNotConverged when doubling Q moves
/// any entry by more than 1e-8, InvalidArgument if |xi| > 100 or Q < 8N.
GalerkinOperator assemble_galerkin(const ExpandingMap& map, const PointFunction& tau, double xi,
                                   int N, int Q = 0, Parallelism par = {});

std::vector<std::complex<double>> galerkin_eigenvalues(const GalerkinOperator& op);

struct ResonanceSet {
  /// Stable eigenvalues with |lambda| > r, by decreasing modulus.
  std::vector<std::complex<double>> eigenvalues;
  /// Every eigenvalue of the N matrix matched within 1e-6 by one of the 2N matrix.
  std::vector<std::complex<double>> stable;
  /// Largest matching distance among the stable eigenvalues.
  double max_shift = 0.0;
  /// Largest modulus among eigenvalues of the N matrix that failed the match.
  double resolution_floor = 0.0;
  double r = 0.0;
  int N_used = 0;
};

/// Eigenvalues of `coarse` matched one-to-one (nearest first, by decreasing
/// modulus) to eigenvalues of `fine` within tol.
std::vector<std::complex<double>> stable_eigenvalues(std::span<const std::complex<double>> coarse,
                                                     std::span<const std::complex<double>> fine,
                                                     double tol = kStabilityTol,
                                                     double* max_shift = nullptr);

/// Radius in the widest gap of the stable moduli above `floor`, with the floor
/// itself as the last entry: the geometric mean of the two moduli with the
/// largest ratio, or half the modulus when only one nonzero stable
/// eigenvalue exists and the floor is zero.
double select_radius(std::span<const std::complex<double>> stable, double floor = 0.0);

/// Stable eigenvalues of op_N (checked against op_2N) outside r; r < 0
/// selects the radius automatically. Throws UnstableSpectrum when nothing is
/// stable.
ResonanceSet resonances_outside(const GalerkinOperator& op_N, const GalerkinOperator& op_2N,
                                double r = -1.0);

/// Assembles at N and 2N and returns resonances_outside.
ResonanceSet compute_resonances(const ExpandingMap& map, const PointFunction& tau, double xi, int N,
                                double r = -1.0, Parallelism par = {});

struct ResidualRow {
  int n = 0;
  std::complex<double> trace;
  std::complex<double> resonance_sum;
  double residual = 0.0;
};

/// |Tr^flat L^n - sum lambda^n| for n in [n_first, n_last].
std::vector<ResidualRow> trace_residual(const ExpandingMap& map, const PointFunction& tau, double xi,
                                        std::span<const std::complex<double>> resonances,
                                        int n_first, int n_last, Parallelism par = {});

struct ResidualFit {
  /// Least-squares slope of log residual against n.
  double slope = 0.0;
  /// C = residual(n_first) / r^{n_first}.
  double C = 0.0;
  /// max residual(n) / (C r^n) over the rows.
  double max_ratio = 0.0;
  /// Rows with zero residual are left out of the slope fit.
  int fitted_points = 0;
};

ResidualFit fit_residual(std::span<const ResidualRow> rows, double r);

/// CSV: re_lambda, im_lambda, abs_lambda.
void write_resonance_csv(std::ostream& out, std::span<const std::complex<double>> eigenvalues);
/// CSV: n, trace_re, trace_im, resonance_sum_re, resonance_sum_im, residual.
void write_residual_csv(std::ostream& out, std::span<const ResidualRow> rows);

}  // namespace ftlab
