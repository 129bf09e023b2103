#include "ftlab/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"
#include "ftlab/flat_trace.hpp"
#include "ftlab/periodic_orbits.hpp"

namespace ftlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Eigenvalues below this modulus are treated as zero when choosing r.
constexpr double kZeroModulus = 1e-8;

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  explicit FftPlan(int size) : size_(size) {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(size)), b(a.size());
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(size, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw Error(ErrorCode::ResourceLimit, "FFTW could not create a plan");
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int size_;
  fftw_plan plan_ = nullptr;
};

Eigen::MatrixXcd assemble_matrix(const ExpandingMap& map, const PointFunction& tau, double xi,
                                 int N, int Q, Parallelism par) {
  const auto q_size = static_cast<std::size_t>(Q);
  std::vector<std::complex<double>> weight(q_size);
  std::vector<double> image(q_size);
  for (std::size_t j = 0; j < q_size; ++j) {
    const double x = static_cast<double>(j) / Q;
    weight[j] = std::polar(1.0 / Q, std::fmod(xi * tau(x), kTwoPi));
    image[j] = map.lift(x);
  }
  const FftPlan plan(Q);
  const int dim = 2 * N + 1;
  Eigen::MatrixXcd M(dim, dim);
  parallel_for(static_cast<std::size_t>(dim), par, [&](std::size_t col) {
    const int q = static_cast<int>(col) - N;
    std::vector<std::complex<double>> in(q_size), out(q_size);
    for (std::size_t j = 0; j < q_size; ++j) {
      // Reduce q E(x) mod 1 before scaling by 2 pi.
      const double t = static_cast<double>(q) * image[j];
      in[j] = weight[j] * std::polar(1.0, kTwoPi * (t - std::floor(t)));
    }
    plan.execute(in.data(), out.data());
    for (int p = -N; p <= N; ++p) {
      const int k = ((p % Q) + Q) % Q;
      M(p + N, static_cast<Eigen::Index>(col)) = out[static_cast<std::size_t>(k)];
    }
  });
  return M;
}

}  // namespace

GalerkinOperator assemble_galerkin(const ExpandingMap& map, const PointFunction& tau, double xi,
                                   int N, int Q, Parallelism par) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "Galerkin truncation N must be >= 1");
  if (std::fabs(xi) > kMaxGalerkinXi) {
    std::ostringstream msg;
    msg << "|xi| = " << std::fabs(xi) << " exceeds the Galerkin limit " << kMaxGalerkinXi;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (Q == 0) {
    Q = 1;
    while (Q < 8 * N) Q *= 2;
  }
  if (Q < 8 * N) throw Error(ErrorCode::InvalidArgument, "quadrature size Q must be >= 8N");

  GalerkinOperator op;
  op.N = N;
  op.Q = Q;
  op.xi = xi;
  op.matrix = assemble_matrix(map, tau, xi, N, Q, par);
  const Eigen::MatrixXcd refined = assemble_matrix(map, tau, xi, N, 2 * Q, par);
  op.quadrature_change = (op.matrix - refined).cwiseAbs().maxCoeff();
  if (!(op.quadrature_change <= kQuadratureTol)) {
    std::ostringstream msg;
    msg << "Galerkin entries moved by " << op.quadrature_change << " when Q went from " << Q
        << " to " << 2 * Q;
    throw Error(ErrorCode::QuadratureNotConverged, msg.str());
  }
  return op;
}

std::vector<std::complex<double>> galerkin_eigenvalues(const GalerkinOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.matrix, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::UnstableSpectrum, "eigenvalue iteration did not converge");
  }
  std::vector<std::complex<double>> ev(solver.eigenvalues().data(),
                                       solver.eigenvalues().data() + solver.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  return ev;
}

std::vector<std::complex<double>> stable_eigenvalues(std::span<const std::complex<double>> coarse,
                                                     std::span<const std::complex<double>> fine,
                                                     double tol, double* max_shift) {
  std::vector<std::complex<double>> sorted(coarse.begin(), coarse.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  std::vector<char> used(fine.size(), 0);
  std::vector<std::complex<double>> out;
  double worst = 0.0;
  for (const auto& lambda : sorted) {
    std::size_t best = fine.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fine.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(fine[i] - lambda);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best < fine.size() && best_d <= tol) {
      used[best] = 1;
      out.push_back(lambda);
      worst = std::max(worst, best_d);
    }
  }
  if (max_shift) *max_shift = worst;
  return out;
}

double select_radius(std::span<const std::complex<double>> stable, double floor) {
  const double cut = std::max(floor, kZeroModulus);
  std::vector<double> mods;
  for (const auto& z : stable) {
    if (std::abs(z) > cut) mods.push_back(std::abs(z));
  }
  if (mods.empty()) {
    throw Error(ErrorCode::UnstableSpectrum, "no stable eigenvalue above the resolution floor");
  }
  std::sort(mods.begin(), mods.end(), std::greater<>());
  if (floor > kZeroModulus) mods.push_back(floor);
  if (mods.size() == 1) return mods[0] / 2.0;
  double best_ratio = 0.0;
  double r = mods[0] / 2.0;
  for (std::size_t i = 1; i < mods.size(); ++i) {
    const double ratio = mods[i - 1] / mods[i];
    if (ratio > best_ratio) {
      best_ratio = ratio;
      r = std::sqrt(mods[i - 1] * mods[i]);
    }
  }
  return r;
}

ResonanceSet resonances_outside(const GalerkinOperator& op_N, const GalerkinOperator& op_2N, double r) {
  auto coarse = galerkin_eigenvalues(op_N);
  const auto fine = galerkin_eigenvalues(op_2N);
  ResonanceSet set;
  set.N_used = op_N.N;
  set.stable = stable_eigenvalues(coarse, fine, kStabilityTol, &set.max_shift);
  if (set.stable.empty()) {
    throw Error(ErrorCode::UnstableSpectrum, "no eigenvalue is stable between N and 2N");
  }
  // stable is an ordered subsequence of coarse sorted by modulus.
  std::stable_sort(coarse.begin(), coarse.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  std::size_t j = 0;
  for (const auto& z : coarse) {
    if (j < set.stable.size() && set.stable[j] == z) {
      ++j;
    } else {
      set.resolution_floor = std::max(set.resolution_floor, std::abs(z));
    }
  }
  set.r = r >= 0.0 ? r : select_radius(set.stable, set.resolution_floor);
  for (const auto& z : set.stable) {
    if (std::abs(z) > set.r) set.eigenvalues.push_back(z);
  }
  return set;
}

ResonanceSet compute_resonances(const ExpandingMap& map, const PointFunction& tau, double xi, int N,
                                double r, Parallelism par) {
  const GalerkinOperator coarse = assemble_galerkin(map, tau, xi, N, 0, par);
  const GalerkinOperator fine = assemble_galerkin(map, tau, xi, 2 * N, 0, par);
  return resonances_outside(coarse, fine, r);
}

std::vector<ResidualRow> trace_residual(const ExpandingMap& map, const PointFunction& tau, double xi,
                                        std::span<const std::complex<double>> resonances,
                                        int n_first, int n_last, Parallelism par) {
  std::vector<ResidualRow> rows;
  for (int n = n_first; n <= n_last; ++n) {
    const OrbitTable table = build_orbit_table(map, n, par);
    std::vector<double> values;
    values.reserve(table.total_points());
    for (const auto& p : table.points()) values.push_back(tau(p.x.value()));
    ResidualRow row;
    row.n = n;
    row.trace = TracePlan(table).trace(values, xi).raw;
    std::complex<double> sum = 0.0;
    for (const auto& lambda : resonances) sum += std::pow(lambda, n);
    row.resonance_sum = sum;
    row.residual = std::abs(row.trace - sum);
    rows.push_back(row);
  }
  return rows;
}

ResidualFit fit_residual(std::span<const ResidualRow> rows, double r) {
  ResidualFit fit;
  if (rows.empty()) return fit;
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    if (row.residual > 0.0) {
      xs.push_back(row.n);
      ys.push_back(std::log(row.residual));
    }
  }
  fit.fitted_points = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    fit.slope = sxy / sxx;
  }
  fit.C = rows.front().residual / std::pow(r, rows.front().n);
  for (const auto& row : rows) {
    const double bound = fit.C * std::pow(r, row.n);
    if (bound > 0.0) fit.max_ratio = std::max(fit.max_ratio, row.residual / bound);
  }
  return fit;
}

void write_resonance_csv(std::ostream& out, std::span<const std::complex<double>> eigenvalues) {
  CsvWriter csv(out, {"re_lambda", "im_lambda", "abs_lambda"});
  for (const auto& z : eigenvalues) csv.row(z.real(), z.imag(), std::abs(z));
}

void write_residual_csv(std::ostream& out, std::span<const ResidualRow> rows) {
  CsvWriter csv(out, {"n", "trace_re", "trace_im", "resonance_sum_re", "resonance_sum_im", "residual"});
  for (const auto& r : rows) {
    csv.row(r.n, r.trace.real(), r.trace.imag(), r.resonance_sum.real(), r.resonance_sum.imag(),
            r.residual);
  }
}

}  // namespace ftlab
