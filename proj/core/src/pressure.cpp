#include "ftlab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ftlab/csv.hpp"
#include "ftlab/error.hpp"
#include "ftlab/flat_trace.hpp"

namespace ftlab {

namespace {

// (1/n) log sum_O m_O e^{s_O}.
double log_sum_exp_over_orbits(const OrbitTable& table, const std::vector<double>& s) {
  double top = -std::numeric_limits<double>::infinity();
  const auto orbits = table.orbits();
  std::vector<double> terms(orbits.size());
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    terms[o] = s[o] + std::log(static_cast<double>(orbits[o].prime_period));
    top = std::max(top, terms[o]);
  }
  CompensatedSum acc;
  for (double t : terms) acc.add(std::exp(t - top));
  return (top + std::log(acc.value())) / table.n();
}

}  // namespace

double pressure_estimate(const OrbitTable& table, const PointFunction& phi) {
  const auto orbits = table.orbits();
  const auto points = table.points();
  std::vector<double> s(orbits.size());
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    CompensatedSum acc;
    for (auto idx : orbits[o].members) acc.add(phi(points[idx].x.value()));
    s[o] = static_cast<double>(table.n() / orbits[o].prime_period) * acc.value();
  }
  return log_sum_exp_over_orbits(table, s);
}

double pressure_of_minus_beta_J(const OrbitTable& table, double beta) {
  const auto orbits = table.orbits();
  std::vector<double> s(orbits.size());
  for (std::size_t o = 0; o < orbits.size(); ++o) s[o] = -beta * orbits[o].log_multiplier();
  return log_sum_exp_over_orbits(table, s);
}

double F_of_beta(const OrbitTable& table, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "F(beta) needs beta > 0");
  return pressure_of_minus_beta_J(table, beta) / beta;
}

double j_min_estimate(const OrbitTable& table) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : table.orbits()) best = std::min(best, o.log_multiplier());
  return best / table.n();
}

double lemma_ref_ratio(const OrbitTable& table) {
  double jmin = std::numeric_limits<double>::infinity();
  for (const auto& o : table.orbits()) jmin = std::min(jmin, o.log_multiplier());
  return table.n() * compute_An(table) * inverse_expm1(jmin);
}

double essential_radius_bound(const OrbitTable& table, const ExpandingMap& map, double s) {
  return std::exp(pressure_of_minus_beta_J(table, 0.5)) / std::pow(map.min_derivative(), s);
}

double aitken_extrapolate(std::span<const double> seq) {
  if (seq.empty()) throw Error(ErrorCode::InvalidArgument, "empty sequence");
  if (seq.size() < 3) return seq.back();
  const double a = seq[seq.size() - 3], b = seq[seq.size() - 2], c = seq[seq.size() - 1];
  const double denom = (c - b) - (b - a);
  if (denom == 0.0 || !std::isfinite(denom)) return c;
  return c - (c - b) * (c - b) / denom;
}

void write_sequence_csv(std::ostream& out, std::span<const SequenceRow> rows) {
  CsvWriter csv(out, {"n", "quantity_id", "value"});
  for (const auto& r : rows) csv.row(r.n, std::string_view(r.quantity_id), r.value);
}

}  // namespace ftlab
