#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ftlab/circle_map.hpp"
#include "ftlab/periodic_orbits.hpp"

namespace ftlab {

/// (1/n) log sum_{E^n x = x} e^{phi^n_x}, by log-sum-exp over orbits.
double pressure_estimate(const OrbitTable& table, const PointFunction& phi);

/// pressure_estimate for phi = -beta J, using the stored orbit multipliers.
double pressure_of_minus_beta_J(const OrbitTable& table, double beta);

/// (1/beta) Pr_n(-beta J). Throws InvalidArgument unless beta > 0.
double F_of_beta(const OrbitTable& table, double beta);

/// min over fixed points of J^n_x / n.
double j_min_estimate(const OrbitTable& table);

/// n A_n max_O 1/(e^{J^n_O} - 1).
double lemma_ref_ratio(const OrbitTable& table);

/// e^{Pr_n(-J/2)} / m^s.
double essential_radius_bound(const OrbitTable& table, const ExpandingMap& map, double s);

/// Aitken delta-squared extrapolation of the last three terms; returns the
/// last term when the second difference vanishes or fewer than three terms
/// are given.
double aitken_extrapolate(std::span<const double> sequence);

struct SequenceRow {
  int n = 0;
  std::string quantity_id;
  double value = 0.0;
};

/// CSV: n, quantity_id, value.
void write_sequence_csv(std::ostream& out, std::span<const SequenceRow> rows);

}  // namespace ftlab
