#pragma once

#include "ftlab/circle_map.hpp"
#include "ftlab/cli.hpp"
#include "ftlab/experiment.hpp"
#include "ftlab/gaussian_field.hpp"

namespace ftlab::cli {

// Builders from a resolved config section. They assume resolve_config ran.
ExpandingMap build_map(const Json& map);
SpectrumSpec build_spectrum(const Json& spectrum);
Tau0Spec build_tau0(const Json& tau0);
ExperimentConfig build_experiment_config(const Json& resolved);

}  // namespace ftlab::cli
