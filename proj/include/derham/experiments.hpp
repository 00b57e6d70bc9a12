#pragma once

// Config-driven experiments.  A config is a JSON object with a "kind" key
// selecting the experiment, a "label", and kind-specific entries; unknown
// keys are rejected by name.  Each run returns a finished report document
// (see report.hpp) plus the verdict over all checks it performed.
//
// Kinds:
//   "constants"      spectral constants of a box over a sequence of grids,
//                    with step-halving extrapolation and ordering checks
//   "verify"         named inequality checks (ordering, main-theorem,
//                    sandwich, chain, duality) over a list of grid cases
//   "abstract-suite" randomized small complexes: adjointness, combined
//                    constant, Helmholtz split, cohomology dimension,
//                    weight sandwich
//   "transform"      change-of-variables constants, commutation checks,
//                    scaling bounds
//   "gaffney"        full-gradient energy identity for built-in fields

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "derham/report.hpp"

namespace derham {

// Invalid configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentResult {
  Json report;
  Verdict verdict;
};

ExperimentResult run_experiment(const Json& config);

// Where the report should be written: the config's "output" entry if present,
// otherwise "<label>.report.json".
std::string report_output_path(const Json& config);

}  // namespace derham
