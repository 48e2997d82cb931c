#pragma once

// Pipeline orchestration: each verb runs one stage against a validated
// configuration and writes deterministic CSV artifacts plus a manifest line
// into the output directory. `report` aggregates the artifacts present.

#include <string>
#include <vector>

#include "dwv/config.hpp"

namespace dwv {

// check-assumptions, zones, solve, verify-bounds, decay-fit, wkb-check,
// report.
const std::vector<std::string>& cli_verbs();

// Runs one stage; returns the artifact file names written (relative to
// cfg.out_dir). Throws ParamError for an unknown verb, and lets stage
// errors (NumericError etc.) propagate.
std::vector<std::string> run_verb(const std::string& verb,
                                  const ExperimentConfig& cfg);

// Command-line entry: <verb> --config <file> [--out dir] [--jobs n]
// [--tol x]. DWV_OUT_ROOT prefixes relative output directories. Returns the
// process exit status: 0 success, 2 usage or schema error, 1 stage failure.
int run_cli(int argc, const char* const* argv);

}  // namespace dwv
