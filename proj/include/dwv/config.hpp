#pragma once

// Experiment configuration: JSON ingestion with strict schema validation
// (unknown keys and out-of-range values are usage errors naming the field
// path), canonical serialization with a fixed key order, and the FNV-1a
// hash of the canonical form that stamps every output file.

#include <cstdint>
#include <string>
#include <vector>

#include "dwv/propagator.hpp"
#include "dwv/zones.hpp"

namespace dwv {

inline constexpr const char* kToolkitVersion = "0.3.0";

struct FamilySpec {
  std::string kind = "polynomial";  // polynomial | exponential |
                                    // super-exponential
  double alpha = 1.0, beta = 0.5, gamma = 0.0;  // polynomial exponents
  double q = 2.0, r = 0.5;                      // (super-)exponential rates
  double kappa = 0.625;                         // damping constant
  int smoothness = 2;                           // M
  int bumps = 0;                                // oscillator train length J

  CoefficientFamily build() const;
};

struct GridRange {
  double lo = 0.0, hi = 1.0;
  int n = 2;  // log-spaced samples, endpoints included
};

struct ExperimentConfig {
  std::string name = "experiment";
  FamilySpec family;
  ZoneConfig zones;
  GridRange t_grid{10.0, 2000.0, 48};
  GridRange xi_grid{1e-4, 30.0, 401};  // odd: radial composite Simpson
  double tol = 1e-8;
  double sigma = 0.0;     // Sobolev order of the assembled norm
  int dim = 2;            // space dimension n
  double m = 1.0;         // data integrability index, 1 <= m <= 2
  std::string data0 = "gaussian";  // gaussian | zero | indicator
  std::string data1 = "gaussian";
  double indicator_radius = 1.0;
  double horizon = 100.0;  // assumption-certification horizon
  std::string out_dir = "out";
  int jobs = 1;

  DataProfile profile(const std::string& which) const;
  std::vector<double> times() const;
  std::vector<double> radii() const;
};

// Parse and validate; ParamError messages carry the offending field path
// (e.g. `config field "zones.eps": ...`).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Fixed key order and number format; equal configs produce equal bytes.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace dwv
