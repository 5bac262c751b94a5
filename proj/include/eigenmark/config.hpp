// Copyright 2026 The eigenmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Run configuration: a single JSON document.
 *
 *   {
 *     "spectral": { ...inline model... } | "spectral": "path/to/model.json",
 *     "variant": "pea" | "voting" | "fixed_point",
 *     "workspace": "calibrate" | {"mu": 8, "window": 3},
 *     "level": 2,                 // fixed_point only
 *     "registers": 3,             // voting only
 *     "phi": 3.141592653589793,   // overrides target.phi
 *     "eps_target": 1e-8 | "invocations": 1000000, "safety": 0.01,
 *     "random_inputs": 4,
 *     "seed": 1,
 *     "calibration": {"eta_target": 0.03125, "max_qubits": 20, "grid_per_bin": 64, "dense_bins": 32},
 *     "calibration_cache": "cache.json",
 *     "sweep": {"mu": [...], "level": [...], "registers": [...], "delta": [...]},
 *     "compare": {"delta": [...], "eps": [...], "simulate": false}
 *   }
 *
 * Relative paths resolve against the config file's directory.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "eigenmark/marker.hpp"
#include "eigenmark/pea.hpp"
#include "eigenmark/spectral.hpp"

namespace eigenmark {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorkspaceOverride {
  unsigned mu = 0;
  Index window = 0;
};

struct SweepAxes {
  std::vector<unsigned> mu;
  std::vector<unsigned> level;
  std::vector<unsigned> registers;
  std::vector<Real> delta;
  bool empty() const { return mu.empty() && level.empty() && registers.empty() && delta.empty(); }
};

struct CompareGrid {
  std::vector<Real> delta;
  std::vector<Real> eps;
  bool simulate = false;
};

struct RunConfig {
  std::optional<SpectralModel> spectral;
  Variant variant = Variant::fixed_point;
  /// Empty means calibrate.
  std::optional<WorkspaceOverride> workspace;
  std::optional<unsigned> level;
  std::optional<unsigned> registers;
  std::optional<Real> phi;
  std::optional<Real> eps_target;
  Index random_inputs = 4;
  std::uint64_t seed = 1;
  CalibrationOptions calibration;
  std::string calibration_cache;
  SweepAxes sweep;
  CompareGrid compare;

  /// q for fixed_point, nu for voting, 0 for pea.
  unsigned level_or_registers() const;
  Real marker_phase() const;
};

/// Throws ConfigError with a message naming the offending field.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

}  // namespace eigenmark
