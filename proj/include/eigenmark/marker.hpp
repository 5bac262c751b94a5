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
 * Marking operator C^dag (1_m (x) I_Z^phi) C for any choice of C, and its
 * measured deviation from the ideal marker.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eigenmark/complexity.hpp"
#include "eigenmark/pea.hpp"
#include "eigenmark/spectral.hpp"
#include "eigenmark/statevec.hpp"

namespace eigenmark {

enum class Variant { pea, voting, fixed_point };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// C^dag (1_m (x) I_Z^phi) C.
LinearOperator assemble_marker(const LinearOperator& c, Real phi, const SubspaceProjector& window);

struct MarkerAssembly {
  Variant variant;
  Real phi;
  WorkspaceLayout layout;
  /// q for fixed_point, nu for voting, 0 for pea.
  unsigned level_or_registers;
  Index main_dim;
  LinearOperator c;
  /// The workspace subspace playing Z: the window, or the majority subspace.
  SubspaceProjector success;
  LinearOperator marker;

  /// Ancilla qubits: mu, or nu * mu for voting.
  std::uint64_t ancillas() const;
  Index work_dim() const { return success.dimension(); }
};

/// Builds P from the shifted operator, then the chosen C and the marker.
MarkerAssembly build_marker(Variant variant, const LinearOperator& shifted, const WorkspaceLayout& layout,
                            unsigned level_or_registers, Real phi);

struct DirectionResidual {
  Index direction = 0;
  Real eigenphase = 0;
  bool marked = false;
  Real residual = 0;
};

struct MarkerErrorReport {
  Variant variant = Variant::pea;
  unsigned mu = 0;
  Index window = 0;
  unsigned level_or_registers = 0;
  Real phi = 0;
  std::vector<DirectionResidual> directions;
  Real worst_residual = 0;
  Real superposition_residual = 0;
  Index random_inputs = 0;
  /// Cost of one application of C.
  ComplexityCounters counters;
  /// Counters recorded over one marker application (C and C^dag).
  ComplexityCounters marker_counters;
};

/// Residuals on |psi_i>|sigma> for each eigen-direction plus n_random random
/// superpositions drawn from `rng`.
MarkerErrorReport evaluate_marker(const MarkerAssembly& assembly, const SpectralUnitary& spec,
                                  const ResolvedTarget& resolved, Index n_random, std::mt19937_64& rng);

nlohmann::json to_json(const MarkerErrorReport& report);
inline constexpr const char* kMarkerCsvHeader = "direction,eigenphase,residual,variant,mu,q_or_nu,N_U,N_A";
/// Rows without the header, one per direction.
std::string to_csv_rows(const MarkerErrorReport& report);

/// Shortest round-trip decimal form used by every emitted artifact.
std::string format_real(Real x);

}  // namespace eigenmark
