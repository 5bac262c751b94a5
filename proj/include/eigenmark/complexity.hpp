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
 * Exact resource counters, the unit-constant asymptotic cost models
 * ("Theta-model") and the recursion-depth planner.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eigenmark/statevec.hpp"

namespace eigenmark {

struct ComplexityCounters {
  /// Applications of U or U^dag.
  std::uint64_t applications_u = 0;
  /// Ancilla qubits.
  std::uint64_t ancillas = 0;
  /// Applications of P or P^dag.
  std::uint64_t applications_p = 0;

  friend bool operator==(const ComplexityCounters&, const ComplexityCounters&) = default;
};

ComplexityCounters counters_from(const Tally& tally, std::uint64_t ancillas);
ComplexityCounters counters_from(const EvaluationContext& ctx, std::uint64_t ancillas);

inline constexpr Real kDefaultSafety = 0.01L;

/// epsilon_target = c / Q for Q marker invocations.
Real target_from_invocations(std::uint64_t invocations, Real safety = kDefaultSafety);

struct RecursionPlan {
  unsigned level = 0;
  /// Predicted worst wrong magnitude h_q eta^{m_q} at the chosen level.
  Real predicted = 0;
  std::string note;
};

/// Smallest q with h_q eta^{m_q} <= eps_target. Requires 0 < eta <= 2^-5.
RecursionPlan plan_recursion(Real eta, Real eps_target, unsigned max_level = 12);

/// Smallest odd nu with e^{-nu/4} <= eps_target.
unsigned plan_registers(Real eps_target);

struct ComplexityRow {
  std::string variant;
  Real delta = 0;
  Real eps = 0;
  std::optional<unsigned> mu;
  std::optional<unsigned> q;
  std::optional<unsigned> nu;
  Real n_u_model = 0;
  std::optional<std::uint64_t> n_u_measured;
  /// Exact ancilla count when a workspace size is known.
  std::optional<std::uint64_t> n_a;
  std::optional<std::uint64_t> n_p;
  Real n_a_model = 0;
};

/// Returns the calibrated mu for a gap, or nothing when no simulation data is available.
using WorkspaceSizer = std::function<std::optional<unsigned>(Real delta)>;

/// One row per (variant, delta, eps) for P_eps, H_eps, M_eps, F_eps.
std::vector<ComplexityRow> tabulate(const std::vector<Real>& deltas, const std::vector<Real>& epsilons,
                                    const WorkspaceSizer& sizer = {});

inline constexpr const char* kComplexityCsvHeader =
    "variant,delta,eps,mu,q,nu,N_U_model,N_U_measured,N_A,N_P,N_A_model";
std::string to_csv(const std::vector<ComplexityRow>& rows);

}  // namespace eigenmark
