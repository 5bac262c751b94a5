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
 * Majority-voting baseline: nu registers each running the same phase
 * estimation on a shared main space.
 *
 * Multi-register workspace index: register r occupies bits
 * [r*mu, (r+1)*mu) of the combined index (register 0 least significant).
 */

#pragma once

#include "eigenmark/pea.hpp"
#include "eigenmark/statevec.hpp"

namespace eigenmark {

struct VotingModel {
  unsigned registers = 1;
  /// Per-register probability of landing in the wrong subspace.
  Real wrong_probability = 0;

  /// Hoeffding deviation 1/2 - p.
  Real deviation() const { return Real(0.5) - wrong_probability; }
  void validate() const;
};

/// sqrt(sum_{k > nu/2} C(nu, k) p^k (1 - p)^{nu - k}). Rejects even nu.
Real majority_tail_amplitude(Real wrong_probability, unsigned registers);
Real majority_tail_amplitude(const VotingModel& model);

/// e^{-nu/4}: square root of the Hoeffding probability bound e^{-2 nu t^2} at t = 1/2.
Real hoeffding_amplitude_bound(unsigned registers);

inline constexpr Index kTensorGuard = Index{1} << 18;

/// P^{(x)nu} on main (x) register_0 (x) ... (x) register_{nu-1}. One
/// application tallies nu applications of P (and their U cost).
LinearOperator build_h_tensor(const LinearOperator& pea, Index main_dim, const WorkspaceLayout& layout,
                              unsigned registers);

/// Combined-workspace indices where more than nu/2 registers lie in Z.
SubspaceProjector majority_projector(const WorkspaceLayout& layout, unsigned registers);

/// Magnitude of the minority-loss component of `state`: registers in the
/// wrong subspace form a majority. Marked inputs lose when most registers sit
/// outside Z; unmarked inputs lose when most sit inside.
Real majority_loss_amplitude(const JointState& state, const WorkspaceLayout& layout, unsigned registers,
                             bool marked);

}  // namespace eigenmark
