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
 * Selective phase rotations and the pi/3 fixed-point recursion.
 *
 * For a joint-space operator V, a standard workspace state sigma and a
 * workspace window Z:
 *
 *   compress(V) = V . I_sigma^{pi/3} . V^dag . I_Z^{pi/3}  . V
 *   balance(V)  = V . I_sigma^{pi/3} . V^dag . I_Z^{-pi/3} . V
 *
 * (rightmost factor first). Starting from P(0,0) = P the recursion
 * alternates P(q+1,q) = compress(P(q,q)) and P(q+1,q+1) = balance(P(q+1,q)),
 * so level q costs 9^q applications of P. Both phase rotations act on the
 * workspace only, so the construction never needs the unknown eigenstate.
 */

#pragma once

#include <cstdint>
#include <span>

#include "eigenmark/statevec.hpp"

namespace eigenmark {

/// 1 - (1 - e^{i alpha}) |omega><omega|. Rejects a non-normalized omega.
LinearOperator selective_phase(std::span<const Complex> omega, Real alpha);
/// 1 - (1 - e^{i alpha}) Pi for the subspace projector Pi.
LinearOperator selective_phase(const SubspaceProjector& subspace, Real alpha);

/// V I_sigma^{pi/3} V^dag I_Z^{pi/3} V; the wrong-subspace amplitude is cubed.
LinearOperator pi3_compress(const LinearOperator& v, Index sigma, const SubspaceProjector& window);
/// V I_sigma^{pi/3} V^dag I_Z^{-pi/3} V; the Z-side amplitude is cubed instead.
LinearOperator pi3_balance(const LinearOperator& v, Index sigma, const SubspaceProjector& window);

inline constexpr unsigned kDefaultMaxLevel = 3;

/// P(q,q). Throws std::invalid_argument above max_level.
LinearOperator build_fixed_point(const LinearOperator& pea, unsigned level, Index sigma,
                                 const SubspaceProjector& window, unsigned max_level = kDefaultMaxLevel);

/// Closed-form bookkeeping of level q and the magnitudes predicted for a
/// starting error eta (leading order in eta).
struct RecursionSchedule {
  unsigned level = 0;
  std::uint64_t m = 1;
  Real g = 1;
  Real h = 1;
  /// (3^{3/4} 2^{-5})^{3^q}
  Real epsilon = 0;
  Real eta = 0;
  /// g eta^m: wrong magnitude when the main space holds the marked eigenstate.
  Real predicted_marked = 0;
  /// h eta^m: wrong magnitude for any other eigenstate.
  Real predicted_unmarked = 0;
  /// False when eta > 2^-5, where the bound epsilon no longer applies.
  bool in_regime = true;
};

inline constexpr Real kWorkingEta = 1.0L / 32;

RecursionSchedule predict_schedule(unsigned level, Real eta);
/// Applies one step of m' = 3m, g' = 3^{1/2} g^3, h' = 3^{3/2} h^3.
RecursionSchedule advance_schedule(const RecursionSchedule& s);

}  // namespace eigenmark
