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
 * Phase estimation P = (inverse QFT) . (controlled S^z) . (Walsh-Hadamard)
 * on a workspace of mu qubits, the Z window, per-direction error reports and
 * the workspace calibration that drives the error below a target.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eigenmark/spectral.hpp"
#include "eigenmark/statevec.hpp"

namespace eigenmark {

/// mu ancilla qubits, symmetric window Z = {z : min(z, 2^mu - z) <= w}, sigma = |0...0>.
class WorkspaceLayout {
 public:
  WorkspaceLayout(unsigned qubits, Index window);

  unsigned qubits() const { return qubits_; }
  Index window() const { return window_; }
  Index work_dim() const { return Index{1} << qubits_; }
  Index standard_index() const { return 0; }

  bool in_window(Index z) const;
  SubspaceProjector window_projector() const;
  SubspaceProjector complement_projector() const;

  friend bool operator==(const WorkspaceLayout&, const WorkspaceLayout&) = default;

 private:
  unsigned qubits_;
  Index window_;
};

inline constexpr unsigned kMaxWorkspaceQubits = 24;

LinearOperator walsh_hadamard(unsigned qubits);
/// QFT |x> = 2^{-n/2} sum_k e^{2 pi i x k / 2^n} |k>, as a gate circuit.
LinearOperator quantum_fourier_transform(unsigned qubits);
LinearOperator inverse_quantum_fourier_transform(unsigned qubits);

/// |m>|z> -> (S^z |m>)|z>. One application is tallied as 2^mu applications of U.
LinearOperator controlled_powers(const LinearOperator& shifted, const WorkspaceLayout& layout);

/// Joint-space phase estimation operator. Tagged as one application of P, plus
/// 2^mu applications of U from the controlled powers.
LinearOperator build_pea(const LinearOperator& shifted, const WorkspaceLayout& layout);

struct DirectionEta {
  Index direction = 0;
  Real eigenphase = 0;
  Real shifted_phase = 0;
  bool marked = false;
  /// Magnitude of the wrong-subspace component (Z-perp when marked, Z otherwise).
  Real eta = 0;
};

struct EtaReport {
  std::vector<DirectionEta> directions;
  Real eta_marked = 0;
  Real eta_unmarked = 0;
  Real eta = 0;
};

/// Prepares |psi_i>|sigma> for each eigen-direction, applies P and reads the
/// wrong-subspace magnitude.
EtaReport measure_eta(const LinearOperator& pea, const SpectralUnitary& spec, const ResolvedTarget& resolved,
                      const WorkspaceLayout& layout);

/// Probability of workspace outcome k after P for a single eigenphase lambda.
Real pea_outcome_probability(Real lambda, unsigned qubits, Index outcome);
/// Total probability of landing in Z for a single eigenphase lambda.
Real pea_window_probability(Real lambda, const WorkspaceLayout& layout);

struct CalibrationOptions {
  Real eta_target = 1.0L / 32;
  unsigned max_qubits = 20;
  /// Search points per outcome bin (2 pi / 2^mu) of lambda.
  unsigned grid_per_bin = 64;
  /// Bins past theta_min searched densely; the remainder is bounded analytically.
  unsigned dense_bins = 32;
};

struct CalibrationResult {
  unsigned qubits = 0;
  Index window = 0;
  Real eta_marked = 0;
  Real eta_unmarked = 0;
  Real eta = 0;
  Real worst_marked_lambda = 0;
  Real worst_unmarked_lambda = 0;

  WorkspaceLayout layout() const { return WorkspaceLayout(qubits, window); }
};

class CalibrationFailure : public std::runtime_error {
 public:
  CalibrationFailure(const std::string& what, CalibrationResult best)
      : std::runtime_error(what), best_(best) {}
  const CalibrationResult& best() const { return best_; }

 private:
  CalibrationResult best_;
};

/// Worst-case error of a fixed layout over marked |lambda| <= b*gap and
/// unmarked |lambda| >= gap/2.
CalibrationResult worst_case_eta(Real gap, Real b, const WorkspaceLayout& layout, const CalibrationOptions& options);

/// Smallest mu (with its window) whose worst-case error meets the target.
/// Throws CalibrationFailure once mu would exceed options.max_qubits.
CalibrationResult calibrate_workspace(Real gap, Real b, const CalibrationOptions& options = {});

/// The window minimizing the worst-case eta at a fixed qubit count.
CalibrationResult best_window(Real gap, Real b, unsigned qubits, const CalibrationOptions& options = {});

/// Calibration results keyed by (gap, b, eta_target, grid density).
class CalibrationCache {
 public:
  static std::string key(Real gap, Real b, const CalibrationOptions& options);

  std::optional<CalibrationResult> find(Real gap, Real b, const CalibrationOptions& options) const;
  void insert(Real gap, Real b, const CalibrationOptions& options, const CalibrationResult& result);
  /// Cached value or a fresh calibration (which is then stored).
  CalibrationResult get_or_calibrate(Real gap, Real b, const CalibrationOptions& options);

  nlohmann::json to_json() const;
  static CalibrationCache from_json(const nlohmann::json& doc);
  static CalibrationCache load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    double gap, b, eta_target;
    unsigned grid_per_bin;
    CalibrationResult result;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace eigenmark
