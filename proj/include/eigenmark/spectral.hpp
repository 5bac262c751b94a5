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
 * The unitary under test, described by its spectrum, and the phase-shifted
 * operator S = e^{-i psi'} U whose eigenphases feed phase estimation.
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "eigenmark/statevec.hpp"

namespace eigenmark {

/// Wraps an angle into (-pi, pi].
Real wrap_phase(Real angle);
/// |a - b| measured on the circle, in [0, pi].
Real circle_distance(Real a, Real b);

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Some eigenphase sits on the wrong side of the separation threshold.
class AssumptionViolation : public SpectralError {
 public:
  AssumptionViolation(const std::string& what, Index direction, Real eigenphase)
      : SpectralError(what), direction_(direction), eigenphase_(eigenphase) {}
  Index direction() const { return direction_; }
  Real eigenphase() const { return eigenphase_; }

 private:
  Index direction_;
  Real eigenphase_;
};

/// U = sum_i e^{i psi_i} |v_i><v_i| with v_i the columns of `eigenbasis`.
class SpectralUnitary {
 public:
  /// Computational eigenbasis.
  SpectralUnitary(std::vector<Real> eigenphases, Real gap);
  SpectralUnitary(std::vector<Real> eigenphases, DenseMatrix eigenbasis, Real gap);

  Index dim() const { return eigenphases_.size(); }
  const std::vector<Real>& eigenphases() const { return eigenphases_; }
  const DenseMatrix& eigenbasis() const { return eigenbasis_; }
  std::vector<Complex> eigenvector(Index direction) const { return eigenbasis_.column(direction); }
  Real gap() const { return gap_; }

 private:
  std::vector<Real> eigenphases_;
  DenseMatrix eigenbasis_;
  Real gap_;
};

inline constexpr Real kDefaultAccuracyFraction = 0.05L;

struct MarkTarget {
  Real psi_prime = 0;
  Real b = kDefaultAccuracyFraction;
  Real phi = kPi;
  /// When unset the marked phase is the one within b*gap of psi_prime.
  std::optional<Real> marked_phase;
};

/// The target after validation against a spectrum.
struct ResolvedTarget {
  MarkTarget target;
  Real marked_phase = 0;
  Real theta_min = 0;
  /// circle(psi_i - psi'), one per direction.
  std::vector<Real> shifted_phases;
  std::vector<bool> marked;

  Index marked_count() const;
};

/// Checks |psi' - psi| < b*gap, the gap condition for every other
/// direction, and the separation assumption on the shifted phases.
ResolvedTarget resolve_target(const SpectralUnitary& spec, const MarkTarget& target);

/// |lambda| < b*gap on marked directions and |lambda_perp| > theta_min elsewhere.
/// Throws AssumptionViolation naming the first offending eigenphase.
void check_separation(const ResolvedTarget& resolved, Real gap);

/// The operator U itself; tagged as one application of U.
LinearOperator build_unitary(const SpectralUnitary& spec);
/// S = e^{-i psi'} U; tagged as one application of U, exact powers available.
LinearOperator build_shifted(const SpectralUnitary& spec, const ResolvedTarget& resolved);
/// Ideal marker: e^{i phi} on the marked eigenspace, identity elsewhere.
LinearOperator ideal_marker(const SpectralUnitary& spec, const ResolvedTarget& resolved,
                            std::optional<Real> phi = std::nullopt);

/// V diag(e^{i phase_k * exponent}) V^H, with the phase product reduced mod 2 pi.
DenseMatrix spectral_power_matrix(const DenseMatrix& eigenbasis, const std::vector<Real>& phases,
                                  std::uint64_t exponent);

/// Document: {dim, eigenphases[], eigenbasis?, delta, target:{psi_prime, b, phi}}.
/// The eigenbasis is "computational" or a dim x dim array of [re, im] pairs
/// (row-major, columns are eigenvectors).
struct SpectralModel {
  SpectralUnitary spectrum;
  MarkTarget target;
};
SpectralModel spectral_model_from_json(const nlohmann::json& doc);
nlohmann::json spectral_model_to_json(const SpectralModel& model);

}  // namespace eigenmark
