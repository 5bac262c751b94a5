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

#include "eigenmark/fpqs.hpp"

#include <cmath>

#include <fmt/format.h>

namespace eigenmark {

namespace {

constexpr Real kNormTolerance = 1e-10L;

Index main_dimension(const LinearOperator& v, const SubspaceProjector& window) {
  if (window.dimension() == 0 || v.dimension() % window.dimension() != 0) {
    throw DimensionMismatch("fixed-point step (workspace factor)", window.dimension(), v.dimension());
  }
  return v.dimension() / window.dimension();
}

LinearOperator pi3_step(const LinearOperator& v, Index sigma, const SubspaceProjector& window, Real window_angle,
                        const char* name) {
  const Index main_dim = main_dimension(v, window);
  if (sigma >= window.dimension()) throw std::out_of_range("fixed-point step: sigma outside the workspace");
  auto phase_sigma = lift_to_workspace(selective_phase(SubspaceProjector(window.dimension(), {sigma}), kPi / 3), main_dim);
  auto phase_window = lift_to_workspace(selective_phase(window, window_angle), main_dim);
  auto op = product({v, phase_sigma, v.adjoint(), phase_window, v});
  return LinearOperator(
      op.dimension(), [op](std::span<Complex> x, EvaluationContext& ctx) { op.apply(x, ctx); },
      [op](std::span<Complex> x, EvaluationContext& ctx) { op.apply_adjoint(x, ctx); }, {}, op.cost(),
      fmt::format("{}({})", name, v.label()));
}

}  // namespace

LinearOperator selective_phase(std::span<const Complex> omega, Real alpha) {
  const Real n = norm2(omega);
  if (std::abs(n - 1) > kNormTolerance) {
    throw std::invalid_argument(fmt::format("selective_phase: target state has norm {:.15g}", static_cast<double>(n)));
  }
  auto target = std::make_shared<const std::vector<Complex>>(omega.begin(), omega.end());
  auto run = [target](std::span<Complex> v, Real angle) {
    const Complex overlap = inner_product(*target, v);
    const Complex k = (Real(1) - std::polar(Real(1), angle)) * overlap;
    for (Index i = 0; i < v.size(); ++i) v[i] -= k * (*target)[i];
  };
  return LinearOperator(
      omega.size(), [run, alpha](std::span<Complex> v, EvaluationContext&) { run(v, alpha); },
      [run, alpha](std::span<Complex> v, EvaluationContext&) { run(v, -alpha); }, {}, {}, "I_w");
}

LinearOperator selective_phase(const SubspaceProjector& subspace, Real alpha) {
  const Complex f = std::polar(Real(1), alpha);
  auto members = std::make_shared<const std::vector<Index>>(subspace.members());
  auto run = [members](std::span<Complex> v, Complex factor) {
    for (Index i : *members) v[i] *= factor;
  };
  return LinearOperator(
      subspace.dimension(), [run, f](std::span<Complex> v, EvaluationContext&) { run(v, f); },
      [run, f](std::span<Complex> v, EvaluationContext&) { run(v, std::conj(f)); }, {}, {}, "I_Z");
}

LinearOperator pi3_compress(const LinearOperator& v, Index sigma, const SubspaceProjector& window) {
  return pi3_step(v, sigma, window, kPi / 3, "C");
}

LinearOperator pi3_balance(const LinearOperator& v, Index sigma, const SubspaceProjector& window) {
  return pi3_step(v, sigma, window, -kPi / 3, "B");
}

LinearOperator build_fixed_point(const LinearOperator& pea, unsigned level, Index sigma,
                                 const SubspaceProjector& window, unsigned max_level) {
  if (level > max_level) {
    throw std::invalid_argument(fmt::format("build_fixed_point: level {} exceeds cap {}", level, max_level));
  }
  main_dimension(pea, window);
  LinearOperator current = pea;
  for (unsigned q = 0; q < level; ++q) current = pi3_balance(pi3_compress(current, sigma, window), sigma, window);
  return current;
}

RecursionSchedule predict_schedule(unsigned level, Real eta) {
  RecursionSchedule s;
  s.level = level;
  s.m = 1;
  for (unsigned q = 0; q < level; ++q) s.m *= 3;
  const Real m1 = static_cast<Real>(s.m - 1);
  s.g = std::pow(Real(3), m1 / 4);
  s.h = std::pow(Real(3), 3 * m1 / 4);
  s.epsilon = std::pow(std::pow(Real(3), Real(0.75)) * kWorkingEta, static_cast<Real>(s.m));
  s.eta = eta;
  const Real power = std::pow(eta, static_cast<Real>(s.m));
  s.predicted_marked = s.g * power;
  s.predicted_unmarked = s.h * power;
  s.in_regime = eta > 0 && eta <= kWorkingEta;
  return s;
}

RecursionSchedule advance_schedule(const RecursionSchedule& s) {
  RecursionSchedule n = s;
  n.level = s.level + 1;
  n.m = 3 * s.m;
  n.g = std::sqrt(Real(3)) * s.g * s.g * s.g;
  n.h = std::pow(Real(3), Real(1.5)) * s.h * s.h * s.h;
  n.epsilon = s.epsilon * s.epsilon * s.epsilon;
  const Real power = std::pow(s.eta, static_cast<Real>(n.m));
  n.predicted_marked = n.g * power;
  n.predicted_unmarked = n.h * power;
  return n;
}

}  // namespace eigenmark
