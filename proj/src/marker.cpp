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

#include "eigenmark/marker.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "eigenmark/fpqs.hpp"
#include "eigenmark/voting.hpp"

namespace eigenmark {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::pea:
      return "pea";
    case Variant::voting:
      return "voting";
    case Variant::fixed_point:
      return "fixed_point";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "pea") return Variant::pea;
  if (name == "voting") return Variant::voting;
  if (name == "fixed_point") return Variant::fixed_point;
  throw std::invalid_argument("unknown variant '" + name + "' (expected pea, voting or fixed_point)");
}

LinearOperator assemble_marker(const LinearOperator& c, Real phi, const SubspaceProjector& window) {
  if (window.dimension() == 0 || c.dimension() % window.dimension() != 0) {
    throw DimensionMismatch("assemble_marker", window.dimension(), c.dimension());
  }
  const Index main_dim = c.dimension() / window.dimension();
  auto phase = lift_to_workspace(selective_phase(window, phi), main_dim);
  return product({c.adjoint(), phase, c});
}

std::uint64_t MarkerAssembly::ancillas() const {
  return variant == Variant::voting ? std::uint64_t{level_or_registers} * layout.qubits() : layout.qubits();
}

MarkerAssembly build_marker(Variant variant, const LinearOperator& shifted, const WorkspaceLayout& layout,
                            unsigned level_or_registers, Real phi) {
  const Index main_dim = shifted.dimension();
  LinearOperator pea = build_pea(shifted, layout);
  switch (variant) {
    case Variant::pea: {
      auto success = layout.window_projector();
      auto marker = assemble_marker(pea, phi, success);
      return MarkerAssembly{variant, phi, layout, 0, main_dim, pea, std::move(success), marker};
    }
    case Variant::fixed_point: {
      auto success = layout.window_projector();
      auto c = build_fixed_point(pea, level_or_registers, layout.standard_index(), success);
      auto marker = assemble_marker(c, phi, success);
      return MarkerAssembly{variant, phi, layout, level_or_registers, main_dim, c, std::move(success), marker};
    }
    case Variant::voting: {
      VotingModel{level_or_registers, 0}.validate();
      auto c = build_h_tensor(pea, main_dim, layout, level_or_registers);
      auto success = majority_projector(layout, level_or_registers);
      auto marker = assemble_marker(c, phi, success);
      return MarkerAssembly{variant, phi, layout, level_or_registers, main_dim, c, std::move(success), marker};
    }
  }
  throw std::logic_error("build_marker: unhandled variant");
}

MarkerErrorReport evaluate_marker(const MarkerAssembly& assembly, const SpectralUnitary& spec,
                                  const ResolvedTarget& resolved, Index n_random, std::mt19937_64& rng) {
  if (assembly.main_dim != spec.dim()) throw DimensionMismatch("evaluate_marker", spec.dim(), assembly.main_dim);
  const Index work_dim = assembly.work_dim();
  std::vector<Complex> sigma(work_dim);
  sigma[0] = 1;

  MarkerErrorReport report;
  report.variant = assembly.variant;
  report.mu = assembly.layout.qubits();
  report.window = assembly.layout.window();
  report.level_or_registers = assembly.level_or_registers;
  report.phi = assembly.phi;
  report.random_inputs = n_random;
  report.counters = counters_from(assembly.c.cost(), assembly.ancillas());

  const Complex marked_phase = std::polar(Real(1), assembly.phi);
  bool counted = false;
  for (Index i = 0; i < spec.dim(); ++i) {
    const auto psi = spec.eigenvector(i);
    JointState state = JointState::product(psi, sigma);
    std::vector<Complex> expected(state.amplitudes().begin(), state.amplitudes().end());
    if (resolved.marked[i]) {
      for (auto& x : expected) x *= marked_phase;
    }
    EvaluationContext ctx;
    assembly.marker.apply(state.amplitudes(), ctx);
    if (!counted) {
      report.marker_counters = counters_from(ctx, assembly.ancillas());
      counted = true;
    }
    DirectionResidual d;
    d.direction = i;
    d.eigenphase = spec.eigenphases()[i];
    d.marked = resolved.marked[i];
    d.residual = distance(state.amplitudes(), expected);
    report.worst_residual = std::max(report.worst_residual, d.residual);
    report.directions.push_back(d);
  }

  const auto ideal = ideal_marker(spec, resolved, assembly.phi);
  EvaluationContext scratch;
  for (Index r = 0; r < n_random; ++r) {
    auto x = random_unit_vector(spec.dim(), rng);
    JointState state = JointState::product(x, sigma);
    ideal.apply(x, scratch);
    JointState expected = JointState::product(x, sigma);
    assembly.marker.apply(state.amplitudes(), scratch);
    report.superposition_residual =
        std::max(report.superposition_residual, distance(state.amplitudes(), expected.amplitudes()));
  }
  return report;
}

std::string format_real(Real x) { return fmt::format("{}", static_cast<double>(x)); }

nlohmann::json to_json(const MarkerErrorReport& report) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : report.directions) {
    dirs.push_back({{"direction", d.direction},
                    {"eigenphase", static_cast<double>(d.eigenphase)},
                    {"marked", d.marked},
                    {"residual", static_cast<double>(d.residual)}});
  }
  return {{"variant", to_string(report.variant)},
          {"mu", report.mu},
          {"window", report.window},
          {"q_or_nu", report.level_or_registers},
          {"phi", static_cast<double>(report.phi)},
          {"directions", dirs},
          {"worst_residual", static_cast<double>(report.worst_residual)},
          {"superposition_residual", static_cast<double>(report.superposition_residual)},
          {"random_inputs", report.random_inputs},
          {"counters",
           {{"N_U", report.counters.applications_u},
            {"N_A", report.counters.ancillas},
            {"N_P", report.counters.applications_p}}},
          {"marker_counters",
           {{"N_U", report.marker_counters.applications_u},
            {"N_A", report.marker_counters.ancillas},
            {"N_P", report.marker_counters.applications_p}}}};
}

std::string to_csv_rows(const MarkerErrorReport& report) {
  std::string out;
  for (const auto& d : report.directions) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", d.direction, format_real(d.eigenphase), format_real(d.residual),
                       to_string(report.variant), report.mu, report.level_or_registers,
                       report.counters.applications_u, report.counters.ancillas);
  }
  return out;
}

}  // namespace eigenmark
