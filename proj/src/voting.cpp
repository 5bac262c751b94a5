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

#include "eigenmark/voting.hpp"

#include <cmath>

#include <fmt/format.h>

namespace eigenmark {

namespace {

unsigned registers_in_window(Index combined, const WorkspaceLayout& layout, unsigned registers) {
  const Index mask = layout.work_dim() - 1;
  unsigned count = 0;
  for (unsigned r = 0; r < registers; ++r) {
    count += layout.in_window((combined >> (r * layout.qubits())) & mask) ? 1 : 0;
  }
  return count;
}

}  // namespace

void VotingModel::validate() const {
  if (registers == 0 || registers % 2 == 0) {
    throw std::invalid_argument(fmt::format("voting: register count must be odd and positive, got {}", registers));
  }
  if (!(wrong_probability >= 0 && wrong_probability <= 1)) {
    throw std::invalid_argument("voting: wrong probability must lie in [0, 1]");
  }
}

Real majority_tail_amplitude(Real wrong_probability, unsigned registers) {
  return majority_tail_amplitude(VotingModel{registers, wrong_probability});
}

Real majority_tail_amplitude(const VotingModel& model) {
  model.validate();
  const unsigned n = model.registers;
  const Real p = model.wrong_probability;
  if (p == 0) return 0;
  if (p == 1) return 1;
  Real tail = 0;
  for (unsigned k = n / 2 + 1; k <= n; ++k) {
    const Real log_binom = std::lgamma(Real(n + 1)) - std::lgamma(Real(k + 1)) - std::lgamma(Real(n - k + 1));
    tail += std::exp(log_binom + k * std::log(p) + (n - k) * std::log1p(-p));
  }
  return std::sqrt(tail);
}

Real hoeffding_amplitude_bound(unsigned registers) {
  if (registers == 0) throw std::invalid_argument("hoeffding_amplitude_bound: need at least one register");
  return std::exp(-static_cast<Real>(registers) / 4);
}

LinearOperator build_h_tensor(const LinearOperator& pea, Index main_dim, const WorkspaceLayout& layout,
                              unsigned registers) {
  if (registers == 0) throw std::invalid_argument("build_h_tensor: need at least one register");
  const Index work_dim = layout.work_dim();
  if (pea.dimension() != main_dim * work_dim) {
    throw DimensionMismatch("build_h_tensor", main_dim * work_dim, pea.dimension());
  }
  const unsigned total_qubits = registers * layout.qubits();
  if (total_qubits >= 8 * sizeof(Index) || main_dim * (Index{1} << total_qubits) > kTensorGuard) {
    throw std::invalid_argument(fmt::format("build_h_tensor: joint dimension main*2^{} exceeds guard 2^18", total_qubits));
  }
  const Index combined = Index{1} << total_qubits;
  const unsigned mu = layout.qubits();

  // P acts on (main, register r); every other register is a spectator.
  auto run = [pea, main_dim, work_dim, combined, registers, mu](std::span<Complex> v, bool adj) {
    EvaluationContext scratch;
    std::vector<Complex> block(main_dim * work_dim);
    for (unsigned step = 0; step < registers; ++step) {
      const unsigned r = adj ? registers - 1 - step : step;
      const unsigned shift = r * mu;
      const Index reg_mask = (work_dim - 1) << shift;
      for (Index rest = 0; rest < combined; ++rest) {
        if (rest & reg_mask) continue;
        for (Index m = 0; m < main_dim; ++m) {
          for (Index z = 0; z < work_dim; ++z) block[m * work_dim + z] = v[m * combined + (rest | (z << shift))];
        }
        adj ? pea.apply_adjoint(block, scratch) : pea.apply(block, scratch);
        for (Index m = 0; m < main_dim; ++m) {
          for (Index z = 0; z < work_dim; ++z) v[m * combined + (rest | (z << shift))] = block[m * work_dim + z];
        }
      }
    }
  };
  const Tally cost = scaled(pea.cost(), registers);
  return LinearOperator(
      main_dim * combined,
      [run, cost](std::span<Complex> v, EvaluationContext& ctx) {
        run(v, false);
        ctx.record(cost);
      },
      [run, cost](std::span<Complex> v, EvaluationContext& ctx) {
        run(v, true);
        ctx.record(cost);
      },
      {}, cost, fmt::format("H[nu={}]", registers));
}

SubspaceProjector majority_projector(const WorkspaceLayout& layout, unsigned registers) {
  VotingModel{registers, 0}.validate();
  const unsigned total_qubits = registers * layout.qubits();
  return SubspaceProjector::from_predicate(Index{1} << total_qubits, [&](Index z) {
    return 2 * registers_in_window(z, layout, registers) > registers;
  });
}

Real majority_loss_amplitude(const JointState& state, const WorkspaceLayout& layout, unsigned registers,
                             bool marked) {
  VotingModel{registers, 0}.validate();
  if (state.work_dim() != (Index{1} << (registers * layout.qubits()))) {
    throw DimensionMismatch("majority_loss_amplitude", Index{1} << (registers * layout.qubits()), state.work_dim());
  }
  Real loss = 0;
  for (Index m = 0; m < state.main_dim(); ++m) {
    for (Index z = 0; z < state.work_dim(); ++z) {
      const unsigned inside = registers_in_window(z, layout, registers);
      const unsigned wrong = marked ? registers - inside : inside;
      if (2 * wrong > registers) loss += std::norm(state.at(m, z));
    }
  }
  return std::sqrt(loss);
}

}  // namespace eigenmark
