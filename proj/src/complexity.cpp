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

#include "eigenmark/complexity.hpp"

#include <cmath>

#include <fmt/format.h>

#include "eigenmark/fpqs.hpp"

namespace eigenmark {

namespace {

std::string cell(Real x) { return fmt::format("{}", static_cast<double>(x)); }

template <typename T>
std::string cell(const std::optional<T>& x) {
  return x ? fmt::format("{}", *x) : std::string();
}

ComplexityRow row(std::string variant, Real delta, Real eps) {
  ComplexityRow r;
  r.variant = std::move(variant);
  r.delta = delta;
  r.eps = eps;
  return r;
}

std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

ComplexityCounters counters_from(const Tally& tally, std::uint64_t ancillas) {
  auto get = [&](std::string_view name) {
    auto it = tally.find(name);
    return it == tally.end() ? std::uint64_t{0} : it->second;
  };
  return ComplexityCounters{get(kResourceU), ancillas, get(kResourceP)};
}

ComplexityCounters counters_from(const EvaluationContext& ctx, std::uint64_t ancillas) {
  return counters_from(ctx.tallies(), ancillas);
}

Real target_from_invocations(std::uint64_t invocations, Real safety) {
  if (invocations == 0) throw std::invalid_argument("target_from_invocations: Q must be positive");
  const Real eps = safety / static_cast<Real>(invocations);
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("target_from_invocations: eps_target must lie in (0, 1)");
  return eps;
}

RecursionPlan plan_recursion(Real eta, Real eps_target, unsigned max_level) {
  if (!(eta > 0 && eta <= kWorkingEta)) {
    throw std::invalid_argument(fmt::format("plan_recursion: eta {} outside (0, 2^-5]", static_cast<double>(eta)));
  }
  if (!(eps_target > 0 && eps_target < 1)) {
    throw std::invalid_argument("plan_recursion: eps_target must lie in (0, 1)");
  }
  RecursionPlan plan;
  if (eps_target >= eta) {
    plan.level = 0;
    plan.predicted = eta;
    plan.note = "a single phase estimation already meets the target";
    return plan;
  }
  for (unsigned q = 1; q <= max_level; ++q) {
    const auto s = predict_schedule(q, eta);
    if (s.predicted_unmarked <= eps_target) {
      plan.level = q;
      plan.predicted = s.predicted_unmarked;
      return plan;
    }
  }
  throw std::invalid_argument(fmt::format("plan_recursion: target {} needs more than {} levels",
                                          static_cast<double>(eps_target), max_level));
}

unsigned plan_registers(Real eps_target) {
  if (!(eps_target > 0 && eps_target < 1)) throw std::invalid_argument("plan_registers: eps_target must lie in (0, 1)");
  auto nu = static_cast<unsigned>(std::ceil(4 * std::log(1 / eps_target)));
  if (nu % 2 == 0) ++nu;
  return nu;
}

std::vector<ComplexityRow> tabulate(const std::vector<Real>& deltas, const std::vector<Real>& epsilons,
                                    const WorkspaceSizer& sizer) {
  if (deltas.empty() || epsilons.empty()) throw std::invalid_argument("tabulate: grids must be nonempty");
  std::vector<ComplexityRow> rows;
  for (Real delta : deltas) {
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("tabulate: delta must lie in (0, 1)");
    const std::optional<unsigned> mu = sizer ? sizer(delta) : std::nullopt;
    const Real inv_delta = 1 / delta;
    for (Real eps : epsilons) {
      if (!(eps > 0 && eps < 1)) throw std::invalid_argument("tabulate: eps must lie in (0, 1)");
      const Real log_eps = std::log(1 / eps);
      const Real log_delta = std::log(inv_delta);
      const unsigned nu = plan_registers(eps);
      const unsigned q = plan_recursion(kWorkingEta, eps).level;

      auto p = row("P_eps", delta, eps);
      p.n_u_model = inv_delta / (eps * eps);
      p.n_a_model = std::log2(inv_delta / (eps * eps));

      auto h = row("H_eps", delta, eps);
      h.mu = mu;
      h.nu = nu;
      h.n_u_model = inv_delta * log_eps;
      h.n_a_model = log_eps * log_delta;

      auto m = row("M_eps", delta, eps);
      m.nu = nu;
      m.n_u_model = inv_delta * log_eps;
      m.n_a_model = log_delta + log_eps;

      auto f = row("F_eps", delta, eps);
      f.mu = mu;
      f.q = q;
      f.n_u_model = inv_delta * log_eps * log_eps;
      f.n_a_model = log_delta;

      if (mu) {
        const std::uint64_t work = std::uint64_t{1} << *mu;
        h.n_u_measured = nu * work;
        h.n_a = std::uint64_t{nu} * *mu;
        h.n_p = nu;
        f.n_p = pow_u64(9, q);
        f.n_u_measured = *f.n_p * work;
        f.n_a = *mu;
      }
      rows.insert(rows.end(), {p, h, m, f});
    }
  }
  return rows;
}

std::string to_csv(const std::vector<ComplexityRow>& rows) {
  std::string out = std::string(kComplexityCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.variant, cell(r.delta), cell(r.eps), cell(r.mu),
                       cell(r.q), cell(r.nu), cell(r.n_u_model), cell(r.n_u_measured), cell(r.n_a), cell(r.n_p),
                       cell(r.n_a_model));
  }
  return out;
}

}  // namespace eigenmark
