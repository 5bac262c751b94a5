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

#include <cmath>
#include <cstdio>

#include "doctest.h"

#include "eigenmark/pea.hpp"

using namespace eigenmark;

namespace {

/// Workspace distribution of P|psi>|0> for a one-dimensional main space with S = e^{i lambda}.
std::vector<Real> simulated_distribution(Real lambda, unsigned mu) {
  auto s = diagonal_operator({std::polar(Real(1), lambda)});
  auto p = build_pea(s, WorkspaceLayout(mu, 0));
  std::vector<Complex> v(Index{1} << mu);
  v[0] = 1;
  EvaluationContext ctx;
  p.apply(v, ctx);
  std::vector<Real> out;
  for (const auto& a : v) out.push_back(std::norm(a));
  return out;
}

Real simulated_window_mass(Real lambda, const WorkspaceLayout& layout) {
  const auto d = simulated_distribution(lambda, layout.qubits());
  Real mass = 0;
  for (Index z = 0; z < d.size(); ++z) mass += layout.in_window(z) ? d[z] : 0;
  return mass;
}

}  // namespace

TEST_CASE("layout invariants") {
  CHECK_THROWS(WorkspaceLayout(3, 4));
  CHECK_THROWS(WorkspaceLayout(0, 0));
  const WorkspaceLayout layout(4, 2);
  CHECK(layout.work_dim() == 16);
  const auto z = layout.window_projector();
  const auto zc = layout.complement_projector();
  CHECK(z.members() == std::vector<Index>{0, 1, 2, 14, 15});
  CHECK(z.members().size() + zc.members().size() == 16);
  for (Index i = 0; i < 16; ++i) CHECK(z.contains(i) != zc.contains(i));
}

TEST_CASE("QFT circuit equals the dense DFT") {
  for (unsigned mu = 1; mu <= 6; ++mu) {
    const Index n = Index{1} << mu;
    DenseMatrix dft(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        dft(j, k) = std::polar(1 / std::sqrt(static_cast<Real>(n)),
                               2 * kPi * static_cast<Real>((j * k) % n) / static_cast<Real>(n));
      }
    }
    CHECK(max_abs_diff(dense_materialize(quantum_fourier_transform(mu)), dft) < 1e-12L);
    CHECK(max_abs_diff(dense_materialize(inverse_quantum_fourier_transform(mu)), dft.adjoint()) < 1e-12L);
  }
}

TEST_CASE("one qubit, lambda = 0 leaves |psi>|0> unchanged") {
  SpectralUnitary spec({0, kPi}, 0.5L);
  MarkTarget t;
  t.marked_phase = 0;
  const auto r = resolve_target(spec, t);
  const WorkspaceLayout layout(1, 0);
  const auto p = build_pea(build_shifted(spec, r), layout);
  JointState st = JointState::basis(2, 2, 0, 0);
  EvaluationContext ctx;
  p.apply(st.amplitudes(), ctx);
  CHECK(std::abs(st.at(0, 0) - Complex(1)) < 1e-12L);

  // the lambda = pi direction lands on |1>, which is outside the w = 0 window
  JointState other = JointState::basis(2, 2, 1, 0);
  p.apply(other.amplitudes(), ctx);
  CHECK(std::abs(std::abs(other.at(1, 1)) - 1) < 1e-12L);
  const auto e = measure_eta(p, spec, r, layout);
  CHECK(e.eta < 1e-12L);
}

TEST_CASE("grid point eigenphase lands on its outcome") {
  const auto d = simulated_distribution(2 * kPi * 5 / 8, 3);
  CHECK(d[5] == doctest::Approx(1).epsilon(1e-12));
  for (unsigned mu = 2; mu <= 8; ++mu) {
    const Index n = Index{1} << mu;
    for (Index k : {Index{0}, Index{1}, n / 2 - 1, n - 1}) {
      const auto dk = simulated_distribution(2 * kPi * static_cast<Real>(k) / static_cast<Real>(n), mu);
      CHECK(std::abs(dk[k] - 1) < 1e-12L);
    }
  }
}

TEST_CASE("simulated outcome distribution equals the closed form") {
  for (Real lambda : {0.0123L, -0.4L, 1.7L, 3.0L}) {
    const auto d = simulated_distribution(lambda, 6);
    Real total = 0;
    for (Index z = 0; z < d.size(); ++z) {
      CHECK(std::abs(d[z] - pea_outcome_probability(lambda, 6, z)) < 1e-12L);
      total += pea_outcome_probability(lambda, 6, z);
    }
    CHECK(std::abs(total - 1) < 1e-12L);
    const WorkspaceLayout layout(6, 5);
    CHECK(std::abs(simulated_window_mass(lambda, layout) - pea_window_probability(lambda, layout)) < 1e-12L);
  }
}

TEST_CASE("each application of P costs 2^mu applications of U") {
  std::mt19937_64 rng(2);
  auto s = dense_operator(random_unitary(2, rng), "S", {{"U", 1}});
  for (unsigned mu : {1u, 4u, 7u}) {
    const auto p = build_pea(s, WorkspaceLayout(mu, 0));
    CHECK(p.cost().at("U") == (Index{1} << mu));
    CHECK(p.cost().at("P") == 1);
    EvaluationContext ctx;
    std::vector<Complex> v(p.dimension());
    v[0] = 1;
    p.apply(v, ctx);
    p.apply_adjoint(v, ctx);
    CHECK(ctx.count("U") == 2 * (Index{1} << mu));
    CHECK(ctx.count("P") == 2);
  }
}

TEST_CASE("P keeps eigenstate inputs in product form") {
  std::mt19937_64 rng(12);
  SpectralUnitary spec({0.01L, 1.1L, -2.0L}, random_unitary(3, rng), 0.9L);
  MarkTarget t;
  t.marked_phase = 0.01L;
  const auto r = resolve_target(spec, t);
  const WorkspaceLayout layout(7, 5);
  const auto p = build_pea(build_shifted(spec, r), layout);
  std::vector<Complex> sigma(layout.work_dim());
  sigma[0] = 1;
  for (Index i = 0; i < 3; ++i) {
    const auto psi = spec.eigenvector(i);
    JointState st = JointState::product(psi, sigma);
    EvaluationContext ctx;
    p.apply(st.amplitudes(), ctx);
    // expected workspace state is the one-dimensional result for this eigenphase
    auto s1 = diagonal_operator({std::polar(Real(1), r.shifted_phases[i])});
    auto w = sigma;
    build_pea(s1, layout).apply(w, ctx);
    auto expected = JointState::product(psi, w);
    CHECK(distance(st.amplitudes(), expected.amplitudes()) < 1e-12L);
  }
}

TEST_CASE("measured eta matches the closed form per direction") {
  SpectralUnitary spec({0.002L, 0.41L, -0.5L}, 0.4L);
  MarkTarget t;
  t.marked_phase = 0.002L;
  t.psi_prime = 0;
  const auto r = resolve_target(spec, t);
  // smallest window whose worst marked-side error meets the target at mu = 8
  Index w = 0;
  while (worst_case_eta(0.4L, 0.05L, WorkspaceLayout(8, w), {}).eta_marked > 1.0L / 32) ++w;
  const WorkspaceLayout layout(8, w);
  const auto e = measure_eta(build_pea(build_shifted(spec, r), layout), spec, r, layout);
  CHECK(e.eta_marked <= 1.0L / 32);
  for (const auto& d : e.directions) {
    const Real inside = pea_window_probability(d.shifted_phase, layout);
    const Real expected = std::sqrt(std::max(Real(0), d.marked ? 1 - inside : inside));
    CHECK(std::abs(d.eta - expected) < 1e-9L);
    CHECK(d.eta >= 0);
    CHECK(d.eta <= 1);
  }
  CHECK(e.eta == std::max(e.eta_marked, e.eta_unmarked));
}

TEST_CASE("vacuous target calibrates to one qubit") {
  CalibrationOptions o;
  o.eta_target = 1.0L;
  const auto r = calibrate_workspace(0.4L, 0.05L, o);
  CHECK(r.qubits == 1);
  CHECK(r.window == 0);
}

TEST_CASE("calibration near delta = pi, re-verified by an exhaustive lambda sweep") {
  const Real gap = 3.0L;
  const Real b = 0.05L;
  const auto r = calibrate_workspace(gap, b);
  CHECK(r.eta <= 1.0L / 32);
  const auto layout = r.layout();
  Real worst_marked = 0;
  Real worst_unmarked = 0;
  const int points = 400;
  for (int i = 0; i <= points; ++i) {
    const Real lm = b * gap * static_cast<Real>(i) / points * Real(0.999999);
    worst_marked = std::max(worst_marked, std::sqrt(std::max(Real(0), 1 - simulated_window_mass(lm, layout))));
    const Real lu = gap / 2 * Real(1.000001) + (kPi - gap / 2) * static_cast<Real>(i) / points;
    worst_unmarked = std::max(worst_unmarked, std::sqrt(simulated_window_mass(std::min(lu, kPi), layout)));
  }
  CHECK(worst_marked <= 1.0L / 32);
  CHECK(worst_unmarked <= 1.0L / 32);
  CHECK(worst_marked <= r.eta_marked + 1e-9L);
  std::printf("delta=3.0: mu=%u window=%zu calibrated eta=%.6g sweep eta=%.6g\n", r.qubits, r.window,
              static_cast<double>(r.eta), static_cast<double>(std::max(worst_marked, worst_unmarked)));
}

TEST_CASE("halving delta grows 2^mu by at most a factor of four") {
  unsigned prev = 0;
  for (Real gap : {0.4L, 0.2L, 0.1L, 0.05L}) {
    const auto r = calibrate_workspace(gap, 0.05L);
    CHECK(r.eta <= 1.0L / 32);
    if (prev != 0) {
      CHECK(r.qubits >= prev);
      CHECK(r.qubits <= prev + 2);
    }
    prev = r.qubits;
  }
}

TEST_CASE("calibration failure reports the best layout") {
  CalibrationOptions o;
  o.max_qubits = 6;
  try {
    calibrate_workspace(0.4L, 0.05L, o);
    FAIL("no exception");
  } catch (const CalibrationFailure& e) {
    CHECK(e.best().qubits <= 6);
    CHECK(e.best().eta > 1.0L / 32);
  }
  CHECK_THROWS(calibrate_workspace(0, 0.05L));
  CHECK_THROWS(calibrate_workspace(0.4L, 0.3L));
  o = {};
  o.grid_per_bin = 16;
  CHECK_THROWS(calibrate_workspace(0.4L, 0.05L, o));
}

TEST_CASE("best window balances both error sides") {
  const auto r = best_window(0.4L, 0.05L, 10);
  const auto left = worst_case_eta(0.4L, 0.05L, WorkspaceLayout(10, r.window > 0 ? r.window - 1 : 0), {});
  const auto right = worst_case_eta(0.4L, 0.05L, WorkspaceLayout(10, r.window + 1), {});
  CHECK(r.eta <= left.eta);
  CHECK(r.eta <= right.eta);
}

TEST_CASE("calibration cache round trip") {
  CalibrationCache cache;
  const CalibrationOptions o;
  const auto r = cache.get_or_calibrate(0.9L, 0.05L, o);
  CHECK(cache.size() == 1);
  const auto again = CalibrationCache::from_json(cache.to_json());
  const auto hit = again.find(0.9L, 0.05L, o);
  REQUIRE(hit);
  CHECK(hit->qubits == r.qubits);
  CHECK(hit->window == r.window);
  CHECK_FALSE(again.find(0.8L, 0.05L, o));
  const std::string path = "pea_cache_test.json";
  cache.save(path);
  CHECK(CalibrationCache::load(path).find(0.9L, 0.05L, o)->qubits == r.qubits);
  std::remove(path.c_str());
}
