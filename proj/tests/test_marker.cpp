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

#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "eigenmark/fpqs.hpp"
#include "eigenmark/marker.hpp"

using namespace eigenmark;

namespace {

struct Setup {
  SpectralUnitary spec;
  ResolvedTarget resolved;
  LinearOperator shifted;
  WorkspaceLayout layout;
};

Setup make_setup(std::vector<Real> phases, Real marked, Real gap, const WorkspaceLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = phases.size();
  SpectralUnitary spec(std::move(phases), random_unitary(n, rng), gap);
  MarkTarget t;
  t.marked_phase = marked;
  auto r = resolve_target(spec, t);
  auto s = build_shifted(spec, r);
  return Setup{spec, r, s, layout};
}

/// Every shifted phase on the 2^3 grid, window 1: phase estimation is exact.
Setup grid() {
  const Real step = 2 * kPi / 8;
  return make_setup({0, 3 * step, 4 * step}, 0, 0.9L, WorkspaceLayout(3, 1), 2);
}

/// Calibrated at gap 0.9 with the marked phase at the worst calibrated offset.
const Setup& calibrated() {
  static const Setup s = [] {
    const auto cal = calibrate_workspace(0.9L, kDefaultAccuracyFraction);
    const Real m = cal.worst_marked_lambda;
    return make_setup({m, m - 0.9L * 1.001L}, m, 0.9L, cal.layout(), 4);
  }();
  return s;
}

MarkerErrorReport evaluate(const Setup& s, Variant v, unsigned k, Real phi, Index n_random = 2) {
  const auto a = build_marker(v, s.shifted, s.layout, k, phi);
  std::mt19937_64 rng(11);
  return evaluate_marker(a, s.spec, s.resolved, n_random, rng);
}

Real global_eta(const Setup& s) {
  return measure_eta(build_pea(s.shifted, s.layout), s.spec, s.resolved, s.layout).eta;
}

}  // namespace

TEST_CASE("variant names") {
  for (auto v : {Variant::pea, Variant::voting, Variant::fixed_point}) CHECK(variant_from_string(to_string(v)) == v);
  CHECK(to_string(Variant::fixed_point) == "fixed_point");
  CHECK_THROWS(variant_from_string("grover"));
}

TEST_CASE("zero phase gives the identity") {
  const auto s = grid();
  for (auto [v, k] : {std::pair{Variant::pea, 0u}, {Variant::fixed_point, 1u}, {Variant::voting, 3u}}) {
    const auto layout = v == Variant::voting ? WorkspaceLayout(2, 0) : s.layout;
    const auto a = build_marker(v, s.shifted, layout, k, 0);
    const auto m = dense_materialize(a.marker);
    CHECK(max_abs_diff(m, DenseMatrix::identity(m.rows())) < 1e-12L);
  }
}

TEST_CASE("exact phase estimation yields the ideal marker on every variant") {
  const auto s = grid();
  for (auto [v, k] : {std::pair{Variant::pea, 0u}, {Variant::fixed_point, 1u}, {Variant::voting, 3u}}) {
    const auto r = evaluate(s, v, k, kPi);
    CHECK(r.worst_residual < 1e-12L);
    CHECK(r.superposition_residual < 1e-12L);
    CHECK(r.directions.size() == 3);
  }
}

TEST_CASE("marker is unitary and additive in phi") {
  const auto s = make_setup({0.011L, 1.2L, -1.5L}, 0.011L, 0.9L, WorkspaceLayout(3, 1), 6);
  for (auto [v, k] : {std::pair{Variant::pea, 0u}, {Variant::fixed_point, 1u}, {Variant::voting, 3u}}) {
    // three registers of three qubits would make the dense product slow
    const auto layout = v == Variant::voting ? WorkspaceLayout(2, 0) : s.layout;
    const auto m1 = dense_materialize(build_marker(v, s.shifted, layout, k, 0.4L).marker);
    const auto m2 = dense_materialize(build_marker(v, s.shifted, layout, k, 1.3L).marker);
    const auto m12 = dense_materialize(build_marker(v, s.shifted, layout, k, 1.7L).marker);
    CHECK(unitarity_defect(m1) < 1e-12L);
    CHECK(max_abs_diff(m1 * m2, m12) < 1e-12L);
  }
}

TEST_CASE("ancillas and counters") {
  const auto s = grid();
  CHECK(build_marker(Variant::pea, s.shifted, s.layout, 0, kPi).ancillas() == 3);
  CHECK(build_marker(Variant::fixed_point, s.shifted, s.layout, 2, kPi).ancillas() == 3);
  CHECK(build_marker(Variant::voting, s.shifted, s.layout, 3, kPi).ancillas() == 9);
  CHECK_THROWS(build_marker(Variant::voting, s.shifted, s.layout, 2, kPi));
  const auto r = evaluate(s, Variant::fixed_point, 2, kPi);
  CHECK(r.counters == ComplexityCounters{81 * 8, 3, 81});
  CHECK(r.marker_counters == ComplexityCounters{2 * 81 * 8, 3, 2 * 81});
  const auto h = evaluate(s, Variant::voting, 3, kPi);
  CHECK(h.counters == ComplexityCounters{3 * 8, 9, 3});
}

TEST_CASE("phase estimation marker residual halves with two more qubits") {
  const Real gap = 0.5L;
  auto worst = [&](unsigned mu) {
    const auto cal = best_window(gap, kDefaultAccuracyFraction, mu);
    const Real m = std::min(cal.worst_marked_lambda, gap * kDefaultAccuracyFraction * (1 - 1e-9L));
    const auto s = make_setup({m, m - gap * 1.001L}, m, gap, cal.layout(), 9);
    return evaluate(s, Variant::pea, 0, kPi, 0).worst_residual;
  };
  const Real ratio = worst(10) / worst(8);
  CHECK(ratio > 0.35L);
  CHECK(ratio < 0.7L);
}

TEST_CASE("one recursion level meets the cubic bound") {
  const auto& s = calibrated();
  const Real eta = global_eta(s);
  REQUIRE(eta <= kWorkingEta);
  const auto sched = predict_schedule(1, eta);
  const auto r = evaluate(s, Variant::fixed_point, 1, kPi);
  for (const auto& d : r.directions) {
    const Real bound = 4 * (d.marked ? sched.predicted_marked : sched.predicted_unmarked) * (1 + 10 * eta * eta);
    CHECK(d.residual <= bound);
  }
  CHECK(r.worst_residual <= 4 * std::sqrt(Real(3)) * eta * eta * eta * 3 * (1 + 10 * eta * eta));
  CHECK(r.superposition_residual <= r.worst_residual * (1 + 1e-9L));
}

TEST_CASE("second level improves on the first by the schedule ratio") {
  const auto& s = calibrated();
  const auto r1 = evaluate(s, Variant::fixed_point, 1, kPi, 0);
  const auto r2 = evaluate(s, Variant::fixed_point, 2, kPi, 0);
  const Real ratio = predict_schedule(2, kWorkingEta).epsilon / predict_schedule(1, kWorkingEta).epsilon;
  CHECK(r2.worst_residual / r1.worst_residual <= 10 * ratio);
  CHECK(r2.worst_residual <= 8.3e-11L);
}

TEST_CASE("report serialization") {
  const auto s = grid();
  const auto r = evaluate(s, Variant::fixed_point, 1, kPi);
  const auto j = to_json(r);
  CHECK(j.at("variant") == "fixed_point");
  CHECK(j.at("mu") == 3);
  CHECK(j.at("directions").size() == 3);
  CHECK(j.at("counters").at("N_P") == 9);
  CHECK(j.contains("marker_counters"));
  const auto rows = to_csv_rows(r);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
  CHECK(rows.rfind("0,", 0) == 0);
  CHECK(rows.find(",fixed_point,3,1,72,3\n") != std::string::npos);
  CHECK(format_real(0.5L) == "0.5");
  CHECK(format_real(1e-20L) == "1e-20");
}
