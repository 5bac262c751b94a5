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

#include "doctest.h"

#include "eigenmark/spectral.hpp"

using namespace eigenmark;

namespace {

MarkTarget target_at(Real psi, Real psi_prime, Real b = kDefaultAccuracyFraction) {
  MarkTarget t;
  t.marked_phase = psi;
  t.psi_prime = psi_prime;
  t.b = b;
  return t;
}

}  // namespace

TEST_CASE("phase helpers wrap onto (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(static_cast<double>(kPi)));
  CHECK(wrap_phase(-kPi) == doctest::Approx(static_cast<double>(kPi)));
  CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(static_cast<double>(-kPi / 2)));
  CHECK(circle_distance(3.1L, -3.1L) == doctest::Approx(static_cast<double>(2 * kPi - 6.2L)));
}

TEST_CASE("exact estimate gives a zero shifted phase on the marked direction") {
  SpectralUnitary spec({0.2L, 1.5L}, 0.5L);
  const auto r = resolve_target(spec, target_at(0.2L, 0.2L));
  CHECK(r.shifted_phases[0] == 0);
  CHECK(r.marked[0]);
  CHECK_FALSE(r.marked[1]);
  CHECK(r.theta_min == doctest::Approx(0.25));
}

TEST_CASE("shifted operator for phases {0, pi}") {
  SpectralUnitary spec({0, kPi}, 0.5L);
  const auto r = resolve_target(spec, target_at(0, 0));
  const auto s = dense_materialize(build_shifted(spec, r));
  CHECK(std::abs(s(0, 0) - Complex(1)) < 1e-12L);
  CHECK(std::abs(s(1, 1) + Complex(1)) < 1e-12L);
  CHECK(std::abs(s(0, 1)) < 1e-12L);
}

TEST_CASE("estimate within b*gap is accepted") {
  SpectralUnitary spec({0.30L, 1.3L}, 0.5L);
  const auto r = resolve_target(spec, target_at(0.30L, 0.31L));
  CHECK(std::abs(r.shifted_phases[0]) == doctest::Approx(0.01));
  CHECK(r.marked_count() == 1);
}

TEST_CASE("violations are rejected with the offending eigenphase") {
  SpectralUnitary close({0.0L, 0.4L}, 0.5L);
  CHECK_THROWS_AS(resolve_target(close, target_at(0, 0)), SpectralError);
  SpectralUnitary spec({0.30L, 1.3L}, 0.5L);
  CHECK_THROWS_AS(resolve_target(spec, target_at(0.30L, 0.33L)), SpectralError);
  CHECK_THROWS_AS(resolve_target(spec, target_at(0.31L, 0.31L)), SpectralError);
  CHECK_THROWS_AS(resolve_target(spec, target_at(0.30L, 0.30L, 0.3L)), SpectralError);

  // a hand-built resolution whose unmarked phase sits inside theta_min
  auto r = resolve_target(spec, target_at(0.30L, 0.30L));
  r.shifted_phases[1] = 0.1L;
  try {
    build_shifted(spec, r);
    FAIL("no exception");
  } catch (const AssumptionViolation& e) {
    CHECK(e.direction() == 1);
    CHECK(e.eigenphase() == doctest::Approx(0.1));
  }
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(SpectralUnitary({0.1L}, 1.0L), SpectralError);
  CHECK_THROWS_AS(SpectralUnitary({0.1L}, 0.0L), SpectralError);
  CHECK_THROWS_AS(SpectralUnitary({}, 0.5L), SpectralError);
  DenseMatrix bad(2, 2);
  bad(0, 0) = 1;
  bad(1, 0) = 1;
  CHECK_THROWS_AS(SpectralUnitary({0.0L, 1.0L}, bad, 0.5L), SpectralError);
}

TEST_CASE("ideal marker examples") {
  SpectralUnitary spec({0, 2.0L}, 0.5L);
  const auto r = resolve_target(spec, target_at(0, 0));
  CHECK(max_abs_diff(dense_materialize(ideal_marker(spec, r, 0)), DenseMatrix::identity(2)) < 1e-12L);
  const auto m = dense_materialize(ideal_marker(spec, r, kPi));
  CHECK(std::abs(m(0, 0) + Complex(1)) < 1e-12L);
  CHECK(std::abs(m(1, 1) - Complex(1)) < 1e-12L);

  // degenerate marked eigenspace of multiplicity two
  SpectralUnitary deg({0.1L, 0.1L, 2.0L, -2.0L}, 0.5L);
  const auto rd = resolve_target(deg, target_at(0.1L, 0.1L));
  CHECK(rd.marked_count() == 2);
  const auto md = dense_materialize(ideal_marker(deg, rd, kPi / 2));
  CHECK(std::abs(md(0, 0) - Complex(0, 1)) < 1e-12L);
  CHECK(std::abs(md(1, 1) - Complex(0, 1)) < 1e-12L);
  CHECK(std::abs(md(2, 2) - Complex(1)) < 1e-12L);
  CHECK(std::abs(md(3, 3) - Complex(1)) < 1e-12L);
}

TEST_CASE("ideal marker in a random basis: unitary, diagonal, additive in phi") {
  std::mt19937_64 rng(4);
  SpectralUnitary spec({0.05L, 1.0L, 2.2L, -1.4L}, random_unitary(4, rng), 0.6L);
  const auto r = resolve_target(spec, target_at(0.05L, 0.06L));
  const auto m1 = dense_materialize(ideal_marker(spec, r, 0.3L));
  const auto m2 = dense_materialize(ideal_marker(spec, r, 1.9L));
  const auto m12 = dense_materialize(ideal_marker(spec, r, 2.2L));
  CHECK(unitarity_defect(m1) < 1e-12L);
  CHECK(max_abs_diff(m1 * m2, m12) < 1e-12L);
  const auto d = spec.eigenbasis().adjoint() * m1 * spec.eigenbasis();
  CHECK(std::abs(d(0, 1)) < 1e-12L);
  CHECK(std::abs(d(0, 0) - std::polar(Real(1), 0.3L)) < 1e-12L);
}

TEST_CASE("shifted operator commutes with U and has the shifted spectrum") {
  std::mt19937_64 rng(8);
  std::vector<Real> phases;
  for (int i = 0; i < 6; ++i) phases.push_back(0.2L + 0.9L * i);
  SpectralUnitary spec(phases, random_unitary(6, rng), 0.8L);
  const auto r = resolve_target(spec, target_at(0.2L, 0.21L));
  const auto u = dense_materialize(build_unitary(spec));
  const auto s = dense_materialize(build_shifted(spec, r));
  CHECK(max_abs_diff(u * s, s * u) < 1e-12L);
  // S = e^{-i psi'} U
  DenseMatrix scaled = u;
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) scaled(i, j) *= std::polar(Real(1), -0.21L);
  }
  CHECK(max_abs_diff(scaled, s) < 1e-12L);
}

TEST_CASE("power hook matches repeated products and tallies k applications") {
  std::mt19937_64 rng(6);
  SpectralUnitary spec({0.3L, 1.7L, -2.0L}, random_unitary(3, rng), 0.5L);
  const auto r = resolve_target(spec, target_at(0.3L, 0.3L));
  const auto s = build_shifted(spec, r);
  REQUIRE(s.has_power());
  const auto s1 = dense_materialize(s);
  DenseMatrix acc = DenseMatrix::identity(3);
  for (int k = 0; k < 37; ++k) acc = acc * s1;
  CHECK(max_abs_diff(dense_materialize(s.power(37)), acc) < 1e-12L);
  CHECK(s.power(37).cost().at("U") == 37);
  CHECK(s.cost().at("U") == 1);
}

TEST_CASE("spectral model json round trip") {
  const auto doc = nlohmann::json::parse(R"({
    "dim": 3, "eigenphases": [0.1, 1.2, -1.3], "eigenbasis": "computational", "delta": 0.6,
    "target": {"psi_prime": 0.11, "b": 0.05, "phi": 1.5, "marked_phase": 0.1}})");
  const auto model = spectral_model_from_json(doc);
  CHECK(model.spectrum.dim() == 3);
  CHECK(model.target.phi == doctest::Approx(1.5));
  const auto again = spectral_model_from_json(spectral_model_to_json(model));
  CHECK(again.spectrum.eigenphases() == model.spectrum.eigenphases());
  CHECK(again.target.marked_phase == model.target.marked_phase);

  CHECK_THROWS_AS(spectral_model_from_json(nlohmann::json::parse(R"({"dim": 2, "eigenphases": [0.1], "delta": 0.5,
      "target": {"psi_prime": 0.1}})")), std::invalid_argument);
  CHECK_THROWS_AS(spectral_model_from_json(nlohmann::json::parse(R"({"eigenphases": [0.1], "delta": 0.5})")),
                  SpectralError);
}
