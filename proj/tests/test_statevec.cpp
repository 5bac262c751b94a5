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

#include "eigenmark/fpqs.hpp"
#include "eigenmark/pea.hpp"
#include "eigenmark/statevec.hpp"

using namespace eigenmark;

namespace {

LinearOperator hadamard() {
  DenseMatrix h(2, 2);
  const Real s = 1 / std::sqrt(Real(2));
  h(0, 0) = s;
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = -s;
  return dense_operator(h, "H");
}

}  // namespace

TEST_CASE("identity leaves a state unchanged") {
  std::mt19937_64 rng(3);
  JointState st(3, 4, random_unit_vector(12, rng));
  EvaluationContext ctx;
  auto out = apply(identity_operator(12), st, Side::joint, ctx);
  CHECK(distance(out.amplitudes(), st.amplitudes()) == 0);
}

TEST_CASE("hadamard twice is the identity on |0>") {
  JointState st = JointState::basis(1, 2, 0, 0);
  EvaluationContext ctx;
  auto out = apply(hadamard(), apply(hadamard(), st, Side::work, ctx), Side::work, ctx);
  CHECK(std::abs(out.at(0, 0) - Complex(1)) < 1e-12L);
  CHECK(std::abs(out.at(0, 1)) < 1e-12L);
}

TEST_CASE("workspace operator keeps per-main-index weights of a product state") {
  std::mt19937_64 rng(5);
  auto main = random_unit_vector(3, rng);
  auto work = random_unit_vector(2, rng);
  JointState st = JointState::product(main, work);
  EvaluationContext ctx;
  auto out = apply(dense_operator(random_unitary(2, rng)), st, Side::work, ctx);
  for (Index m = 0; m < 3; ++m) {
    const Real before = std::norm(st.at(m, 0)) + std::norm(st.at(m, 1));
    const Real after = std::norm(out.at(m, 0)) + std::norm(out.at(m, 1));
    CHECK(std::abs(before - after) < 1e-12L);
  }
  CHECK(std::abs(out.norm() - 1) < 1e-12L);
}

TEST_CASE("apply rejects dimension mismatches and reports both sizes") {
  JointState st(3, 4);
  EvaluationContext ctx;
  try {
    apply(identity_operator(5), st, Side::work, ctx);
    FAIL("no exception");
  } catch (const DimensionMismatch& e) {
    CHECK(e.expected() == 4);
    CHECK(e.actual() == 5);
  }
  CHECK_THROWS_AS(apply(identity_operator(4), st, Side::main, ctx), DimensionMismatch);
  CHECK_THROWS_AS(apply(identity_operator(4), st, Side::joint, ctx), DimensionMismatch);
}

TEST_CASE("joint state shape is validated") {
  CHECK_THROWS(JointState(2, 3));
  CHECK_THROWS(JointState(0, 2));
  CHECK_THROWS_AS(JointState(2, 2, std::vector<Complex>(3)), DimensionMismatch);
  CHECK(JointState(3, 8).size() == 24);
}

TEST_CASE("subspace amplitude examples") {
  const SubspaceProjector zero(2, {0});
  const Real s = 1 / std::sqrt(Real(2));
  JointState plus(1, 2, {s, s});
  auto a = subspace_amplitude(plus, zero);
  CHECK(a.magnitude == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(std::abs(a.magnitude * a.magnitude + a.complement_magnitude * a.complement_magnitude - 1) < 1e-12L);
  CHECK(subspace_amplitude(JointState::basis(1, 2, 0, 0), zero).magnitude == 1);
  CHECK(subspace_amplitude(JointState::basis(1, 2, 0, 1), zero).magnitude == 0);

  const SubspaceProjector none(2, {});
  auto d = subspace_amplitude(plus, none);
  CHECK(d.degenerate);
  CHECK(d.magnitude == 0);
}

TEST_CASE("projector rejects out-of-range members and is idempotent") {
  CHECK_THROWS(SubspaceProjector(4, {4}));
  SubspaceProjector p(8, {5, 1, 3});
  CHECK(p.members() == std::vector<Index>{1, 3, 5});
  std::mt19937_64 rng(1);
  auto v = random_unit_vector(8, rng);
  p.project(v);
  auto w = v;
  p.project(w);
  CHECK(distance(v, w) == 0);
}

TEST_CASE("dense materialization of a selective phase") {
  auto m = dense_materialize(selective_phase(SubspaceProjector(2, {0}), kPi));
  CHECK(std::abs(m(0, 0) + Complex(1)) < 1e-12L);
  CHECK(std::abs(m(1, 1) - Complex(1)) < 1e-12L);
  CHECK(std::abs(m(0, 1)) < 1e-12L);
}

TEST_CASE("composition materializes to the matrix product") {
  std::mt19937_64 rng(11);
  auto a = random_unitary(8, rng);
  auto b = random_unitary(8, rng);
  auto ab = dense_materialize(compose(dense_operator(a), dense_operator(b)));
  CHECK(max_abs_diff(ab, a * b) < 1e-12L);
  auto prod = dense_materialize(product({dense_operator(a), dense_operator(b), dense_operator(a)}));
  CHECK(max_abs_diff(prod, a * b * a) < 1e-12L);
}

TEST_CASE("dense guard") {
  CHECK_THROWS(dense_materialize(identity_operator(kDenseGuard + 1)));
  CHECK(dense_materialize(identity_operator(4)).rows() == 4);
}

TEST_CASE("phase estimation for one qubit equals the hand-composed blocks") {
  // S = diag(1, e^{i a}) on the main space; per main block: H, then S^z, then H (inverse QFT of one qubit)
  const Real a = 0.7L;
  auto s = diagonal_operator({Complex(1), std::polar(Real(1), a)});
  auto p = dense_materialize(build_pea(s, WorkspaceLayout(1, 0)));
  DenseMatrix expected(4, 4);
  for (Index m = 0; m < 2; ++m) {
    const Complex e = m == 0 ? Complex(1) : std::polar(Real(1), a);
    // H diag(1, e) H
    expected(2 * m + 0, 2 * m + 0) = (Real(1) + e) / Real(2);
    expected(2 * m + 0, 2 * m + 1) = (Real(1) - e) / Real(2);
    expected(2 * m + 1, 2 * m + 0) = (Real(1) - e) / Real(2);
    expected(2 * m + 1, 2 * m + 1) = (Real(1) + e) / Real(2);
  }
  CHECK(max_abs_diff(p, expected) < 1e-12L);
}

TEST_CASE("operators are unitary, agree with their dense form and have consistent adjoints") {
  std::mt19937_64 rng(2);
  auto s = dense_operator(random_unitary(3, rng));
  const WorkspaceLayout layout(3, 1);
  std::vector<LinearOperator> ops = {
      walsh_hadamard(4), quantum_fourier_transform(4), lift_to_workspace(walsh_hadamard(2), 3),
      lift_to_main(s, 4), build_pea(s, layout), build_fixed_point(build_pea(s, layout), 1, 0, layout.window_projector())};
  for (const auto& op : ops) {
    auto m = dense_materialize(op);
    CHECK(unitarity_defect(m) < 1e-12L);
    CHECK(max_abs_diff(dense_materialize(op.adjoint()), m.adjoint()) < 1e-12L);
    for (int t = 0; t < 20; ++t) {
      auto x = random_unit_vector(op.dimension(), rng);
      auto y = random_unit_vector(op.dimension(), rng);
      auto expected = m.multiply(x);
      EvaluationContext ctx;
      auto ay = y;
      op.apply(x, ctx);
      CHECK(distance(x, expected) < 1e-12L);
      op.apply(ay, ctx);
      auto adx = random_unit_vector(op.dimension(), rng);
      auto adx_in = adx;
      op.apply_adjoint(adx, ctx);
      CHECK(std::abs(inner_product(adx_in, ay) - inner_product(adx, y)) < 1e-12L);
    }
  }
}

TEST_CASE("evaluation contexts tally tags, composites count children") {
  auto tagged = LinearOperator(
      2, [](std::span<Complex>, EvaluationContext&) {}, [](std::span<Complex>, EvaluationContext&) {}, {{"X", 1}}, {},
      "x");
  auto pair = compose(tagged, tagged);
  CHECK(pair.cost().at("X") == 2);
  EvaluationContext ctx;
  std::vector<Complex> v(2);
  pair.apply(v, ctx);
  pair.adjoint().apply(v, ctx);
  CHECK(ctx.count("X") == 4);
  CHECK(ctx.count("Y") == 0);
  ctx.reset();
  CHECK(ctx.count("X") == 0);
}

TEST_CASE("random_unitary is unitary") {
  std::mt19937_64 rng(9);
  for (Index n : {1, 2, 5, 16}) CHECK(unitarity_defect(random_unitary(n, rng)) < 1e-12L);
}
