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

#include "eigenmark/audit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "eigenmark/cli.hpp"
#include "eigenmark/complexity.hpp"
#include "eigenmark/config.hpp"
#include "eigenmark/fpqs.hpp"
#include "eigenmark/marker.hpp"
#include "eigenmark/pea.hpp"
#include "eigenmark/spectral.hpp"
#include "eigenmark/statevec.hpp"
#include "eigenmark/voting.hpp"

namespace eigenmark {

namespace {

constexpr Real kExact = 1e-12L;

std::string f(Real x) { return format_real(x); }

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  void check(const char* module, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
    AuditCheck c{module, name, false, {}};
    try {
      auto [ok, detail] = body();
      c.passed = ok;
      c.detail = std::move(detail);
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    checks_.push_back(std::move(c));
  }

  std::vector<AuditCheck> take() { return std::move(checks_); }

 private:
  std::mt19937_64 rng_;
  std::vector<AuditCheck> checks_;
};

/// ||state - psi (x) w|| where w = (psi^dag (x) 1) state.
Real off_block(const JointState& state, std::span<const Complex> psi) {
  std::vector<Complex> w(state.work_dim());
  for (Index m = 0; m < state.main_dim(); ++m) {
    for (Index z = 0; z < state.work_dim(); ++z) w[z] += std::conj(psi[m]) * state.at(m, z);
  }
  Real acc = 0;
  for (Index m = 0; m < state.main_dim(); ++m) {
    for (Index z = 0; z < state.work_dim(); ++z) acc += std::norm(state.at(m, z) - psi[m] * w[z]);
  }
  return std::sqrt(acc);
}

Real wrong_magnitude(const JointState& state, const SubspaceProjector& good) {
  return subspace_amplitude(state, good).complement_magnitude;
}

/// Two-direction fixture: marked eigenphase at the calibrated worst case,
/// the other one just beyond the gap, in a random eigenbasis.
struct Fixture {
  Real gap;
  CalibrationResult calibration;
  SpectralUnitary spec;
  ResolvedTarget resolved;
  LinearOperator shifted;
  WorkspaceLayout layout;
  LinearOperator pea;
  EtaReport eta;
};

Fixture make_fixture(Real gap, std::mt19937_64& rng) {
  const Real b = kDefaultAccuracyFraction;
  auto cal = calibrate_workspace(gap, b);
  const Real marked = cal.worst_marked_lambda;
  SpectralUnitary spec({marked, marked - gap * Real(1.001)}, random_unitary(2, rng), gap);
  MarkTarget t;
  t.b = b;
  t.marked_phase = marked;
  auto resolved = resolve_target(spec, t);
  auto shifted = build_shifted(spec, resolved);
  auto layout = cal.layout();
  auto pea = build_pea(shifted, layout);
  auto eta = measure_eta(pea, spec, resolved, layout);
  return Fixture{gap, cal, spec, resolved, shifted, layout, pea, eta};
}

/// Small exact setup: every shifted phase sits on the 2^mu grid.
struct GridSetup {
  SpectralUnitary spec;
  ResolvedTarget resolved;
  LinearOperator shifted;
  WorkspaceLayout layout;
};

GridSetup grid_setup(unsigned mu, std::mt19937_64& rng) {
  const Real step = 2 * kPi / static_cast<Real>(Index{1} << mu);
  SpectralUnitary spec({0, 3 * step, -3 * step}, random_unitary(3, rng), Real(0.9));
  MarkTarget t;
  t.marked_phase = 0;
  auto resolved = resolve_target(spec, t);
  auto shifted = build_shifted(spec, resolved);
  return GridSetup{spec, resolved, shifted, WorkspaceLayout(mu, 1)};
}

std::uint64_t pow9(unsigned q) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < q; ++i) r *= 9;
  return r;
}

}  // namespace

std::vector<AuditCheck> run_audit(std::uint64_t seed) {
  Suite s(seed);
  auto& rng = s.rng();

  const auto grid = grid_setup(4, rng);
  const auto grid_pea = build_pea(grid.shifted, grid.layout);
  const auto grid_f1 = build_fixed_point(grid_pea, 1, 0, grid.layout.window_projector());

  // operators exercised by the generic checks
  std::vector<std::pair<std::string, LinearOperator>> ops = {
      {"walsh_hadamard(5)", walsh_hadamard(5)},
      {"qft(5)", quantum_fourier_transform(5)},
      {"controlled_powers", controlled_powers(grid.shifted, grid.layout)},
      {"pea", grid_pea},
      {"fixed_point(1)", grid_f1},
      {"selective_phase", selective_phase(grid.layout.window_projector(), Real(0.7))},
      {"h_tensor(3)", build_h_tensor(build_pea(grid.shifted, WorkspaceLayout(2, 0)), 3, WorkspaceLayout(2, 0), 3)},
      {"marker(fixed_point,1)", build_marker(Variant::fixed_point, grid.shifted, grid.layout, 1, kPi).marker},
  };

  // ---- statevec
  s.check("statevec", "norm_preservation", [&] {
    Real worst = 0;
    for (const auto& [name, op] : ops) {
      auto v = random_unit_vector(op.dimension(), rng);
      EvaluationContext ctx;
      op.apply(v, ctx);
      worst = std::max(worst, std::abs(norm2(v) - 1));
    }
    return std::pair{worst <= kExact, "max |norm-1| = " + f(worst)};
  });
  s.check("statevec", "adjoint_roundtrip", [&] {
    Real worst = 0;
    for (const auto& [name, op] : ops) {
      auto v = random_unit_vector(op.dimension(), rng);
      auto w = v;
      EvaluationContext ctx;
      op.apply(w, ctx);
      op.apply_adjoint(w, ctx);
      worst = std::max(worst, distance(v, w));
    }
    return std::pair{worst <= kExact, "max ||A^dag A x - x|| = " + f(worst)};
  });
  std::vector<DenseMatrix> dense;
  for (const auto& [name, op] : ops) dense.push_back(dense_materialize(op));
  s.check("statevec", "dense_unitarity", [&] {
    Real worst = 0;
    for (const auto& m : dense) worst = std::max(worst, unitarity_defect(m));
    return std::pair{worst <= kExact, "max ||M^dag M - 1||_max = " + f(worst)};
  });
  s.check("statevec", "dense_agreement", [&] {
    Real worst = 0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      for (int trial = 0; trial < 20; ++trial) {
        auto v = random_unit_vector(ops[k].second.dimension(), rng);
        auto expected = dense[k].multiply(v);
        EvaluationContext ctx;
        ops[k].second.apply(v, ctx);
        worst = std::max(worst, distance(v, expected));
      }
    }
    return std::pair{worst <= kExact, "20 random vectors per operator, max deviation " + f(worst)};
  });
  s.check("statevec", "adjoint_inner_product", [&] {
    Real worst = 0;
    for (const auto& [name, op] : ops) {
      auto x = random_unit_vector(op.dimension(), rng);
      auto y = random_unit_vector(op.dimension(), rng);
      auto ay = y;
      auto adx = x;
      EvaluationContext ctx;
      op.apply(ay, ctx);
      op.apply_adjoint(adx, ctx);
      worst = std::max(worst, std::abs(inner_product(x, ay) - inner_product(adx, y)));
    }
    return std::pair{worst <= kExact, "max |<x,Ay> - <A^dag x,y>| = " + f(worst)};
  });
  s.check("statevec", "projector_idempotent", [&] {
    bool ok = true;
    for (unsigned mu = 1; mu <= 6; ++mu) {
      const WorkspaceLayout layout(mu, (Index{1} << (mu - 1)) / 2);
      const auto p = layout.window_projector();
      auto v = random_unit_vector(p.dimension(), rng);
      p.project(v);
      auto w = v;
      p.project(w);
      ok = ok && distance(v, w) == 0 && std::is_sorted(p.members().begin(), p.members().end());
      ok = ok && std::all_of(p.members().begin(), p.members().end(), [&](Index i) { return i < p.dimension(); });
      const auto c = p.complement();
      ok = ok && p.members().size() + c.members().size() == p.dimension();
      for (Index i = 0; i < p.dimension(); ++i) ok = ok && (p.contains(i) != c.contains(i));
    }
    return std::pair{ok, std::string("window projectors for mu = 1..6")};
  });
  s.check("statevec", "subspace_amplitude_partition", [&] {
    Real worst = 0;
    const auto p = grid.layout.window_projector();
    for (int trial = 0; trial < 10; ++trial) {
      JointState st(3, grid.layout.work_dim(), random_unit_vector(3 * grid.layout.work_dim(), rng));
      const auto a = subspace_amplitude(st, p);
      worst = std::max(worst, std::abs(a.magnitude * a.magnitude + a.complement_magnitude * a.complement_magnitude - 1));
    }
    return std::pair{worst <= kExact, "max |m^2 + m_perp^2 - 1| = " + f(worst)};
  });

  // ---- spectral
  s.check("spectral", "ideal_marker_unitary_diagonal", [&] {
    const auto m = dense_materialize(ideal_marker(grid.spec, grid.resolved, kPi / 2));
    const auto& basis = grid.spec.eigenbasis();
    const auto in_basis = basis.adjoint() * m * basis;
    Real off = 0;
    for (Index r = 0; r < in_basis.rows(); ++r) {
      for (Index c = 0; c < in_basis.cols(); ++c) {
        if (r != c) off = std::max(off, std::abs(in_basis(r, c)));
      }
    }
    const Real defect = unitarity_defect(m);
    return std::pair{off <= kExact && defect <= kExact, "off-diagonal " + f(off) + ", unitarity " + f(defect)};
  });
  s.check("spectral", "ideal_marker_composition", [&] {
    const Real a = 0.4L;
    const Real b = 1.3L;
    const auto lhs = dense_materialize(ideal_marker(grid.spec, grid.resolved, a)) *
                     dense_materialize(ideal_marker(grid.spec, grid.resolved, b));
    const auto rhs = dense_materialize(ideal_marker(grid.spec, grid.resolved, a + b));
    const Real d = max_abs_diff(lhs, rhs);
    return std::pair{d <= kExact, "max deviation " + f(d)};
  });
  s.check("spectral", "shifted_commutes_with_u", [&] {
    std::vector<Real> phases;
    for (Index i = 0; i < 8; ++i) phases.push_back(i == 0 ? Real(0.1) : Real(0.1) + Real(0.75) * static_cast<Real>(i));
    SpectralUnitary spec(phases, random_unitary(8, rng), Real(0.7));
    MarkTarget t;
    t.marked_phase = 0.1L;
    t.psi_prime = 0.11L;
    const auto r = resolve_target(spec, t);
    const auto u = dense_materialize(build_unitary(spec));
    const auto sh = dense_materialize(build_shifted(spec, r));
    const Real d = max_abs_diff(u * sh, sh * u);
    return std::pair{d <= kExact, "dim 8, max |US - SU| = " + f(d)};
  });
  s.check("spectral", "gap_assumption_enforced", [&] {
    bool rejected_gap = false;
    bool rejected_estimate = false;
    try {
      SpectralUnitary spec({0, 0.3L}, 0.5L);
      MarkTarget t;
      t.marked_phase = 0;
      resolve_target(spec, t);
    } catch (const SpectralError&) {
      rejected_gap = true;
    }
    try {
      SpectralUnitary spec({0.30L, 1.2L}, 0.5L);
      MarkTarget t;
      t.marked_phase = 0.30L;
      t.psi_prime = 0.33L;
      resolve_target(spec, t);
    } catch (const SpectralError&) {
      rejected_estimate = true;
    }
    SpectralUnitary spec({0.30L, 1.2L}, 0.5L);
    MarkTarget t;
    t.marked_phase = 0.30L;
    t.psi_prime = 0.31L;
    const auto r = resolve_target(spec, t);
    const bool accepted = r.marked_count() == 1;
    return std::pair{rejected_gap && rejected_estimate && accepted,
                     fmt::format("gap violation rejected={}, |psi'-psi|>=b*delta rejected={}, valid accepted={}",
                                 rejected_gap, rejected_estimate, accepted)};
  });

  // ---- pea
  s.check("pea", "grid_exactness", [&] {
    const auto e = measure_eta(grid_pea, grid.spec, grid.resolved, grid.layout);
    bool in_range = true;
    for (const auto& d : e.directions) in_range = in_range && d.eta >= 0 && d.eta <= 1;
    return std::pair{e.eta <= kExact && in_range, "mu=4 grid-aligned phases, eta = " + f(e.eta)};
  });
  s.check("pea", "block_structure", [&] {
    Real worst = 0;
    const auto spec = SpectralUnitary({0.05L, 1.0L, -1.2L}, random_unitary(3, rng), 0.9L);
    MarkTarget t;
    t.marked_phase = 0.05L;
    t.psi_prime = 0.07L;
    const auto r = resolve_target(spec, t);
    const auto p = build_pea(build_shifted(spec, r), WorkspaceLayout(6, 3));
    std::vector<Complex> sig6(64);
    sig6[0] = 1;
    for (Index i = 0; i < spec.dim(); ++i) {
      const auto psi = spec.eigenvector(i);
      JointState st = JointState::product(psi, sig6);
      EvaluationContext ctx;
      p.apply(st.amplitudes(), ctx);
      worst = std::max(worst, off_block(st, psi));
    }
    return std::pair{worst <= kExact, "off-block residual " + f(worst)};
  });
  s.check("pea", "qft_matches_dft", [&] {
    const unsigned mu = 5;
    const Index n = Index{1} << mu;
    DenseMatrix dft(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        dft(j, k) = std::polar(1 / std::sqrt(static_cast<Real>(n)),
                               2 * kPi * static_cast<Real>((j * k) % n) / static_cast<Real>(n));
      }
    }
    const Real d = max_abs_diff(dense_materialize(quantum_fourier_transform(mu)), dft);
    return std::pair{d <= kExact, "mu=5 circuit vs dense DFT, max deviation " + f(d)};
  });
  s.check("pea", "error_law", [&] {
    const Real gap = 0.4L;
    Real worst = 0;
    for (unsigned mu = 6; mu <= 12; ++mu) {
      const auto r = best_window(gap, kDefaultAccuracyFraction, mu);
      worst = std::max(worst, r.eta * std::sqrt(std::ldexp(Real(1), static_cast<int>(mu)) * gap));
    }
    return std::pair{worst <= 10, "delta=0.4, mu=6..12: max eta*sqrt(2^mu delta) = " + f(worst)};
  });

  // shared calibrated fixture for the recursion and marker checks
  const Fixture fx = make_fixture(0.9L, rng);
  s.check("pea", "calibration_reverified", [&] {
    const bool ok = fx.eta.eta <= kWorkingEta && fx.calibration.eta <= kWorkingEta;
    return std::pair{ok, fmt::format("delta=0.9: mu={} window={} calibrated eta={} simulated eta={}",
                                     fx.layout.qubits(), fx.layout.window(), f(fx.calibration.eta), f(fx.eta.eta))};
  });

  // ---- fpqs
  s.check("fpqs", "exact_cubing_random_v", [&] {
    Real worst = 0;
    for (int trial = 0; trial < 24; ++trial) {
      const unsigned mu = 1 + static_cast<unsigned>(trial % 6);
      const Index n = Index{1} << mu;
      std::uniform_int_distribution<Index> wdist(0, (n / 2) - 1);
      const WorkspaceLayout layout(mu, mu == 1 ? 0 : wdist(rng));
      const auto v = dense_operator(random_unitary(n, rng));
      const auto good = layout.window_projector();
      JointState st = JointState::basis(1, n, 0, 0);
      JointState a = st;
      EvaluationContext ctx;
      v.apply(a.amplitudes(), ctx);
      const Real eta = wrong_magnitude(a, good);
      pi3_compress(v, 0, good).apply(st.amplitudes(), ctx);
      worst = std::max(worst, std::abs(wrong_magnitude(st, good) - eta * eta * eta));
    }
    return std::pair{worst <= kExact, "24 random V (dim 2..64), max |eta_out - eta^3| = " + f(worst)};
  });
  s.check("fpqs", "measured_vs_predicted", [&] {
    bool ok = true;
    std::string detail;
    const Real eta = fx.eta.eta;
    std::vector<Complex> sigma(fx.layout.work_dim());
    sigma[0] = 1;
    for (unsigned q : {1u, 2u}) {
      const auto fp = build_fixed_point(fx.pea, q, 0, fx.layout.window_projector());
      const auto sc = predict_schedule(q, eta);
      const Real slack = 1 + 10 * eta * eta;
      for (Index i = 0; i < fx.spec.dim(); ++i) {
        JointState st = JointState::product(fx.spec.eigenvector(i), sigma);
        EvaluationContext ctx;
        fp.apply(st.amplitudes(), ctx);
        const auto a = subspace_amplitude(st, fx.layout.window_projector());
        const bool marked = fx.resolved.marked[i];
        const Real wrong = marked ? a.complement_magnitude : a.magnitude;
        const Real bound = (marked ? sc.predicted_marked : sc.predicted_unmarked) * slack;
        ok = ok && wrong <= bound && wrong <= sc.epsilon;
        detail += fmt::format("q={} {}: {} <= {}; ", q, marked ? "marked" : "unmarked", f(wrong), f(bound));
      }
    }
    return std::pair{ok, detail + "eta=" + f(eta)};
  });
  s.check("fpqs", "recurrence_identity", [&] {
    Real worst = 0;
    const Real eta = kWorkingEta;
    auto s_prev = predict_schedule(0, eta);
    for (unsigned q = 1; q <= 6; ++q) {
      const auto closed = predict_schedule(q, eta);
      const auto rec = advance_schedule(s_prev);
      worst = std::max({worst, std::abs(rec.g / closed.g - 1), std::abs(rec.h / closed.h - 1),
                        std::abs(rec.epsilon / closed.epsilon - 1)});
      if (rec.m != closed.m) worst = 1;
      s_prev = closed;
    }
    return std::pair{worst <= kExact, "q <= 6, max relative deviation " + f(worst)};
  });
  s.check("fpqs", "counter_law", [&] {
    bool ok = true;
    for (unsigned q = 0; q <= 3; ++q) {
      const auto c = counters_from(build_fixed_point(grid_pea, q, 0, grid.layout.window_projector()).cost(), 4);
      ok = ok && c.applications_p == pow9(q) && c.applications_u == pow9(q) * grid.layout.work_dim();
    }
    EvaluationContext ctx;
    auto v = random_unit_vector(grid_f1.dimension(), rng);
    grid_f1.apply(v, ctx);
    ok = ok && ctx.count(kResourceP) == 9 && ctx.count(kResourceU) == 9 * grid.layout.work_dim();
    return std::pair{ok, std::string("q=0..3: N_P = 9^q, N_U = 9^q 2^mu")};
  });
  s.check("fpqs", "block_locality", [&] {
    Real worst = 0;
    const auto fp = build_fixed_point(fx.pea, 1, 0, fx.layout.window_projector());
    std::vector<Complex> sigma(fx.layout.work_dim());
    sigma[0] = 1;
    for (Index i = 0; i < fx.spec.dim(); ++i) {
      const auto psi = fx.spec.eigenvector(i);
      JointState st = JointState::product(psi, sigma);
      EvaluationContext ctx;
      fp.apply(st.amplitudes(), ctx);
      worst = std::max(worst, off_block(st, psi));
    }
    return std::pair{worst <= kExact, "P(1,1) off-block residual " + f(worst)};
  });

  // ---- voting
  s.check("voting", "tensor_matches_binomial", [&] {
    Real worst = 0;
    const WorkspaceLayout layout(3, 0);
    const SpectralUnitary spec({0.11L, -1.3L}, random_unitary(2, rng), 0.9L);
    MarkTarget t;
    t.b = 0.25L;
    t.marked_phase = 0.11L;
    const auto r = resolve_target(spec, t);
    const auto pea = build_pea(build_shifted(spec, r), layout);
    const auto e = measure_eta(pea, spec, r, layout);
    for (unsigned nu : {1u, 3u, 5u}) {
      const auto h = build_h_tensor(pea, spec.dim(), layout, nu);
      std::vector<Complex> sigma(Index{1} << (3 * nu));
      sigma[0] = 1;
      for (Index i = 0; i < spec.dim(); ++i) {
        JointState st = JointState::product(spec.eigenvector(i), sigma);
        EvaluationContext ctx;
        h.apply(st.amplitudes(), ctx);
        const Real tensor = majority_loss_amplitude(st, layout, nu, r.marked[i]);
        const Real p = e.directions[i].eta * e.directions[i].eta;
        worst = std::max(worst, std::abs(tensor - majority_tail_amplitude(p, nu)));
      }
    }
    return std::pair{worst <= 1e-10L, "nu in {1,3,5}, mu=3: max deviation " + f(worst)};
  });
  s.check("voting", "tail_monotone", [&] {
    bool ok = true;
    for (Real p : {0.01L, 0.1L, 0.3L, 0.45L}) {
      for (unsigned nu = 1; nu + 2 <= 41; nu += 2) {
        ok = ok && majority_tail_amplitude(p, nu + 2) < majority_tail_amplitude(p, nu);
      }
    }
    return std::pair{ok, std::string("p in {0.01,0.1,0.3,0.45}, odd nu <= 41")};
  });
  s.check("voting", "hoeffding_bound", [&] {
    Real worst_ratio = 0;
    const Real p = std::ldexp(Real(1), -10);
    for (unsigned nu = 1; nu <= 41; nu += 2) {
      worst_ratio = std::max(worst_ratio, majority_tail_amplitude(p, nu) / hoeffding_amplitude_bound(nu));
    }
    return std::pair{worst_ratio <= 1, "p=2^-10, odd nu <= 41: max tail/bound = " + f(worst_ratio)};
  });

  // ---- marker
  s.check("marker", "unitarity", [&] {
    Real worst = 0;
    for (auto v : {Variant::pea, Variant::fixed_point}) {
      worst = std::max(worst, unitarity_defect(dense_materialize(
                                  build_marker(v, grid.shifted, grid.layout, v == Variant::pea ? 0 : 1, 2.1L).marker)));
    }
    const WorkspaceLayout small(2, 0);
    worst = std::max(worst, unitarity_defect(dense_materialize(
                                build_marker(Variant::voting, grid.shifted, small, 3, 2.1L).marker)));
    return std::pair{worst <= kExact, "pea, fixed_point(1), voting(3): max defect " + f(worst)};
  });
  std::vector<MarkerErrorReport> reports;
  s.check("marker", "workspace_restoration", [&] {
    bool ok = true;
    Real worst = 0;
    for (unsigned q : {0u, 1u, 2u}) {
      const auto a = build_marker(Variant::fixed_point, fx.shifted, fx.layout, q, kPi);
      auto r = evaluate_marker(a, fx.spec, fx.resolved, 3, rng);
      for (const auto& d : r.directions) {
        std::vector<Complex> sigma(fx.layout.work_dim());
        sigma[0] = 1;
        const auto psi = fx.spec.eigenvector(d.direction);
        JointState st = JointState::product(psi, sigma);
        EvaluationContext ctx;
        a.marker.apply(st.amplitudes(), ctx);
        // the workspace part outside sigma never exceeds the residual
        Real leak = 0;
        for (Index m = 0; m < st.main_dim(); ++m) {
          for (Index z = 1; z < st.work_dim(); ++z) leak += std::norm(st.at(m, z));
        }
        leak = std::sqrt(leak);
        ok = ok && leak <= d.residual + kExact && d.residual <= r.worst_residual;
        worst = std::max(worst, d.residual);
      }
      reports.push_back(std::move(r));
    }
    return std::pair{ok, "fixed_point q=0..2 at delta=0.9, worst residual " + f(worst)};
  });
  s.check("marker", "superposition_bound", [&] {
    bool ok = !reports.empty();
    Real gap = -1;
    for (const auto& r : reports) {
      ok = ok && r.superposition_residual <= r.worst_residual + 1e-10L;
      gap = std::max(gap, r.superposition_residual - r.worst_residual);
    }
    return std::pair{ok, "max (superposition - worst) = " + f(gap)};
  });
  s.check("marker", "envelope", [&] {
    bool ok = reports.size() == 3;
    std::string detail;
    for (unsigned q = 1; q < reports.size(); ++q) {
      const auto sc = predict_schedule(q, fx.eta.eta);
      const Real bound = 4 * sc.predicted_unmarked;
      ok = ok && reports[q].worst_residual <= bound;
      detail += fmt::format("q={}: {} <= {}; ", q, f(reports[q].worst_residual), f(bound));
    }
    return std::pair{ok, detail};
  });
  s.check("marker", "phi_additivity", [&] {
    const Real a = 0.9L;
    const Real b = 1.7L;
    const auto m1 = build_marker(Variant::fixed_point, grid.shifted, grid.layout, 1, a);
    const auto m2 = build_marker(Variant::fixed_point, grid.shifted, grid.layout, 1, b);
    const auto m12 = build_marker(Variant::fixed_point, grid.shifted, grid.layout, 1, a + b);
    auto r1 = evaluate_marker(m1, grid.spec, grid.resolved, 0, rng).worst_residual;
    auto r2 = evaluate_marker(m2, grid.spec, grid.resolved, 0, rng).worst_residual;
    Real worst = 0;
    std::vector<Complex> sigma(grid.layout.work_dim());
    sigma[0] = 1;
    for (int trial = 0; trial < 4; ++trial) {
      auto x = JointState::product(random_unit_vector(grid.spec.dim(), rng), sigma);
      auto y = x;
      EvaluationContext ctx;
      m2.marker.apply(x.amplitudes(), ctx);
      m1.marker.apply(x.amplitudes(), ctx);
      m12.marker.apply(y.amplitudes(), ctx);
      worst = std::max(worst, distance(x.amplitudes(), y.amplitudes()));
    }
    return std::pair{worst <= r1 + r2 + 1e-10L, "deviation " + f(worst) + " vs r1+r2 = " + f(r1 + r2)};
  });
  s.check("marker", "identity_at_zero_phase", [&] {
    const auto a = build_marker(Variant::fixed_point, grid.shifted, grid.layout, 1, 0);
    const Real d = max_abs_diff(dense_materialize(a.marker), DenseMatrix::identity(a.marker.dimension()));
    return std::pair{d <= kExact, "max |M - 1| = " + f(d)};
  });

  // ---- complexity
  s.check("complexity", "counter_audit", [&] {
    bool ok = !reports.empty();
    for (unsigned q = 0; q < reports.size(); ++q) {
      const auto& c = reports[q].counters;
      ok = ok && c.applications_p == pow9(q) && c.applications_u == pow9(q) * fx.layout.work_dim() &&
           c.ancillas == fx.layout.qubits() && reports[q].marker_counters.applications_u == 2 * c.applications_u;
    }
    return std::pair{ok, fmt::format("{} simulated runs at mu={}", reports.size(), fx.layout.qubits())};
  });
  s.check("complexity", "planner_monotone", [&] {
    bool ok = true;
    unsigned prev = 0;
    for (int k = 1; k <= 60; ++k) {
      const Real eps = std::pow(Real(10), -Real(k) / 4);
      const unsigned q = plan_recursion(kWorkingEta, eps).level;
      ok = ok && q >= prev;
      prev = q;
    }
    ok = ok && plan_recursion(kWorkingEta, 1e-8L).level == 2 && plan_recursion(kWorkingEta, 0.1L).level == 0;
    ok = ok && plan_recursion(kWorkingEta, target_from_invocations(1000000)).level == 2;
    return std::pair{ok, std::string("eps = 10^(-k/4), k = 1..60")};
  });
  s.check("complexity", "table_consistency", [&] {
    const std::vector<Real> deltas = {0.9L};
    const std::vector<Real> eps = {1e-2L, 1e-4L, 1e-8L};
    const auto rows = tabulate(deltas, eps, [&](Real) { return std::optional<unsigned>(fx.layout.qubits()); });
    bool ok = true;
    for (const auto& r : rows) {
      if (r.variant != "F_eps") continue;
      const unsigned q = plan_recursion(kWorkingEta, r.eps).level;
      ok = ok && r.n_u_measured && *r.n_u_measured == pow9(q) * fx.layout.work_dim();
      ok = ok && r.n_a && *r.n_a == fx.layout.qubits();
    }
    return std::pair{ok, std::string("F_eps N_U = 9^q 2^mu at delta=0.9")};
  });

  // ---- cli
  s.check("cli", "config_validation", [&] {
    int rejected = 0;
    const std::vector<std::string> bad = {
        R"({"variant": "fixed_point", "registers": 3})",
        R"({"variant": "voting", "level": 1})",
        R"({"variant": "voting", "registers": 4})",
        R"({"variant": "pea", "level": 1})",
        R"({"variant": "nope"})",
        R"({"eps_target": 1e-8, "invocations": 10})",
        R"({"unknown_field": 1})",
    };
    for (const auto& text : bad) {
      try {
        parse_config(nlohmann::json::parse(text));
      } catch (const ConfigError&) {
        ++rejected;
      }
    }
    return std::pair{rejected == static_cast<int>(bad.size()), fmt::format("{}/{} invalid configs rejected", rejected, bad.size())};
  });
  s.check("cli", "sweep_determinism", [&] {
    RunConfig cfg = parse_config(nlohmann::json::parse(R"({
      "spectral": {"dim": 2, "eigenphases": [0.0, 0.9], "delta": 0.6, "target": {"psi_prime": 0.0, "marked_phase": 0.0}},
      "variant": "fixed_point", "workspace": {"mu": 6, "window": 4}, "random_inputs": 2, "seed": 7,
      "sweep": {"level": [0, 1, 2]}})"));
    const auto a = run_sweep(cfg, 1);
    const auto b = run_sweep(cfg, 3);
    const bool ok = a.artifacts == b.artifacts && !a.artifacts.empty();
    return std::pair{ok, std::string("jobs=1 vs jobs=3 byte-identical")};
  });

  return s.take();
}

std::string format_audit(const std::vector<AuditCheck>& checks) {
  std::string out;
  std::size_t passed = 0;
  for (const auto& c : checks) {
    out += fmt::format("{} {}.{}: {}\n", c.passed ? "PASS" : "FAIL", c.module, c.name, c.detail);
    passed += c.passed ? 1 : 0;
  }
  out += fmt::format("{}/{} properties hold\n", passed, checks.size());
  return out;
}

}  // namespace eigenmark
