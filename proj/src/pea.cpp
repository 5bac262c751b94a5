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

#include "eigenmark/pea.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace eigenmark {

namespace {

void check_qubits(unsigned qubits, const char* where) {
  if (qubits == 0 || qubits > kMaxWorkspaceQubits) {
    throw std::invalid_argument(fmt::format("{}: qubit count {} outside [1, {}]", where, qubits, kMaxWorkspaceQubits));
  }
}

void hadamard_layer(std::span<Complex> v, unsigned qubit) {
  static const Real kInvSqrt2 = 1 / std::sqrt(Real(2));
  const Index bit = Index{1} << qubit;
  for (Index base = 0; base < v.size(); base += 2 * bit) {
    for (Index i = base; i < base + bit; ++i) {
      const Complex a = v[i];
      const Complex b = v[i + bit];
      v[i] = (a + b) * kInvSqrt2;
      v[i + bit] = (a - b) * kInvSqrt2;
    }
  }
}

struct FourierTables {
  unsigned qubits;
  std::vector<Index> reversed;
  // phases[q][x] = exp(i pi x / 2^q) for x < 2^q: the cascade of controlled
  // phase gates whose target is qubit q, collapsed into one diagonal.
  std::vector<std::vector<Complex>> phases;
};

std::shared_ptr<const FourierTables> make_fourier_tables(unsigned qubits) {
  auto t = std::make_shared<FourierTables>();
  t->qubits = qubits;
  const Index n = Index{1} << qubits;
  t->reversed.resize(n);
  for (Index x = 0; x < n; ++x) {
    Index r = 0;
    for (unsigned b = 0; b < qubits; ++b) r |= ((x >> b) & 1) << (qubits - 1 - b);
    t->reversed[x] = r;
  }
  t->phases.resize(qubits);
  for (unsigned q = 0; q < qubits; ++q) {
    const Index len = Index{1} << q;
    t->phases[q].resize(len);
    for (Index x = 0; x < len; ++x) {
      t->phases[q][x] = std::polar(Real(1), kPi * static_cast<Real>(x) / static_cast<Real>(len));
    }
  }
  return t;
}

void controlled_phase_cascade(std::span<Complex> v, const FourierTables& t, unsigned q, bool conjugate) {
  const Index bit = Index{1} << q;
  const Index mask = bit - 1;
  const auto& table = t.phases[q];
  for (Index x = 0; x < v.size(); ++x) {
    if (x & bit) v[x] *= conjugate ? std::conj(table[x & mask]) : table[x & mask];
  }
}

void bit_reverse(std::span<Complex> v, const FourierTables& t) {
  for (Index x = 0; x < v.size(); ++x) {
    const Index r = t.reversed[x];
    if (r > x) std::swap(v[x], v[r]);
  }
}

void qft_forward(std::span<Complex> v, const FourierTables& t) {
  for (unsigned q = t.qubits; q-- > 0;) {
    hadamard_layer(v, q);
    controlled_phase_cascade(v, t, q, false);
  }
  bit_reverse(v, t);
}

void qft_adjoint(std::span<Complex> v, const FourierTables& t) {
  bit_reverse(v, t);
  for (unsigned q = 0; q < t.qubits; ++q) {
    controlled_phase_cascade(v, t, q, true);
    hadamard_layer(v, q);
  }
}

/// Sum over k in [-w, w] of p_k(lambda), using the common numerator
/// sin^2(N lambda / 2) and a rotation recurrence for the denominators.
/// With envelope=true the numerator is replaced by 1 (an upper bound).
double window_sum(double lambda, unsigned qubits, Index window, bool envelope) {
  const double n = std::ldexp(1.0, static_cast<int>(qubits));
  const double step = std::numbers::pi / n;
  const double s = envelope ? 1.0 : std::sin(n * lambda / 2);
  const double s2 = s * s;
  const double scale = s2 / (n * n);
  const auto w = static_cast<long long>(window);
  constexpr long long kReseed = 128;
  std::complex<double> rot(std::cos(-step), std::sin(-step));
  std::complex<double> e;
  double total = 0;
  for (long long k = -w; k <= w; ++k) {
    if ((k + w) % kReseed == 0) {
      const double theta = lambda / 2 - step * static_cast<double>(k);
      e = std::polar(1.0, theta);
    }
    const double sn = e.imag();
    if (std::abs(sn) < 1e-6) {
      const Index outcome = static_cast<Index>((k % static_cast<long long>(n) + static_cast<long long>(n)) %
                                               static_cast<long long>(n));
      total += envelope ? 1.0 : static_cast<double>(pea_outcome_probability(lambda, qubits, outcome));
    } else {
      total += scale / (sn * sn);
    }
    e *= rot;
  }
  return total;
}

double marked_error(double lambda, const WorkspaceLayout& layout) {
  return std::sqrt(std::max(0.0, 1.0 - window_sum(lambda, layout.qubits(), layout.window(), false)));
}

double unmarked_error(double lambda, const WorkspaceLayout& layout) {
  return std::sqrt(std::max(0.0, window_sum(lambda, layout.qubits(), layout.window(), false)));
}

struct Worst {
  double value = 0;
  double at = 0;
};

/// Grid maximum of f on [lo, hi] followed by golden-section refinement
/// within one grid step of the best point.
template <typename F>
Worst grid_max(F&& f, double lo, double hi, double spacing) {
  Worst best{f(lo), lo};
  if (hi > lo) {
    const auto points = static_cast<long long>(std::ceil((hi - lo) / spacing));
    const double h = (hi - lo) / static_cast<double>(points);
    for (long long i = 1; i <= points; ++i) {
      const double x = lo + h * static_cast<double>(i);
      const double v = f(x);
      if (v > best.value) best = {v, x};
    }
    double a = std::max(lo, best.at - h);
    double b = std::min(hi, best.at + h);
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 40; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    for (double x : {c, d}) {
      const double v = f(x);
      if (v > best.value) best = {v, x};
    }
  }
  return best;
}

double bin_width(unsigned qubits) { return 2 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(qubits)); }

Worst worst_marked(double gap, double b, const WorkspaceLayout& layout, const CalibrationOptions& options) {
  // symmetric window: lambda and -lambda give identical errors
  const double spacing = bin_width(layout.qubits()) / options.grid_per_bin;
  return grid_max([&](double x) { return marked_error(x, layout); }, 0.0, b * gap, spacing);
}

Worst worst_unmarked(double gap, const WorkspaceLayout& layout, const CalibrationOptions& options) {
  const double lo = gap / 2;
  const double pi = std::numbers::pi;
  const double bw = bin_width(layout.qubits());
  const double dense_hi = std::min(pi, lo + options.dense_bins * bw);
  Worst best = grid_max([&](double x) { return unmarked_error(x, layout); }, lo, dense_hi,
                        bw / options.grid_per_bin);
  const double edge = bw * static_cast<double>(layout.window());
  if (dense_hi < pi) {
    if (dense_hi <= edge) return {1.0, dense_hi};
    // csc^2 is convex on (0, pi), so the envelope peaks at an endpoint
    for (double x : {dense_hi, pi}) {
      const double bound = std::sqrt(window_sum(x, layout.qubits(), layout.window(), true));
      if (bound > best.value) best = {bound, x};
    }
  }
  return best;
}

CalibrationResult make_result(const WorkspaceLayout& layout, Worst m, Worst u) {
  CalibrationResult r;
  r.qubits = layout.qubits();
  r.window = layout.window();
  r.eta_marked = m.value;
  r.eta_unmarked = u.value;
  r.eta = std::max(r.eta_marked, r.eta_unmarked);
  r.worst_marked_lambda = m.at;
  r.worst_unmarked_lambda = u.at;
  return r;
}

}  // namespace

WorkspaceLayout::WorkspaceLayout(unsigned qubits, Index window) : qubits_(qubits), window_(window) {
  check_qubits(qubits, "WorkspaceLayout");
  if (window_ >= (Index{1} << (qubits_ - 1))) {
    throw std::invalid_argument(
        fmt::format("WorkspaceLayout: window {} must be below 2^(mu-1) = {}", window_, Index{1} << (qubits_ - 1)));
  }
}

bool WorkspaceLayout::in_window(Index z) const { return std::min(z, work_dim() - z) <= window_; }

SubspaceProjector WorkspaceLayout::window_projector() const {
  return SubspaceProjector::from_predicate(work_dim(), [this](Index z) { return in_window(z); });
}

SubspaceProjector WorkspaceLayout::complement_projector() const { return window_projector().complement(); }

LinearOperator walsh_hadamard(unsigned qubits) {
  check_qubits(qubits, "walsh_hadamard");
  auto kernel = [qubits](std::span<Complex> v, EvaluationContext&) {
    for (unsigned q = 0; q < qubits; ++q) hadamard_layer(v, q);
  };
  return LinearOperator(Index{1} << qubits, kernel, kernel, {}, {}, fmt::format("H^{}", qubits));
}

LinearOperator quantum_fourier_transform(unsigned qubits) {
  check_qubits(qubits, "quantum_fourier_transform");
  auto tables = make_fourier_tables(qubits);
  return LinearOperator(
      Index{1} << qubits, [tables](std::span<Complex> v, EvaluationContext&) { qft_forward(v, *tables); },
      [tables](std::span<Complex> v, EvaluationContext&) { qft_adjoint(v, *tables); }, {}, {},
      fmt::format("QFT{}", qubits));
}

LinearOperator inverse_quantum_fourier_transform(unsigned qubits) {
  return quantum_fourier_transform(qubits).adjoint();
}

LinearOperator controlled_powers(const LinearOperator& shifted, const WorkspaceLayout& layout) {
  const Index main_dim = shifted.dimension();
  const Index work_dim = layout.work_dim();
  const unsigned qubits = layout.qubits();

  // rungs[j] = S^(2^j)
  auto rungs = std::make_shared<std::vector<DenseMatrix>>();
  if (shifted.has_power()) {
    for (unsigned j = 0; j < qubits; ++j) rungs->push_back(dense_materialize(shifted.power(Index{1} << j)));
  } else {
    rungs->push_back(dense_materialize(shifted));
    for (unsigned j = 1; j < qubits; ++j) rungs->push_back(rungs->back() * rungs->back());
  }
  auto adjoint_rungs = std::make_shared<std::vector<DenseMatrix>>();
  for (const auto& m : *rungs) adjoint_rungs->push_back(m.adjoint());

  auto run = [main_dim, work_dim, qubits](std::span<Complex> v, const std::vector<DenseMatrix>& mats) {
    std::vector<Complex> column(main_dim);
    std::vector<Complex> out(main_dim);
    for (unsigned j = 0; j < qubits; ++j) {
      const DenseMatrix& m = mats[j];
      const Index bit = Index{1} << j;
      for (Index z = 0; z < work_dim; ++z) {
        if (!(z & bit)) continue;
        for (Index r = 0; r < main_dim; ++r) column[r] = v[r * work_dim + z];
        for (Index r = 0; r < main_dim; ++r) {
          Complex acc = 0;
          for (Index c = 0; c < main_dim; ++c) acc += m(r, c) * column[c];
          out[r] = acc;
        }
        for (Index r = 0; r < main_dim; ++r) v[r * work_dim + z] = out[r];
      }
    }
  };
  return LinearOperator(
      main_dim * work_dim, [run, rungs](std::span<Complex> v, EvaluationContext&) { run(v, *rungs); },
      [run, adjoint_rungs](std::span<Complex> v, EvaluationContext&) { run(v, *adjoint_rungs); },
      Tally{{std::string(kResourceU), work_dim}}, {}, "cS^z");
}

LinearOperator build_pea(const LinearOperator& shifted, const WorkspaceLayout& layout) {
  const Index main_dim = shifted.dimension();
  auto inner = product({lift_to_workspace(inverse_quantum_fourier_transform(layout.qubits()), main_dim),
                        controlled_powers(shifted, layout), lift_to_workspace(walsh_hadamard(layout.qubits()), main_dim)});
  return LinearOperator(
      inner.dimension(), [inner](std::span<Complex> v, EvaluationContext& ctx) { inner.apply(v, ctx); },
      [inner](std::span<Complex> v, EvaluationContext& ctx) { inner.apply_adjoint(v, ctx); },
      Tally{{std::string(kResourceP), 1}}, inner.cost(), "P");
}

EtaReport measure_eta(const LinearOperator& pea, const SpectralUnitary& spec, const ResolvedTarget& resolved,
                      const WorkspaceLayout& layout) {
  const Index work_dim = layout.work_dim();
  if (pea.dimension() != spec.dim() * work_dim) {
    throw DimensionMismatch("measure_eta", spec.dim() * work_dim, pea.dimension());
  }
  EtaReport report;
  EvaluationContext scratch;
  std::vector<Complex> sigma(work_dim);
  sigma[layout.standard_index()] = 1;
  for (Index i = 0; i < spec.dim(); ++i) {
    JointState state = JointState::product(spec.eigenvector(i), sigma);
    pea.apply(state.amplitudes(), scratch);
    Real inside = 0;
    Real outside = 0;
    for (Index m = 0; m < spec.dim(); ++m) {
      for (Index z = 0; z < work_dim; ++z) (layout.in_window(z) ? inside : outside) += std::norm(state.at(m, z));
    }
    DirectionEta d;
    d.direction = i;
    d.eigenphase = spec.eigenphases()[i];
    d.shifted_phase = resolved.shifted_phases[i];
    d.marked = resolved.marked[i];
    d.eta = std::sqrt(d.marked ? outside : inside);
    (d.marked ? report.eta_marked : report.eta_unmarked) =
        std::max(d.marked ? report.eta_marked : report.eta_unmarked, d.eta);
    report.directions.push_back(d);
  }
  report.eta = std::max(report.eta_marked, report.eta_unmarked);
  return report;
}

Real pea_outcome_probability(Real lambda, unsigned qubits, Index outcome) {
  const Real n = std::ldexp(Real(1), static_cast<int>(qubits));
  const Real delta = wrap_phase(lambda - 2 * kPi * static_cast<Real>(outcome) / n);
  const Real den = std::sin(delta / 2);
  if (std::abs(den) < 1e-9L) {
    // Fejer kernel near its peak
    return std::max(Real(0), 1 - (n * n - 1) * delta * delta / 12);
  }
  const Real num = std::sin(n * delta / 2);
  return (num * num) / (n * n * den * den);
}

Real pea_window_probability(Real lambda, const WorkspaceLayout& layout) {
  Real total = 0;
  const auto w = static_cast<long long>(layout.window());
  const auto n = static_cast<long long>(layout.work_dim());
  for (long long k = -w; k <= w; ++k) {
    total += pea_outcome_probability(lambda, layout.qubits(), static_cast<Index>((k + n) % n));
  }
  return total;
}

CalibrationResult worst_case_eta(Real gap, Real b, const WorkspaceLayout& layout, const CalibrationOptions& options) {
  const auto g = static_cast<double>(gap);
  return make_result(layout, worst_marked(g, static_cast<double>(b), layout, options), worst_unmarked(g, layout, options));
}

CalibrationResult calibrate_workspace(Real gap, Real b, const CalibrationOptions& options) {
  if (!(gap > 0 && gap < kPi)) {
    throw std::invalid_argument(fmt::format("calibrate_workspace: gap {} outside (0, pi)", static_cast<double>(gap)));
  }
  if (!(b > 0 && b <= 0.25L)) {
    throw std::invalid_argument(fmt::format("calibrate_workspace: b {} outside (0, 0.25]", static_cast<double>(b)));
  }
  if (options.grid_per_bin < 64) {
    throw std::invalid_argument("calibrate_workspace: grid density must be at least 64 points per bin");
  }
  const auto g = static_cast<double>(gap);
  const auto bb = static_cast<double>(b);
  const auto target = static_cast<double>(options.eta_target);
  std::optional<CalibrationResult> best;
  for (unsigned mu = 1; mu <= std::min(options.max_qubits, kMaxWorkspaceQubits); ++mu) {
    const Index max_window = (Index{1} << (mu - 1)) - 1;
    auto marked_at = [&](Index w) { return worst_marked(g, bb, WorkspaceLayout(mu, w), options); };
    // the marked error only shrinks as the window grows
    Index lo = 0;
    Index hi = max_window;
    if (marked_at(hi).value > target) {
      const WorkspaceLayout layout(mu, hi);
      auto r = make_result(layout, marked_at(hi), worst_unmarked(g, layout, options));
      if (!best || r.eta < best->eta) best = r;
      continue;
    }
    while (lo < hi) {
      const Index mid = lo + (hi - lo) / 2;
      if (marked_at(mid).value <= target) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    const WorkspaceLayout layout(mu, lo);
    auto r = make_result(layout, marked_at(lo), worst_unmarked(g, layout, options));
    if (r.eta <= target) return r;
    if (!best || r.eta < best->eta) best = r;
  }
  throw CalibrationFailure(
      fmt::format("calibration failed: no mu <= {} reaches eta <= {} (best eta {:.4g} at mu={}, w={})",
                  options.max_qubits, target, static_cast<double>(best->eta), best->qubits, best->window),
      *best);
}

CalibrationResult best_window(Real gap, Real b, unsigned qubits, const CalibrationOptions& options) {
  check_qubits(qubits, "best_window");
  const auto g = static_cast<double>(gap);
  const auto bb = static_cast<double>(b);
  auto at = [&](Index w) {
    const WorkspaceLayout layout(qubits, w);
    return make_result(layout, worst_marked(g, bb, layout, options), worst_unmarked(g, layout, options));
  };
  // marked error falls and unmarked error rises with w: find the crossing
  Index lo = 0;
  Index hi = (Index{1} << (qubits - 1)) - 1;
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    const auto r = at(mid);
    if (r.eta_marked > r.eta_unmarked) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  auto best = at(lo);
  if (lo > 0) {
    auto below = at(lo - 1);
    if (below.eta < best.eta) best = below;
  }
  return best;
}

std::string CalibrationCache::key(Real gap, Real b, const CalibrationOptions& options) {
  return fmt::format("{:.17g}|{:.17g}|{:.17g}|{}", static_cast<double>(gap), static_cast<double>(b),
                     static_cast<double>(options.eta_target), options.grid_per_bin);
}

std::optional<CalibrationResult> CalibrationCache::find(Real gap, Real b, const CalibrationOptions& options) const {
  auto it = entries_.find(key(gap, b, options));
  if (it == entries_.end()) return std::nullopt;
  return it->second.result;
}

void CalibrationCache::insert(Real gap, Real b, const CalibrationOptions& options, const CalibrationResult& result) {
  entries_[key(gap, b, options)] = Entry{static_cast<double>(gap), static_cast<double>(b),
                                         static_cast<double>(options.eta_target), options.grid_per_bin, result};
}

CalibrationResult CalibrationCache::get_or_calibrate(Real gap, Real b, const CalibrationOptions& options) {
  if (auto hit = find(gap, b, options)) return *hit;
  auto result = calibrate_workspace(gap, b, options);
  insert(gap, b, options, result);
  return result;
}

nlohmann::json CalibrationCache::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [k, e] : entries_) {
    entries.push_back({{"key", k},
                       {"delta", e.gap},
                       {"b", e.b},
                       {"eta_target", e.eta_target},
                       {"grid_per_bin", e.grid_per_bin},
                       {"mu", e.result.qubits},
                       {"window", e.result.window},
                       {"eta_marked", static_cast<double>(e.result.eta_marked)},
                       {"eta_unmarked", static_cast<double>(e.result.eta_unmarked)},
                       {"eta", static_cast<double>(e.result.eta)},
                       {"worst_marked_lambda", static_cast<double>(e.result.worst_marked_lambda)},
                       {"worst_unmarked_lambda", static_cast<double>(e.result.worst_unmarked_lambda)}});
  }
  return {{"calibrations", entries}};
}

CalibrationCache CalibrationCache::from_json(const nlohmann::json& doc) {
  CalibrationCache cache;
  for (const auto& e : doc.at("calibrations")) {
    CalibrationOptions options;
    options.eta_target = e.at("eta_target").get<double>();
    options.grid_per_bin = e.at("grid_per_bin").get<unsigned>();
    CalibrationResult r;
    r.qubits = e.at("mu").get<unsigned>();
    r.window = e.at("window").get<Index>();
    r.eta_marked = e.at("eta_marked").get<double>();
    r.eta_unmarked = e.at("eta_unmarked").get<double>();
    r.eta = e.at("eta").get<double>();
    r.worst_marked_lambda = e.value("worst_marked_lambda", 0.0);
    r.worst_unmarked_lambda = e.value("worst_unmarked_lambda", 0.0);
    cache.insert(e.at("delta").get<double>(), e.at("b").get<double>(), options, r);
  }
  return cache;
}

CalibrationCache CalibrationCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return from_json(nlohmann::json::parse(in));
}

void CalibrationCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration cache " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace eigenmark
