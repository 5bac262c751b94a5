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

#include "eigenmark/statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

namespace eigenmark {

Tally operator+(const Tally& a, const Tally& b) {
  Tally out = a;
  for (const auto& [name, count] : b) out[name] += count;
  return out;
}

Tally scaled(const Tally& t, std::uint64_t factor) {
  Tally out;
  for (const auto& [name, count] : t) out[name] = count * factor;
  return out;
}

DimensionMismatch::DimensionMismatch(const std::string& context, Index expected, Index actual)
    : std::invalid_argument(
          fmt::format("{}: dimension mismatch (expected {}, got {})", context, expected, actual)),
      expected_(expected),
      actual_(actual) {}

void EvaluationContext::record(const Tally& tags, std::uint64_t times) {
  for (const auto& [name, count] : tags) tallies_[name] += count * times;
}

std::uint64_t EvaluationContext::count(std::string_view resource) const {
  auto it = tallies_.find(resource);
  return it == tallies_.end() ? 0 : it->second;
}

LinearOperator::LinearOperator(Index dimension, Kernel forward, Kernel adjoint, Tally tags,
                               Tally inner_cost, std::string label) {
  if (dimension == 0) throw std::invalid_argument("LinearOperator: dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->dimension = dimension;
  impl->forward = std::move(forward);
  impl->adjoint = std::move(adjoint);
  impl->total_cost = tags + inner_cost;
  impl->tags = std::move(tags);
  impl->label = std::move(label);
  impl_ = std::move(impl);
}

void LinearOperator::apply(std::span<Complex> amplitudes, EvaluationContext& ctx) const {
  if (amplitudes.size() != impl_->dimension) {
    throw DimensionMismatch(fmt::format("apply '{}'", impl_->label), impl_->dimension,
                            amplitudes.size());
  }
  impl_->forward(amplitudes, ctx);
  ctx.record(impl_->tags);
}

void LinearOperator::apply_adjoint(std::span<Complex> amplitudes, EvaluationContext& ctx) const {
  if (amplitudes.size() != impl_->dimension) {
    throw DimensionMismatch(fmt::format("apply_adjoint '{}'", impl_->label), impl_->dimension,
                            amplitudes.size());
  }
  impl_->adjoint(amplitudes, ctx);
  ctx.record(impl_->tags);
}

LinearOperator LinearOperator::adjoint() const {
  LinearOperator self = *this;
  LinearOperator out(
      dimension(), [self](std::span<Complex> v, EvaluationContext& ctx) { self.apply_adjoint(v, ctx); },
      [self](std::span<Complex> v, EvaluationContext& ctx) { self.apply(v, ctx); }, {}, cost(),
      label() + "^dag");
  if (has_power()) {
    out = out.with_power([self](std::uint64_t k) { return self.power(k).adjoint(); });
  }
  return out;
}

LinearOperator LinearOperator::power(std::uint64_t exponent) const {
  if (!impl_->power) throw std::logic_error("operator '" + label() + "' has no exact power");
  return impl_->power(exponent);
}

LinearOperator LinearOperator::with_power(PowerFn power) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->power = std::move(power);
  return LinearOperator(std::shared_ptr<const Impl>(std::move(impl)));
}

LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("compose", a.dimension(), b.dimension());
  return LinearOperator(
      a.dimension(),
      [a, b](std::span<Complex> v, EvaluationContext& ctx) {
        b.apply(v, ctx);
        a.apply(v, ctx);
      },
      [a, b](std::span<Complex> v, EvaluationContext& ctx) {
        a.apply_adjoint(v, ctx);
        b.apply_adjoint(v, ctx);
      },
      {}, a.cost() + b.cost(), "(" + a.label() + "*" + b.label() + ")");
}

LinearOperator product(const std::vector<LinearOperator>& factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  const Index dim = factors.front().dimension();
  Tally cost;
  std::string label = "[";
  for (const auto& f : factors) {
    if (f.dimension() != dim) throw DimensionMismatch("product", dim, f.dimension());
    cost = cost + f.cost();
    if (label.size() > 1) label += " ";
    label += f.label();
  }
  label += "]";
  return LinearOperator(
      dim,
      [factors](std::span<Complex> v, EvaluationContext& ctx) {
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) it->apply(v, ctx);
      },
      [factors](std::span<Complex> v, EvaluationContext& ctx) {
        for (const auto& f : factors) f.apply_adjoint(v, ctx);
      },
      {}, cost, label);
}

LinearOperator identity_operator(Index dimension) {
  auto noop = [](std::span<Complex>, EvaluationContext&) {};
  return LinearOperator(dimension, noop, noop, {}, {}, "1");
}

LinearOperator diagonal_operator(std::vector<Complex> diagonal, std::string label) {
  const Index dim = diagonal.size();
  auto diag = std::make_shared<const std::vector<Complex>>(std::move(diagonal));
  return LinearOperator(
      dim,
      [diag](std::span<Complex> v, EvaluationContext&) {
        for (Index i = 0; i < v.size(); ++i) v[i] *= (*diag)[i];
      },
      [diag](std::span<Complex> v, EvaluationContext&) {
        for (Index i = 0; i < v.size(); ++i) v[i] *= std::conj((*diag)[i]);
      },
      {}, {}, std::move(label));
}

LinearOperator lift_to_workspace(const LinearOperator& op, Index main_dim) {
  const Index work_dim = op.dimension();
  auto run = [op, main_dim, work_dim](std::span<Complex> v, EvaluationContext& ctx, bool adj) {
    EvaluationContext scratch;
    for (Index m = 0; m < main_dim; ++m) {
      auto slice = v.subspan(m * work_dim, work_dim);
      adj ? op.apply_adjoint(slice, scratch) : op.apply(slice, scratch);
    }
    ctx.record(op.cost());
  };
  return LinearOperator(
      main_dim * work_dim,
      [run](std::span<Complex> v, EvaluationContext& ctx) { run(v, ctx, false); },
      [run](std::span<Complex> v, EvaluationContext& ctx) { run(v, ctx, true); }, {}, op.cost(),
      "1(x)" + op.label());
}

LinearOperator lift_to_main(const LinearOperator& op, Index work_dim) {
  const Index main_dim = op.dimension();
  auto run = [op, main_dim, work_dim](std::span<Complex> v, EvaluationContext& ctx, bool adj) {
    EvaluationContext scratch;
    std::vector<Complex> column(main_dim);
    for (Index z = 0; z < work_dim; ++z) {
      for (Index m = 0; m < main_dim; ++m) column[m] = v[m * work_dim + z];
      adj ? op.apply_adjoint(column, scratch) : op.apply(column, scratch);
      for (Index m = 0; m < main_dim; ++m) v[m * work_dim + z] = column[m];
    }
    ctx.record(op.cost());
  };
  return LinearOperator(
      main_dim * work_dim,
      [run](std::span<Complex> v, EvaluationContext& ctx) { run(v, ctx, false); },
      [run](std::span<Complex> v, EvaluationContext& ctx) { run(v, ctx, true); }, {}, op.cost(),
      op.label() + "(x)1");
}

JointState::JointState(Index main_dim, Index work_dim)
    : JointState(main_dim, work_dim, [&] {
        std::vector<Complex> a(main_dim * work_dim);
        if (!a.empty()) a[0] = 1;
        return a;
      }()) {}

JointState::JointState(Index main_dim, Index work_dim, std::vector<Complex> amplitudes)
    : main_dim_(main_dim), work_dim_(work_dim), amplitudes_(std::move(amplitudes)) {
  if (main_dim == 0 || work_dim == 0) {
    throw std::invalid_argument("JointState: factor dimensions must be positive");
  }
  if (!std::has_single_bit(work_dim)) {
    throw std::invalid_argument(fmt::format("JointState: work_dim {} is not a power of two", work_dim));
  }
  if (amplitudes_.size() != main_dim * work_dim) {
    throw DimensionMismatch("JointState", main_dim * work_dim, amplitudes_.size());
  }
}

JointState JointState::product(std::span<const Complex> main, std::span<const Complex> work) {
  std::vector<Complex> a(main.size() * work.size());
  for (Index m = 0; m < main.size(); ++m) {
    for (Index z = 0; z < work.size(); ++z) a[m * work.size() + z] = main[m] * work[z];
  }
  return JointState(main.size(), work.size(), std::move(a));
}

JointState JointState::basis(Index main_dim, Index work_dim, Index m, Index z) {
  if (m >= main_dim || z >= work_dim) throw std::out_of_range("JointState::basis: index out of range");
  std::vector<Complex> a(main_dim * work_dim);
  a[m * work_dim + z] = 1;
  return JointState(main_dim, work_dim, std::move(a));
}

Real JointState::norm() const { return norm2(amplitudes_); }

JointState apply(const LinearOperator& op, JointState state, Side side, EvaluationContext& ctx) {
  switch (side) {
    case Side::joint:
      if (op.dimension() != state.size()) throw DimensionMismatch("apply (joint)", state.size(), op.dimension());
      op.apply(state.amplitudes(), ctx);
      break;
    case Side::work:
      if (op.dimension() != state.work_dim()) {
        throw DimensionMismatch("apply (work)", state.work_dim(), op.dimension());
      }
      lift_to_workspace(op, state.main_dim()).apply(state.amplitudes(), ctx);
      break;
    case Side::main:
      if (op.dimension() != state.main_dim()) {
        throw DimensionMismatch("apply (main)", state.main_dim(), op.dimension());
      }
      lift_to_main(op, state.work_dim()).apply(state.amplitudes(), ctx);
      break;
  }
  return state;
}

SubspaceProjector::SubspaceProjector(Index dimension, std::vector<Index> members)
    : dimension_(dimension), members_(std::move(members)), mask_(dimension, 0) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (Index i : members_) {
    if (i >= dimension_) {
      throw std::out_of_range(fmt::format("SubspaceProjector: member {} outside [0, {})", i, dimension_));
    }
    mask_[i] = 1;
  }
}

SubspaceProjector SubspaceProjector::complement() const {
  return from_predicate(dimension_, [this](Index i) { return !contains(i); });
}

void SubspaceProjector::project(std::span<Complex> amplitudes) const {
  if (amplitudes.size() % dimension_ != 0) {
    throw DimensionMismatch("SubspaceProjector::project", dimension_, amplitudes.size());
  }
  for (Index i = 0; i < amplitudes.size(); ++i) {
    if (!mask_[i % dimension_]) amplitudes[i] = 0;
  }
}

SubspaceAmplitude subspace_amplitude(const JointState& state, const SubspaceProjector& proj) {
  if (proj.dimension() != state.work_dim()) {
    throw DimensionMismatch("subspace_amplitude", state.work_dim(), proj.dimension());
  }
  std::vector<Complex> inside(state.amplitudes().begin(), state.amplitudes().end());
  proj.project(inside);
  Real in2 = 0;
  Real out2 = 0;
  for (Index i = 0; i < inside.size(); ++i) {
    const Real p = std::norm(state.amplitudes()[i]);
    (proj.contains(i % proj.dimension()) ? in2 : out2) += p;
  }
  return SubspaceAmplitude{std::sqrt(in2), std::sqrt(out2),
                           JointState(state.main_dim(), state.work_dim(), std::move(inside)), proj.empty()};
}

DenseMatrix::DenseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (Index r = 0; r < rows_; ++r) {
    for (Index c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

std::vector<Complex> DenseMatrix::column(Index c) const {
  std::vector<Complex> out(rows_);
  for (Index r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<Complex> DenseMatrix::multiply(std::span<const Complex> v) const {
  if (v.size() != cols_) throw DimensionMismatch("DenseMatrix::multiply", cols_, v.size());
  std::vector<Complex> out(rows_);
  for (Index r = 0; r < rows_; ++r) {
    Complex acc = 0;
    for (Index c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionMismatch("DenseMatrix product", a.cols_, b.rows_);
  DenseMatrix out(a.rows_, b.cols_);
  for (Index r = 0; r < a.rows_; ++r) {
    for (Index k = 0; k < a.cols_; ++k) {
      const Complex x = a(r, k);
      if (x == Complex(0)) continue;
      for (Index c = 0; c < b.cols_; ++c) out(r, c) += x * b(k, c);
    }
  }
  return out;
}

Real max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("max_abs_diff", a.rows() * a.cols(), b.rows() * b.cols());
  }
  Real worst = 0;
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  }
  return worst;
}

Real unitarity_defect(const DenseMatrix& m) {
  return max_abs_diff(m.adjoint() * m, DenseMatrix::identity(m.cols()));
}

DenseMatrix dense_materialize(const LinearOperator& op, Index guard) {
  const Index n = op.dimension();
  if (n > guard) {
    throw std::invalid_argument(
        fmt::format("dense_materialize: dimension {} exceeds guard {}", n, guard));
  }
  DenseMatrix out(n, n);
  EvaluationContext scratch;
  std::vector<Complex> v(n);
  for (Index j = 0; j < n; ++j) {
    std::fill(v.begin(), v.end(), Complex(0));
    v[j] = 1;
    op.apply(v, scratch);
    for (Index i = 0; i < n; ++i) out(i, j) = v[i];
  }
  return out;
}

LinearOperator dense_operator(DenseMatrix matrix, std::string label, Tally tags) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionMismatch("dense_operator (square)", matrix.rows(), matrix.cols());
  }
  auto fwd = std::make_shared<const DenseMatrix>(matrix);
  auto adj = std::make_shared<const DenseMatrix>(matrix.adjoint());
  return LinearOperator(
      matrix.rows(),
      [fwd](std::span<Complex> v, EvaluationContext&) {
        auto out = fwd->multiply(v);
        std::copy(out.begin(), out.end(), v.begin());
      },
      [adj](std::span<Complex> v, EvaluationContext&) {
        auto out = adj->multiply(v);
        std::copy(out.begin(), out.end(), v.begin());
      },
      std::move(tags), {}, std::move(label));
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DimensionMismatch("inner_product", a.size(), b.size());
  Complex acc = 0;
  for (Index i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

Real norm2(std::span<const Complex> v) {
  Real acc = 0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

Real distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DimensionMismatch("distance", a.size(), b.size());
  Real acc = 0;
  for (Index i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

std::vector<Complex> random_unit_vector(Index dimension, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> v(dimension);
  for (auto& x : v) x = Complex(gauss(rng), gauss(rng));
  const Real n = norm2(v);
  for (auto& x : v) x /= n;
  return v;
}

DenseMatrix random_unitary(Index dimension, std::mt19937_64& rng) {
  std::vector<std::vector<Complex>> cols;
  cols.reserve(dimension);
  while (cols.size() < dimension) {
    auto v = random_unit_vector(dimension, rng);
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : cols) {
        const Complex c = inner_product(u, v);
        for (Index i = 0; i < dimension; ++i) v[i] -= c * u[i];
      }
    }
    const Real n = norm2(v);
    if (n < 1e-8L) continue;
    for (auto& x : v) x /= n;
    cols.push_back(std::move(v));
  }
  DenseMatrix m(dimension, dimension);
  for (Index c = 0; c < dimension; ++c) {
    for (Index r = 0; r < dimension; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

}  // namespace eigenmark
