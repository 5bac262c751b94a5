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

/**
 * @file
 * State vectors over a main (x) workspace tensor structure, matrix-free
 * operators with resource tallies, and dense oracles used for verification.
 *
 * Joint index convention: amplitude (m, z) lives at m * work_dim + z, so each
 * main index owns a contiguous workspace slice. Within the workspace, qubit j
 * is bit j of z (little-endian).
 */

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eigenmark {

// Working precision of every amplitude computation. Extended precision keeps
// the round-off floor of deep recursions (hundreds of PEA applications) far
// below the error terms under study.
using Real = long double;
using Complex = std::complex<Real>;
using Index = std::size_t;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Resource name -> application count.
using Tally = std::map<std::string, std::uint64_t, std::less<>>;

inline constexpr std::string_view kResourceU = "U";
inline constexpr std::string_view kResourceP = "P";

Tally operator+(const Tally& a, const Tally& b);
Tally scaled(const Tally& t, std::uint64_t factor);

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const std::string& context, Index expected, Index actual);
  Index expected() const { return expected_; }
  Index actual() const { return actual_; }

 private:
  Index expected_;
  Index actual_;
};

/// Counters accumulated while operators are applied. Single-owner; pass one
/// per independent simulation.
class EvaluationContext {
 public:
  void record(const Tally& tags, std::uint64_t times = 1);
  std::uint64_t count(std::string_view resource) const;
  const Tally& tallies() const { return tallies_; }
  void reset() { tallies_.clear(); }

 private:
  Tally tallies_;
};

/**
 * Matrix-free unitary on a vector space of fixed dimension.
 *
 * Values are immutable and cheap to copy (shared implementation). Each
 * application records the operator's own tags into the evaluation context;
 * composite operators get their costs from the children they invoke, so
 * cost() is always the total tally of a single application.
 */
class LinearOperator {
 public:
  using Kernel = std::function<void(std::span<Complex>, EvaluationContext&)>;
  using PowerFn = std::function<LinearOperator(std::uint64_t)>;

  LinearOperator(Index dimension, Kernel forward, Kernel adjoint, Tally tags = {},
                 Tally inner_cost = {}, std::string label = {});

  Index dimension() const { return impl_->dimension; }
  const std::string& label() const { return impl_->label; }

  /// Tags recorded by this operator itself on every application.
  const Tally& tags() const { return impl_->tags; }
  /// Total tally of one application, children included.
  const Tally& cost() const { return impl_->total_cost; }

  void apply(std::span<Complex> amplitudes, EvaluationContext& ctx) const;
  void apply_adjoint(std::span<Complex> amplitudes, EvaluationContext& ctx) const;

  LinearOperator adjoint() const;

  /// Operators that know their exact integer powers (spectral operators)
  /// expose them here; build_pea uses this to avoid repeated squaring.
  bool has_power() const { return static_cast<bool>(impl_->power); }
  LinearOperator power(std::uint64_t exponent) const;
  LinearOperator with_power(PowerFn power) const;

 private:
  struct Impl {
    Index dimension;
    Kernel forward;
    Kernel adjoint;
    Tally tags;
    Tally total_cost;
    std::string label;
    PowerFn power;
  };
  explicit LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// a∘b: b is applied first.
LinearOperator compose(const LinearOperator& a, const LinearOperator& b);
/// Juxtaposition product; the rightmost factor is applied first.
LinearOperator product(const std::vector<LinearOperator>& factors);

LinearOperator identity_operator(Index dimension);
LinearOperator diagonal_operator(std::vector<Complex> diagonal, std::string label = "diag");

/// 1_m (x) op. One application of the lift tallies one application of op.
LinearOperator lift_to_workspace(const LinearOperator& op, Index main_dim);
/// op (x) 1_w. One application of the lift tallies one application of op.
LinearOperator lift_to_main(const LinearOperator& op, Index work_dim);

class JointState {
 public:
  /// |0>|0>.
  JointState(Index main_dim, Index work_dim);
  JointState(Index main_dim, Index work_dim, std::vector<Complex> amplitudes);

  static JointState product(std::span<const Complex> main, std::span<const Complex> work);
  static JointState basis(Index main_dim, Index work_dim, Index m, Index z);

  Index main_dim() const { return main_dim_; }
  Index work_dim() const { return work_dim_; }
  Index size() const { return amplitudes_.size(); }

  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex& at(Index m, Index z) { return amplitudes_[m * work_dim_ + z]; }
  const Complex& at(Index m, Index z) const { return amplitudes_[m * work_dim_ + z]; }

  Real norm() const;

 private:
  Index main_dim_;
  Index work_dim_;
  std::vector<Complex> amplitudes_;
};

enum class Side { main, work, joint };

JointState apply(const LinearOperator& op, JointState state, Side side, EvaluationContext& ctx);

class SubspaceProjector {
 public:
  SubspaceProjector(Index dimension, std::vector<Index> members);

  template <typename Pred>
  static SubspaceProjector from_predicate(Index dimension, Pred&& pred) {
    std::vector<Index> members;
    for (Index i = 0; i < dimension; ++i) {
      if (pred(i)) members.push_back(i);
    }
    return SubspaceProjector(dimension, std::move(members));
  }

  Index dimension() const { return dimension_; }
  const std::vector<Index>& members() const { return members_; }
  bool contains(Index i) const { return mask_[i] != 0; }
  bool empty() const { return members_.empty(); }
  SubspaceProjector complement() const;

  void project(std::span<Complex> amplitudes) const;

 private:
  Index dimension_;
  std::vector<Index> members_;
  std::vector<char> mask_;
};

struct SubspaceAmplitude {
  Real magnitude = 0;
  Real complement_magnitude = 0;
  JointState projected;
  bool degenerate = false;
};

/// Magnitude of the component of `state` whose workspace index lies in `proj`.
SubspaceAmplitude subspace_amplitude(const JointState& state, const SubspaceProjector& proj);

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols);
  static DenseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Complex& operator()(Index r, Index c) { return data_[r * cols_ + c]; }
  const Complex& operator()(Index r, Index c) const { return data_[r * cols_ + c]; }

  DenseMatrix adjoint() const;
  std::vector<Complex> column(Index c) const;
  std::vector<Complex> multiply(std::span<const Complex> v) const;

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Complex> data_;
};

Real max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
/// max |M^H M - 1|.
Real unitarity_defect(const DenseMatrix& m);

inline constexpr Index kDenseGuard = 4096;

/// Column j is op applied to basis vector j.
DenseMatrix dense_materialize(const LinearOperator& op, Index guard = kDenseGuard);
LinearOperator dense_operator(DenseMatrix matrix, std::string label = "dense", Tally tags = {});

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);
Real norm2(std::span<const Complex> v);
Real distance(std::span<const Complex> a, std::span<const Complex> b);

std::vector<Complex> random_unit_vector(Index dimension, std::mt19937_64& rng);
/// Gram-Schmidt on a complex Gaussian matrix.
DenseMatrix random_unitary(Index dimension, std::mt19937_64& rng);

}  // namespace eigenmark
