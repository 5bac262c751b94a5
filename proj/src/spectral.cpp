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

#include "eigenmark/spectral.hpp"

#include <cmath>

#include <fmt/format.h>

namespace eigenmark {

namespace {

constexpr Real kTwoPi = 2 * kPi;
constexpr Real kSamePhase = 1e-12L;
constexpr Real kBasisTolerance = 1e-10L;

Complex json_complex(const nlohmann::json& x) {
  if (x.is_number()) return Complex(x.get<double>(), 0);
  if (x.is_array() && x.size() == 2) return Complex(x[0].get<double>(), x[1].get<double>());
  throw SpectralError("eigenbasis entries must be numbers or [re, im] pairs");
}

LinearOperator spectral_operator(const DenseMatrix& basis, std::vector<Real> phases, std::string label) {
  auto matrix = spectral_power_matrix(basis, phases, 1);
  auto op = dense_operator(std::move(matrix), label, Tally{{std::string(kResourceU), 1}});
  return op.with_power([basis, phases = std::move(phases), label](std::uint64_t k) {
    return dense_operator(spectral_power_matrix(basis, phases, k), fmt::format("{}^{}", label, k),
                          Tally{{std::string(kResourceU), k}});
  });
}

}  // namespace

Real wrap_phase(Real angle) {
  Real r = std::fmod(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

Real circle_distance(Real a, Real b) { return std::abs(wrap_phase(a - b)); }

SpectralUnitary::SpectralUnitary(std::vector<Real> eigenphases, Real gap)
    : SpectralUnitary(eigenphases, DenseMatrix::identity(eigenphases.size()), gap) {}

SpectralUnitary::SpectralUnitary(std::vector<Real> eigenphases, DenseMatrix eigenbasis, Real gap)
    : eigenphases_(std::move(eigenphases)), eigenbasis_(std::move(eigenbasis)), gap_(gap) {
  if (eigenphases_.empty()) throw SpectralError("spectrum needs at least one eigenphase");
  for (auto& p : eigenphases_) {
    if (!std::isfinite(p)) throw SpectralError("eigenphases must be finite");
    p = wrap_phase(p);
  }
  if (!(gap_ > 0 && gap_ < 1)) throw SpectralError(fmt::format("gap must lie in (0, 1), got {}", gap_));
  if (eigenbasis_.rows() != dim() || eigenbasis_.cols() != dim()) {
    throw DimensionMismatch("SpectralUnitary eigenbasis", dim(), eigenbasis_.rows());
  }
  const Real defect = unitarity_defect(eigenbasis_);
  if (defect > kBasisTolerance) {
    throw SpectralError(fmt::format("eigenbasis is not unitary (defect {:.3g})", static_cast<double>(defect)));
  }
}

Index ResolvedTarget::marked_count() const {
  Index n = 0;
  for (bool m : marked) n += m ? 1 : 0;
  return n;
}

ResolvedTarget resolve_target(const SpectralUnitary& spec, const MarkTarget& target) {
  if (!(target.b > 0 && target.b <= 0.25L)) {
    throw SpectralError(fmt::format("accuracy fraction b must lie in (0, 0.25], got {}",
                                    static_cast<double>(target.b)));
  }
  const Real gap = spec.gap();
  const Real window = target.b * gap;

  ResolvedTarget out;
  out.target = target;
  out.target.psi_prime = wrap_phase(target.psi_prime);
  out.theta_min = gap / 2;
  out.shifted_phases.reserve(spec.dim());
  out.marked.reserve(spec.dim());
  for (Real p : spec.eigenphases()) {
    const Real lambda = wrap_phase(p - out.target.psi_prime);
    out.shifted_phases.push_back(lambda);
    out.marked.push_back(std::abs(lambda) < window);
  }

  std::optional<Index> anchor;
  for (Index i = 0; i < spec.dim(); ++i) {
    if (out.marked[i]) {
      anchor = i;
      break;
    }
  }
  if (target.marked_phase) {
    out.marked_phase = wrap_phase(*target.marked_phase);
    if (circle_distance(out.marked_phase, out.target.psi_prime) >= window) {
      throw SpectralError(fmt::format("estimate psi'={} is not within b*gap={} of psi={}",
                                      static_cast<double>(out.target.psi_prime), static_cast<double>(window),
                                      static_cast<double>(out.marked_phase)));
    }
    bool found = false;
    for (Real p : spec.eigenphases()) found = found || circle_distance(p, out.marked_phase) <= kSamePhase;
    if (!found) {
      throw SpectralError(fmt::format("marked phase {} is not an eigenphase",
                                      static_cast<double>(out.marked_phase)));
    }
  } else {
    if (!anchor) {
      throw SpectralError(fmt::format("no eigenphase within b*gap={} of psi'={}", static_cast<double>(window),
                                      static_cast<double>(out.target.psi_prime)));
    }
    out.marked_phase = spec.eigenphases()[*anchor];
  }

  for (Index i = 0; i < spec.dim(); ++i) {
    const Real d = circle_distance(spec.eigenphases()[i], out.marked_phase);
    if (d > kSamePhase && d <= gap) {
      throw SpectralError(fmt::format("eigenphase {} (direction {}) is within gap {} of the marked phase {}",
                                      static_cast<double>(spec.eigenphases()[i]), i, static_cast<double>(gap),
                                      static_cast<double>(out.marked_phase)));
    }
  }
  check_separation(out, gap);
  return out;
}

void check_separation(const ResolvedTarget& resolved, Real gap) {
  const Real window = resolved.target.b * gap;
  for (Index i = 0; i < resolved.shifted_phases.size(); ++i) {
    const Real lambda = resolved.shifted_phases[i];
    if (resolved.marked[i] && !(std::abs(lambda) < window)) {
      throw AssumptionViolation(fmt::format("marked shifted eigenphase {} (direction {}) is not below b*gap={}",
                                            static_cast<double>(lambda), i, static_cast<double>(window)),
                                i, lambda);
    }
    if (!resolved.marked[i] && !(std::abs(lambda) > resolved.theta_min)) {
      throw AssumptionViolation(fmt::format("shifted eigenphase {} (direction {}) is not above theta_min={}",
                                            static_cast<double>(lambda), i,
                                            static_cast<double>(resolved.theta_min)),
                                i, lambda);
    }
  }
}

DenseMatrix spectral_power_matrix(const DenseMatrix& eigenbasis, const std::vector<Real>& phases,
                                  std::uint64_t exponent) {
  const Index n = phases.size();
  std::vector<Complex> diag(n);
  for (Index i = 0; i < n; ++i) {
    // reduce the phase first so large exponents stay exact
    const Real angle = std::fmod(std::fmod(phases[i], kTwoPi) * static_cast<Real>(exponent), kTwoPi);
    diag[i] = std::polar(Real(1), angle);
  }
  DenseMatrix scaled = eigenbasis;
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) scaled(r, c) *= diag[c];
  }
  return scaled * eigenbasis.adjoint();
}

LinearOperator build_unitary(const SpectralUnitary& spec) {
  return spectral_operator(spec.eigenbasis(), spec.eigenphases(), "U");
}

LinearOperator build_shifted(const SpectralUnitary& spec, const ResolvedTarget& resolved) {
  if (resolved.shifted_phases.size() != spec.dim()) {
    throw DimensionMismatch("build_shifted", spec.dim(), resolved.shifted_phases.size());
  }
  check_separation(resolved, spec.gap());
  return spectral_operator(spec.eigenbasis(), resolved.shifted_phases, "S");
}

LinearOperator ideal_marker(const SpectralUnitary& spec, const ResolvedTarget& resolved, std::optional<Real> phi) {
  const Real angle = phi.value_or(resolved.target.phi);
  std::vector<Real> phases(spec.dim(), 0);
  for (Index i = 0; i < spec.dim(); ++i) phases[i] = resolved.marked[i] ? angle : 0;
  return dense_operator(spectral_power_matrix(spec.eigenbasis(), phases, 1), "I_psi");
}

SpectralModel spectral_model_from_json(const nlohmann::json& doc) {
  try {
    const auto phases_d = doc.at("eigenphases").get<std::vector<double>>();
    std::vector<Real> phases(phases_d.begin(), phases_d.end());
    if (doc.contains("dim") && doc.at("dim").get<Index>() != phases.size()) {
      throw DimensionMismatch("spectral model eigenphases", doc.at("dim").get<Index>(), phases.size());
    }
    const Index n = phases.size();
    DenseMatrix basis = DenseMatrix::identity(n);
    if (doc.contains("eigenbasis")) {
      const auto& eb = doc.at("eigenbasis");
      if (eb.is_string()) {
        if (eb.get<std::string>() != "computational") {
          throw SpectralError("eigenbasis must be \"computational\" or a matrix");
        }
      } else {
        if (!eb.is_array() || eb.size() != n) throw SpectralError("eigenbasis matrix must have dim rows");
        for (Index r = 0; r < n; ++r) {
          if (!eb[r].is_array() || eb[r].size() != n) throw SpectralError("eigenbasis matrix must have dim columns");
          for (Index c = 0; c < n; ++c) basis(r, c) = json_complex(eb[r][c]);
        }
      }
    }
    SpectralUnitary spectrum(std::move(phases), std::move(basis), doc.at("delta").get<double>());
    MarkTarget target;
    const auto& t = doc.at("target");
    target.psi_prime = t.at("psi_prime").get<double>();
    if (t.contains("b")) target.b = t.at("b").get<double>();
    if (t.contains("phi")) target.phi = t.at("phi").get<double>();
    if (t.contains("marked_phase")) target.marked_phase = t.at("marked_phase").get<double>();
    return SpectralModel{std::move(spectrum), target};
  } catch (const nlohmann::json::exception& e) {
    throw SpectralError(std::string("spectral model: ") + e.what());
  }
}

nlohmann::json spectral_model_to_json(const SpectralModel& model) {
  nlohmann::json doc;
  const auto& s = model.spectrum;
  doc["dim"] = s.dim();
  std::vector<double> phases(s.eigenphases().begin(), s.eigenphases().end());
  doc["eigenphases"] = phases;
  if (max_abs_diff(s.eigenbasis(), DenseMatrix::identity(s.dim())) == 0) {
    doc["eigenbasis"] = "computational";
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < s.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < s.dim(); ++c) {
        row.push_back({static_cast<double>(s.eigenbasis()(r, c).real()),
                       static_cast<double>(s.eigenbasis()(r, c).imag())});
      }
      rows.push_back(row);
    }
    doc["eigenbasis"] = rows;
  }
  doc["delta"] = static_cast<double>(s.gap());
  doc["target"] = {{"psi_prime", static_cast<double>(model.target.psi_prime)},
                   {"b", static_cast<double>(model.target.b)},
                   {"phi", static_cast<double>(model.target.phi)}};
  if (model.target.marked_phase) doc["target"]["marked_phase"] = static_cast<double>(*model.target.marked_phase);
  return doc;
}

}  // namespace eigenmark
