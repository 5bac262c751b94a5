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

#include "eigenmark/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "eigenmark/complexity.hpp"

namespace eigenmark {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "spectral", "variant", "workspace", "level", "registers", "phi", "eps_target", "invocations", "safety",
    "random_inputs", "seed", "calibration", "calibration_cache", "sweep", "compare"};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("field '{}': {}", key, e.what()));
  }
}

template <typename T>
std::vector<T> get_list(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  auto v = get_field<std::vector<T>>(doc, key);
  if (v.empty()) throw ConfigError(fmt::format("field '{}' must be a nonempty list", key));
  return v;
}

std::vector<Real> get_reals(const json& doc, const char* key) {
  std::vector<Real> out;
  for (double x : get_list<double>(doc, key)) out.push_back(x);
  return out;
}

SpectralModel parse_spectral(const json& node, const std::string& base_dir) {
  try {
    if (node.is_string()) return spectral_model_from_json(read_json(resolve_path(base_dir, node.get<std::string>())));
    return spectral_model_from_json(node);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("spectral model: {}", e.what()));
  }
}

}  // namespace

unsigned RunConfig::level_or_registers() const {
  switch (variant) {
    case Variant::pea:
      return 0;
    case Variant::fixed_point:
      if (level) return *level;
      break;
    case Variant::voting:
      if (registers) return *registers;
      break;
  }
  throw ConfigError(fmt::format("variant {} has no level or register count", to_string(variant)));
}

Real RunConfig::marker_phase() const {
  if (phi) return *phi;
  return spectral ? spectral->target.phi : kPi;
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError(fmt::format("unknown config field '{}'", key));
  }
  RunConfig cfg;
  if (doc.contains("spectral")) cfg.spectral = parse_spectral(doc.at("spectral"), base_dir);
  if (doc.contains("variant")) {
    try {
      cfg.variant = variant_from_string(get_field<std::string>(doc, "variant"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("workspace")) {
    const auto& ws = doc.at("workspace");
    if (ws.is_string()) {
      if (ws.get<std::string>() != "calibrate") throw ConfigError("workspace must be \"calibrate\" or {mu, window}");
    } else {
      WorkspaceOverride o{get_field<unsigned>(ws, "mu"), get_field<Index>(ws, "window")};
      try {
        WorkspaceLayout(o.mu, o.window);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      cfg.workspace = o;
    }
  }
  if (doc.contains("level")) cfg.level = get_field<unsigned>(doc, "level");
  if (doc.contains("registers")) cfg.registers = get_field<unsigned>(doc, "registers");
  if (doc.contains("phi")) cfg.phi = get_field<double>(doc, "phi");

  if (doc.contains("eps_target") && doc.contains("invocations")) {
    throw ConfigError("set either eps_target or invocations, not both");
  }
  try {
    if (doc.contains("eps_target")) {
      const Real eps = get_field<double>(doc, "eps_target");
      if (!(eps > 0 && eps < 1)) throw ConfigError("eps_target must lie in (0, 1)");
      cfg.eps_target = eps;
    } else if (doc.contains("invocations")) {
      const Real safety = doc.contains("safety") ? Real(get_field<double>(doc, "safety")) : kDefaultSafety;
      cfg.eps_target = target_from_invocations(get_field<std::uint64_t>(doc, "invocations"), safety);
    } else if (doc.contains("safety")) {
      throw ConfigError("safety needs invocations");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (doc.contains("random_inputs")) cfg.random_inputs = get_field<Index>(doc, "random_inputs");
  if (doc.contains("seed")) cfg.seed = get_field<std::uint64_t>(doc, "seed");
  if (doc.contains("calibration")) {
    const auto& c = doc.at("calibration");
    if (c.contains("eta_target")) cfg.calibration.eta_target = get_field<double>(c, "eta_target");
    if (c.contains("max_qubits")) cfg.calibration.max_qubits = get_field<unsigned>(c, "max_qubits");
    if (c.contains("grid_per_bin")) cfg.calibration.grid_per_bin = get_field<unsigned>(c, "grid_per_bin");
    if (c.contains("dense_bins")) cfg.calibration.dense_bins = get_field<unsigned>(c, "dense_bins");
    if (!(cfg.calibration.eta_target > 0)) throw ConfigError("calibration.eta_target must be positive");
    if (cfg.calibration.grid_per_bin < 64) throw ConfigError("calibration.grid_per_bin must be at least 64");
  }
  if (doc.contains("calibration_cache")) {
    cfg.calibration_cache = resolve_path(base_dir, get_field<std::string>(doc, "calibration_cache"));
  }
  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    cfg.sweep.mu = get_list<unsigned>(s, "mu");
    cfg.sweep.level = get_list<unsigned>(s, "level");
    cfg.sweep.registers = get_list<unsigned>(s, "registers");
    cfg.sweep.delta = get_reals(s, "delta");
  }
  if (doc.contains("compare")) {
    const auto& c = doc.at("compare");
    cfg.compare.delta = get_reals(c, "delta");
    cfg.compare.eps = get_reals(c, "eps");
    if (c.contains("simulate")) cfg.compare.simulate = get_field<bool>(c, "simulate");
  }

  // exactly one of {q, nu}, matching the variant
  const bool has_level = cfg.level || !cfg.sweep.level.empty();
  const bool has_registers = cfg.registers || !cfg.sweep.registers.empty();
  switch (cfg.variant) {
    case Variant::pea:
      if (has_level || has_registers) throw ConfigError("variant pea takes neither level nor registers");
      break;
    case Variant::fixed_point:
      if (has_registers) throw ConfigError("variant fixed_point takes level, not registers");
      break;
    case Variant::voting:
      if (has_level) throw ConfigError("variant voting takes registers, not level");
      if (cfg.registers && *cfg.registers % 2 == 0) throw ConfigError("registers must be odd");
      for (unsigned nu : cfg.sweep.registers) {
        if (nu % 2 == 0) throw ConfigError("sweep.registers entries must be odd");
      }
      break;
  }
  for (Real d : cfg.sweep.delta) {
    if (!(d > 0 && d < 1)) throw ConfigError("sweep.delta entries must lie in (0, 1)");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_config(read_json(path), base.empty() ? "." : base);
}

}  // namespace eigenmark
