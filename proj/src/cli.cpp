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

#include "eigenmark/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "eigenmark/audit.hpp"
#include "eigenmark/complexity.hpp"
#include "eigenmark/fpqs.hpp"
#include "eigenmark/voting.hpp"

namespace eigenmark {

namespace {

using nlohmann::json;

const SpectralModel& require_spectral(const RunConfig& cfg) {
  if (!cfg.spectral) throw ConfigError("this subcommand needs a spectral model (field 'spectral')");
  return *cfg.spectral;
}

ResolvedTarget resolve_or_config_error(const SpectralModel& model) {
  try {
    return resolve_target(model.spectrum, model.target);
  } catch (const SpectralError& e) {
    throw ConfigError(fmt::format("target rejected: {}", e.what()));
  }
}

CalibrationCache open_cache(const RunConfig& cfg) {
  if (cfg.calibration_cache.empty()) return {};
  try {
    return CalibrationCache::load(cfg.calibration_cache);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("calibration cache {}: {}", cfg.calibration_cache, e.what()));
  }
}

WorkspaceLayout resolve_layout(const RunConfig& cfg, Real gap, Real b, CalibrationCache& cache) {
  if (cfg.workspace) return WorkspaceLayout(cfg.workspace->mu, cfg.workspace->window);
  return cache.get_or_calibrate(gap, b, cfg.calibration).layout();
}

/// Level or register count from the config, else planned from eps_target.
unsigned resolve_count(const RunConfig& cfg, Real measured_eta) {
  if (cfg.variant == Variant::pea) return 0;
  if (cfg.variant == Variant::fixed_point && cfg.level) return *cfg.level;
  if (cfg.variant == Variant::voting && cfg.registers) return *cfg.registers;
  if (!cfg.eps_target) {
    throw ConfigError(fmt::format("variant {} needs {} or eps_target", to_string(cfg.variant),
                                  cfg.variant == Variant::voting ? "registers" : "level"));
  }
  if (cfg.variant == Variant::voting) return plan_registers(*cfg.eps_target);
  if (measured_eta > kWorkingEta) {
    throw ConfigError(fmt::format("measured eta {} exceeds 2^-5; the recursion planner does not apply",
                                  format_real(measured_eta)));
  }
  try {
    return plan_recursion(std::max(measured_eta, Real(1e-30)), *cfg.eps_target).level;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json eta_to_json(const EtaReport& r) {
  json dirs = json::array();
  for (const auto& d : r.directions) {
    dirs.push_back({{"direction", d.direction},
                    {"eigenphase", static_cast<double>(d.eigenphase)},
                    {"shifted_phase", static_cast<double>(d.shifted_phase)},
                    {"marked", d.marked},
                    {"eta", static_cast<double>(d.eta)}});
  }
  return {{"directions", dirs},
          {"eta_marked", static_cast<double>(r.eta_marked)},
          {"eta_unmarked", static_cast<double>(r.eta_unmarked)},
          {"eta", static_cast<double>(r.eta)}};
}

std::mt19937_64 cell_rng(std::uint64_t seed, std::uint64_t cell) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32)};
  return std::mt19937_64(seq);
}

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Exceptions are
/// rethrown in index order once every worker has finished.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Two-direction model for the sweep's delta axis: the marked eigenphase
/// sits at b*delta/2 from the estimate 0, the other one just beyond delta on
/// the opposite side.
SpectralModel synthetic_model(Real delta, const MarkTarget& base) {
  MarkTarget t = base;
  t.psi_prime = 0;
  const Real marked = t.b * delta / 2;
  t.marked_phase = marked;
  SpectralUnitary spec({marked, marked - delta * Real(1.001)}, delta);
  return SpectralModel{spec, t};
}

struct SweepCell {
  Real delta;
  std::optional<unsigned> mu;
  unsigned count;
};

}  // namespace

RunOutcome run_calibrate(const RunConfig& cfg) {
  std::vector<std::pair<Real, Real>> targets;
  const Real b = cfg.spectral ? cfg.spectral->target.b : kDefaultAccuracyFraction;
  if (cfg.spectral) targets.emplace_back(cfg.spectral->spectrum.gap(), b);
  for (Real d : cfg.sweep.delta) targets.emplace_back(d, b);
  for (Real d : cfg.compare.delta) targets.emplace_back(d, b);
  if (targets.empty()) throw ConfigError("calibrate needs a spectral model, sweep.delta or compare.delta");
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  CalibrationCache cache = open_cache(cfg);
  RunOutcome out;
  json failures = json::array();
  for (auto [gap, bb] : targets) {
    try {
      const auto r = cache.get_or_calibrate(gap, bb, cfg.calibration);
      out.summary += fmt::format("delta={} b={}: mu={} window={} eta={}\n", format_real(gap), format_real(bb),
                                 r.qubits, r.window, format_real(r.eta));
    } catch (const CalibrationFailure& e) {
      out.exit_code = kExitPropertyFailure;
      failures.push_back({{"delta", static_cast<double>(gap)},
                          {"b", static_cast<double>(bb)},
                          {"message", e.what()},
                          {"best_mu", e.best().qubits},
                          {"best_window", e.best().window},
                          {"best_eta", static_cast<double>(e.best().eta)}});
      out.summary += std::string(e.what()) + "\n";
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  json doc = cache.to_json();
  if (!failures.empty()) doc["failures"] = failures;
  out.artifacts.emplace_back("calibration.json", doc.dump(2) + "\n");
  if (!cfg.calibration_cache.empty()) cache.save(cfg.calibration_cache);
  return out;
}

RunOutcome run_simulate(const RunConfig& cfg) {
  const auto& model = require_spectral(cfg);
  const auto resolved = resolve_or_config_error(model);
  CalibrationCache cache = open_cache(cfg);
  WorkspaceLayout layout = [&] {
    try {
      return resolve_layout(cfg, model.spectrum.gap(), model.target.b, cache);
    } catch (const CalibrationFailure&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (!cfg.calibration_cache.empty() && !cfg.workspace) cache.save(cfg.calibration_cache);

  const auto shifted = build_shifted(model.spectrum, resolved);
  const auto pea = build_pea(shifted, layout);
  const auto eta = measure_eta(pea, model.spectrum, resolved, layout);
  const unsigned count = resolve_count(cfg, eta.eta);
  const Real phi = cfg.marker_phase();

  MarkerAssembly assembly = [&] {
    try {
      return build_marker(cfg.variant, shifted, layout, count, phi);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  auto rng = cell_rng(cfg.seed, 0);
  const auto report = evaluate_marker(assembly, model.spectrum, resolved, cfg.random_inputs, rng);

  json checks = json::object();
  const bool superposition_ok = report.superposition_residual <= report.worst_residual + 1e-10L;
  checks["superposition_bound"] = superposition_ok;
  bool counters_ok = true;
  if (cfg.variant == Variant::fixed_point) {
    std::uint64_t np = 1;
    for (unsigned i = 0; i < count; ++i) np *= 9;
    counters_ok = report.counters.applications_p == np &&
                  report.counters.applications_u == np * layout.work_dim();
  } else if (cfg.variant == Variant::voting) {
    counters_ok = report.counters.applications_p == count &&
                  report.counters.applications_u == count * layout.work_dim();
  } else {
    counters_ok = report.counters.applications_p == 1 && report.counters.applications_u == layout.work_dim();
  }
  counters_ok = counters_ok && report.marker_counters.applications_u == 2 * report.counters.applications_u;
  checks["counter_law"] = counters_ok;

  json doc = {{"variant", to_string(cfg.variant)},
              {"seed", cfg.seed},
              {"delta", static_cast<double>(model.spectrum.gap())},
              {"b", static_cast<double>(model.target.b)},
              {"mu", layout.qubits()},
              {"window", layout.window()},
              {"eta", eta_to_json(eta)},
              {"marker", to_json(report)},
              {"checks", checks}};
  if (cfg.variant == Variant::fixed_point) {
    const auto s = predict_schedule(count, eta.eta);
    doc["schedule"] = {{"q", s.level},
                       {"m", s.m},
                       {"g", static_cast<double>(s.g)},
                       {"h", static_cast<double>(s.h)},
                       {"epsilon", static_cast<double>(s.epsilon)},
                       {"predicted_marked", static_cast<double>(s.predicted_marked)},
                       {"predicted_unmarked", static_cast<double>(s.predicted_unmarked)},
                       {"in_regime", s.in_regime}};
  }
  RunOutcome out;
  out.exit_code = superposition_ok && counters_ok ? kExitOk : kExitPropertyFailure;
  out.artifacts.emplace_back("report.json", doc.dump(2) + "\n");
  out.artifacts.emplace_back("report.csv", std::string(kMarkerCsvHeader) + "\n" + to_csv_rows(report));
  out.summary = fmt::format("{} mu={} window={} q_or_nu={} eta={} worst_residual={} superposition_residual={}\n",
                            to_string(cfg.variant), layout.qubits(), layout.window(), count, format_real(eta.eta),
                            format_real(report.worst_residual), format_real(report.superposition_residual));
  return out;
}

RunOutcome run_sweep(const RunConfig& cfg, unsigned jobs) {
  if (cfg.sweep.empty()) throw ConfigError("sweep needs at least one axis under 'sweep'");
  std::vector<Real> deltas = cfg.sweep.delta;
  if (deltas.empty()) deltas.push_back(require_spectral(cfg).spectrum.gap());
  std::vector<std::optional<unsigned>> mus;
  for (unsigned mu : cfg.sweep.mu) mus.emplace_back(mu);
  if (mus.empty()) mus.emplace_back();
  std::vector<unsigned> counts;
  if (cfg.variant == Variant::fixed_point) counts = cfg.sweep.level;
  if (cfg.variant == Variant::voting) counts = cfg.sweep.registers;
  if (counts.empty()) counts.push_back(cfg.variant == Variant::pea ? 0 : cfg.level_or_registers());

  std::vector<SweepCell> cells;
  for (Real d : deltas) {
    for (const auto& mu : mus) {
      for (unsigned c : counts) cells.push_back({d, mu, c});
    }
  }
  // canonical order: by (delta, mu, q_or_nu)
  std::sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
    return std::tie(a.delta, a.mu, a.count) < std::tie(b.delta, b.mu, b.count);
  });

  const MarkTarget base = cfg.spectral ? cfg.spectral->target : MarkTarget{};
  // calibrations happen up front so the cache is never shared across threads
  CalibrationCache cache = open_cache(cfg);
  std::vector<WorkspaceLayout> layouts;
  std::vector<SpectralModel> models;
  for (const auto& cell : cells) {
    SpectralModel model = cfg.sweep.delta.empty() ? require_spectral(cfg) : synthetic_model(cell.delta, base);
    try {
      if (cell.mu) {
        layouts.push_back(best_window(cell.delta, model.target.b, *cell.mu, cfg.calibration).layout());
      } else {
        layouts.push_back(resolve_layout(cfg, cell.delta, model.target.b, cache));
      }
    } catch (const CalibrationFailure&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    models.push_back(std::move(model));
  }
  if (!cfg.calibration_cache.empty()) cache.save(cfg.calibration_cache);

  std::vector<std::string> rows(cells.size());
  const Real phi = cfg.marker_phase();
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto& model = models[i];
    const auto resolved = resolve_or_config_error(model);
    const auto shifted = build_shifted(model.spectrum, resolved);
    MarkerAssembly assembly = [&] {
      try {
        return build_marker(cfg.variant, shifted, layouts[i], cells[i].count, phi);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    auto rng = cell_rng(cfg.seed, i);
    const auto report = evaluate_marker(assembly, model.spectrum, resolved, cfg.random_inputs, rng);
    const std::string prefix = fmt::format("{},{},", format_real(cells[i].delta), layouts[i].window());
    std::string body = to_csv_rows(report);
    std::string prefixed;
    std::size_t start = 0;
    while (start < body.size()) {
      const auto end = body.find('\n', start);
      prefixed += prefix + body.substr(start, end - start + 1);
      start = end + 1;
    }
    rows[i] = std::move(prefixed);
  });

  RunOutcome out;
  std::string csv = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) csv += r;
  out.artifacts.emplace_back("sweep.csv", csv);
  out.summary = fmt::format("sweep: {} cells\n", cells.size());
  return out;
}

RunOutcome run_compare(const RunConfig& cfg) {
  if (cfg.compare.delta.empty() || cfg.compare.eps.empty()) {
    throw ConfigError("compare needs compare.delta and compare.eps");
  }
  CalibrationCache cache = open_cache(cfg);
  const Real b = cfg.spectral ? cfg.spectral->target.b : kDefaultAccuracyFraction;
  WorkspaceSizer sizer;
  if (cfg.compare.simulate) {
    sizer = [&](Real delta) -> std::optional<unsigned> {
      return cache.get_or_calibrate(delta, b, cfg.calibration).qubits;
    };
  }
  std::vector<ComplexityRow> rows;
  try {
    rows = tabulate(cfg.compare.delta, cfg.compare.eps, sizer);
  } catch (const CalibrationFailure&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.calibration_cache.empty() && cfg.compare.simulate) cache.save(cfg.calibration_cache);
  RunOutcome out;
  out.artifacts.emplace_back("compare.csv", to_csv(rows));
  out.summary = fmt::format("compare: {} rows\n", rows.size());
  return out;
}

RunOutcome run_audit_command(const RunConfig& cfg) {
  const auto checks = run_audit(cfg.seed);
  RunOutcome out;
  out.artifacts.emplace_back("audit.txt", format_audit(checks));
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!c.passed) {
      ++failed;
      out.summary += fmt::format("FAIL {}.{}: {}\n", c.module, c.name, c.detail);
    }
  }
  out.summary += fmt::format("audit: {}/{} properties hold\n", checks.size() - failed, checks.size());
  out.exit_code = failed == 0 ? kExitOk : kExitPropertyFailure;
  return out;
}

int run(const std::string& subcommand, const RunConfig& cfg, const CliOptions& options, std::ostream& log) {
  RunConfig effective = cfg;
  if (options.seed) effective.seed = *options.seed;
  RunOutcome outcome;
  try {
    if (subcommand == "calibrate") {
      outcome = run_calibrate(effective);
    } else if (subcommand == "simulate") {
      outcome = run_simulate(effective);
    } else if (subcommand == "sweep") {
      outcome = run_sweep(effective, options.jobs);
    } else if (subcommand == "compare") {
      outcome = run_compare(effective);
    } else if (subcommand == "audit") {
      outcome = run_audit_command(effective);
    } else {
      log << "error: unknown subcommand '" << subcommand << "'\n";
      return kExitConfigError;
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const CalibrationFailure& e) {
    log << "property failure: " << e.what() << "\n";
    return kExitPropertyFailure;
  }

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << options.out_dir << ": " << ec.message() << "\n";
    return kExitConfigError;
  }
  for (const auto& [name, contents] : outcome.artifacts) {
    const auto path = std::filesystem::path(options.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << contents;
    if (!f) {
      log << "error: cannot write " << path.string() << "\n";
      return kExitConfigError;
    }
  }
  log << outcome.summary;
  return outcome.exit_code;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Eigenstate-marking simulator"};
  std::string subcommand;
  std::string config_path;
  CliOptions options;
  std::uint64_t seed = 0;
  app.add_option("subcommand", subcommand, "calibrate | simulate | sweep | compare | audit")
      ->required()
      ->check(CLI::IsMember({"calibrate", "simulate", "sweep", "compare", "audit"}));
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", options.jobs, "parallel sweep cells")->check(CLI::PositiveNumber)->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  if (seed_opt->count() > 0) options.seed = seed;

  RunConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
  } else if (subcommand != "audit") {
    std::cerr << "config error: --config is required for " << subcommand << "\n";
    return kExitConfigError;
  }
  return run(subcommand, cfg, options, std::cout);
}

}  // namespace eigenmark
