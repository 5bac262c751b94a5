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
 * Batch driver behind the eigenmark executable.
 *
 *   eigenmark <calibrate|simulate|sweep|compare|audit> [--config PATH] [--out DIR] [--jobs N] [--seed N]
 *
 * Exit codes: 0 ok, 1 property failure, 2 usage or config error.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "eigenmark/config.hpp"

namespace eigenmark {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CliOptions {
  std::string out_dir = ".";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
};

/// Result of one subcommand, before anything is written.
struct RunOutcome {
  int exit_code = kExitOk;
  /// file name (relative to the output directory) -> contents
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::string summary;
};

/// Throws ConfigError on invalid configuration.
RunOutcome run_calibrate(const RunConfig& cfg);
RunOutcome run_simulate(const RunConfig& cfg);
RunOutcome run_sweep(const RunConfig& cfg, unsigned jobs);
RunOutcome run_compare(const RunConfig& cfg);
RunOutcome run_audit_command(const RunConfig& cfg);

/// Header row of sweep.csv.
inline constexpr const char* kSweepCsvHeader = "delta,window,direction,eigenphase,residual,variant,mu,q_or_nu,N_U,N_A";

/// Dispatches, writes artifacts under options.out_dir, logs the summary.
int run(const std::string& subcommand, const RunConfig& cfg, const CliOptions& options, std::ostream& log);

int run_cli(int argc, char** argv);

}  // namespace eigenmark
