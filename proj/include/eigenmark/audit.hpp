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
 * The invariant suite run by `eigenmark audit`: one deterministic check per
 * module property, at desk scale.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eigenmark {

struct AuditCheck {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<AuditCheck> run_audit(std::uint64_t seed);

/// One "PASS module.name: detail" or "FAIL ..." line per check plus a total.
std::string format_audit(const std::vector<AuditCheck>& checks);

}  // namespace eigenmark
