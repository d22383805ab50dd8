// Copyright 2026 The dpident Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPIDENT_COMMANDS_HPP_
#define DPIDENT_COMMANDS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "dpident/audit.hpp"

namespace dpident {

// Result of one toolkit command: a JSON summary plus named CSV tables.
// Output bytes are a pure function of the configuration, so identical
// configurations and seeds reproduce identical files.
struct CommandResult {
  std::string summary_json;
  std::vector<std::pair<std::string, std::string>> tables;  // name -> csv
};

// All commands take a JSON configuration string (the same schema the CLI
// reads from --config files). Invalid configurations raise
// std::invalid_argument; dataset problems raise DataError.
CommandResult cmd_calibrate(const std::string& config_json);
CommandResult cmd_bounds(const std::string& config_json);
CommandResult cmd_synthetic(const std::string& config_json);
CommandResult cmd_train_audit(const std::string& config_json);
CommandResult cmd_mi_compare(const std::string& config_json);
CommandResult cmd_sensitivity(const std::string& config_json);

std::string audit_report_to_json(const AuditReport& report);

}  // namespace dpident

#endif  // DPIDENT_COMMANDS_HPP_
