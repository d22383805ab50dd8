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

#include "dpident.h"

#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "dpident/commands.hpp"
#include "dpident/errors.hpp"

#ifndef DPIDENT_VERSION
#define DPIDENT_VERSION "0.0.0"
#endif

struct dpident_result {
  dpident::CommandResult payload;
};

namespace {

thread_local std::string g_last_error;

using CommandFn = dpident::CommandResult (*)(const std::string&);

dpident_status run_command(CommandFn command, const char* config_json,
                           dpident_result** out_result) {
  if (config_json == nullptr || out_result == nullptr) {
    g_last_error = "null argument";
    return DPIDENT_ERROR_INVALID_ARGUMENT;
  }
  try {
    auto result = std::make_unique<dpident_result>();
    result->payload = command(config_json);
    *out_result = result.release();
    g_last_error.clear();
    return DPIDENT_OK;
  } catch (const std::invalid_argument& error) {
    g_last_error = error.what();
    return DPIDENT_ERROR_INVALID_ARGUMENT;
  } catch (const std::domain_error& error) {
    g_last_error = error.what();
    return DPIDENT_ERROR_INVALID_ARGUMENT;
  } catch (const dpident::DataError& error) {
    g_last_error = error.what();
    return DPIDENT_ERROR_DATA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DPIDENT_ERROR_OUT_OF_MEMORY;
  } catch (const std::exception& error) {
    g_last_error = error.what();
    return DPIDENT_ERROR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return DPIDENT_ERROR_RUNTIME;
  }
}

}  // namespace

extern "C" {

const char* dpident_version(void) { return DPIDENT_VERSION; }

const char* dpident_last_error(void) { return g_last_error.c_str(); }

dpident_status dpident_calibrate(const char* config_json,
                                 dpident_result** out_result) {
  return run_command(&dpident::cmd_calibrate, config_json, out_result);
}

dpident_status dpident_bounds_table(const char* config_json,
                                    dpident_result** out_result) {
  return run_command(&dpident::cmd_bounds, config_json, out_result);
}

dpident_status dpident_synthetic_audit(const char* config_json,
                                       dpident_result** out_result) {
  return run_command(&dpident::cmd_synthetic, config_json, out_result);
}

dpident_status dpident_train_audit(const char* config_json,
                                   dpident_result** out_result) {
  return run_command(&dpident::cmd_train_audit, config_json, out_result);
}

dpident_status dpident_mi_compare(const char* config_json,
                                  dpident_result** out_result) {
  return run_command(&dpident::cmd_mi_compare, config_json, out_result);
}

dpident_status dpident_rank_sensitivity(const char* config_json,
                                        dpident_result** out_result) {
  return run_command(&dpident::cmd_sensitivity, config_json, out_result);
}

const char* dpident_result_summary_json(const dpident_result* result) {
  return result == nullptr ? nullptr : result->payload.summary_json.c_str();
}

size_t dpident_result_table_count(const dpident_result* result) {
  return result == nullptr ? 0 : result->payload.tables.size();
}

const char* dpident_result_table_name(const dpident_result* result,
                                      size_t index) {
  if (result == nullptr || index >= result->payload.tables.size()) {
    return nullptr;
  }
  return result->payload.tables[index].first.c_str();
}

const char* dpident_result_table_csv(const dpident_result* result,
                                     size_t index) {
  if (result == nullptr || index >= result->payload.tables.size()) {
    return nullptr;
  }
  return result->payload.tables[index].second.c_str();
}

const char* dpident_result_table_by_name(const dpident_result* result,
                                         const char* name) {
  if (result == nullptr || name == nullptr) return nullptr;
  for (const auto& [table_name, csv] : result->payload.tables) {
    if (table_name == name) return csv.c_str();
  }
  return nullptr;
}

void dpident_result_free(dpident_result* result) { delete result; }

}  // extern "C"
