// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The detid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace detid::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitConfig = 2,
    kExitValidation = 3,
};

enum class KeyType { integer, number, string, boolean, array, object };
const char* to_string(KeyType t);

// One documented configuration key. Paths are dotted; every scalar key also
// has a flag spelled "--" + path with '_' replaced by '-'.
struct ConfigKey {
    std::string path;
    KeyType type = KeyType::number;
    bool nullable = false;
    bool flag = true;
    std::string doc;
};

const std::vector<std::string>& subcommands();
// Throws std::out_of_range for an unknown subcommand.
const std::vector<ConfigKey>& config_keys(const std::string& subcommand);

// Leaf paths of a JSON document; arrays and empty objects count as leaves.
std::vector<std::string> leaf_paths(const nlohmann::json& doc);

// Parses `text` as a value for `key`, throwing ConfigError when it does not
// type-check.
nlohmann::json parse_value(const ConfigKey& key, const std::string& text);

// Sets a dotted path, creating intermediate objects.
void set_path(nlohmann::json& doc, const std::string& path, nlohmann::json value);

// Checks every leaf of `doc` against the key table of `subcommand`.
void check_document(const std::string& subcommand, const nlohmann::json& doc);

// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace detid::cli
