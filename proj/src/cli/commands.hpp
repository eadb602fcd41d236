// Copyright 2026 The qtem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <map>
#include <string>

namespace qtem::cli {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out;
    std::string format;  // empty: the command's default
    std::string constants;
};

struct CommandResult {
    std::string command;
    std::string body;
    nlohmann::ordered_json parameters;  // full parameter set after defaulting, SI
};

using Handler = std::function<CommandResult(const GlobalOptions &)>;
using Registry = std::map<std::string, Handler>;

/// Adds every analysis subcommand to `app`; handlers read their own options.
Registry register_commands(CLI::App &app);

}  // namespace qtem::cli
