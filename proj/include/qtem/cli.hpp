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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qtem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUser = 2;

/// Runs the qtem command line. `args` excludes the program name. Results go
/// to `out` (or to --out, atomically, with a `<out>.manifest.json` sidecar);
/// diagnostics go to `err`. Returns 0 on success, 2 on user or validation
/// errors and 1 on internal errors.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Writes `contents` to a temporary file next to `path` and renames it into place.
void atomic_write(const std::string &path, std::string_view contents);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace qtem::cli
