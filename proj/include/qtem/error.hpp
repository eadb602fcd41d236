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

#include <stdexcept>
#include <string>

namespace qtem {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed values, violated preconditions, unsupported
/// configurations. The CLI maps these to exit code 2.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// Unknown unit tag or a conversion between incompatible dimensions.
class UnitError : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

/// Netlist syntax or topology problem, carrying the 1-based source location.
/// A column of 0 means the whole line.
class NetlistError : public ValidationError {
   public:
    NetlistError(const std::string &message, int line, int column = 0)
        : ValidationError(format(message, line, column)), line_(line), column_(column) {
    }

    int line() const noexcept {
        return line_;
    }
    int column() const noexcept {
        return column_;
    }

   private:
    static std::string format(const std::string &message, int line, int column) {
        std::string where = "line " + std::to_string(line);
        if (column > 0) {
            where += ", column " + std::to_string(column);
        }
        return where + ": " + message;
    }

    int line_;
    int column_;
};

}  // namespace qtem
