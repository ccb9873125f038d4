// SPDX-License-Identifier: Apache-2.0
//
// dmimo-mpc — multipath classification and virtual-scatterer tracking for
// distributed massive MIMO channels
// Copyright (C) 2025-2026 the dmimo-mpc developers
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
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace dmimo
{

// Error categories map 1:1 onto CLI exit codes and C-API status values.
enum class ErrorCode : int
{
    input = 2,   // invalid argument, malformed file, schema violation
    numeric = 3, // non-convergence, singular matrix, degenerate data
    io = 4       // filesystem failures
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

class InvalidArgument : public Error
{
  public:
    explicit InvalidArgument(const std::string &msg) : Error(ErrorCode::input, msg) {}
};

// Parse failures carry the offending location (1-based line or CSV row).
class ParseError : public Error
{
  public:
    ParseError(const std::string &source, long line, const std::string &msg)
        : Error(ErrorCode::input, source + ":" + std::to_string(line) + ": " + msg),
          source_(source), line_(line) {}
    const std::string &source() const { return source_; }
    long line() const { return line_; }

  private:
    std::string source_;
    long line_;
};

class NumericError : public Error
{
  public:
    explicit NumericError(const std::string &msg) : Error(ErrorCode::numeric, msg) {}
};

class IoError : public Error
{
  public:
    explicit IoError(const std::string &msg) : Error(ErrorCode::io, msg) {}
};

} // namespace dmimo
