// Copyright 2026 The qchar Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qchar {

/// Parameter outside its documented domain (negative coupling, bad level index, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model requested is not covered by this code path (e.g. d3 != 0 in the signal model).
class UnsupportedModel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// GG^T is numerically singular; the caller should fall back to a reduced basis.
class DegenerateBasis : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file. Carries the 1-based line number (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qchar
