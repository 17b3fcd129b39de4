// Copyright 2026 The FUSE Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fuse {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Thin QR met a column whose |R[j,j]| fell under the rank tolerance.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t column, double diagonal, const std::string& context = {})
      : Error((context.empty() ? std::string() : context + ": ") + "rank deficiency in column " +
              std::to_string(column) + " (|R[j,j]| = " + std::to_string(diagonal) + ")"),
        column_(column),
        diagonal_(diagonal) {}
  std::size_t column() const noexcept { return column_; }
  double diagonal() const noexcept { return diagonal_; }

 private:
  std::size_t column_;
  double diagonal_;
};

// NaN/Inf detected; the message names the phase that produced it.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fuse
