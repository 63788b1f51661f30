// Copyright 2026 The dpiw Authors.
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

#include <stdexcept>
#include <string>

namespace dpiw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input files or configuration; carries a line number when one
/// is known (0 otherwise).
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An iterative solver stopped before reaching its tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The requested number of private weight releases cannot be served at the
/// given budget; max_feasible is the largest count that can.
class InfeasibleReleaseError : public Error {
 public:
  InfeasibleReleaseError(const std::string& what, long max_feasible)
      : Error(what + " (max feasible releases: " + std::to_string(max_feasible) + ")"),
        max_feasible_(max_feasible) {}
  long max_feasible() const { return max_feasible_; }

 private:
  long max_feasible_;
};

}  // namespace dpiw
