// Copyright 2026 The alloscore Authors.
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

// Exception hierarchy. Two families matter to callers:
//  * InputError: the caller handed us malformed or inconsistent data
//    (files, arguments, shapes). The CLI maps these to exit code 2.
//  * ComputeError: the data was well formed but a numerical procedure could
//    not produce an answer. The CLI maps these to exit code 3.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alloscore {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ComputeError : public Error {
 public:
  using Error::Error;
};

// --- input errors ---------------------------------------------------------

class InvalidArgument : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleAllocation : public InputError {
 public:
  using InputError::InputError;
};

class AsymmetricLevels : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateRecord : public InputError {
 public:
  using InputError::InputError;
};

class CrossedQuantiles : public InputError {
 public:
  using InputError::InputError;
};

class MissingLocation : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

// --- compute errors -------------------------------------------------------

class UnboundedQuantile : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class NonIntegrable : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class DegenerateTail : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class NoConvergence : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class InfeasibleConstraint : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

}  // namespace alloscore
