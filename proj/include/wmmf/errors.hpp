// Copyright 2026 The wmmf Authors
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

namespace wmmf {

/// Base class for every error raised by the library. `code()` maps onto the
/// status values exported through the C interface.
class Error : public std::runtime_error {
 public:
  enum class Code {
    kValidation,
    kParse,
    kIo,
    kDomain,
    kDegenerateDual,
    kNumericalFailure,
    kPrecondition,
    kSize,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// A problem instance or configuration violates one of its invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(Code::kValidation, what) {}
};

/// Malformed input text; the message carries line/field context.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(Code::kParse, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Code::kIo, what) {}
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Code::kDomain, what) {}
};

/// Dual variables carry no mass where a weighted average needs it.
class DegenerateDualError : public Error {
 public:
  explicit DegenerateDualError(const std::string& what) : Error(Code::kDegenerateDual, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(Code::kNumericalFailure, what) {}
};

/// The instance is valid but not supported by the requested routine.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(Code::kPrecondition, what) {}
};

/// The instance is too large for an exhaustive routine.
class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(Code::kSize, what) {}
};

}  // namespace wmmf
