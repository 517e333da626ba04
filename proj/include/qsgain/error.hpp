// Copyright 2026 The qsgain Authors
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
#include <utility>

namespace qsgain {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size or index argument is out of range (n = 0, mismatched blocks, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Which structural invariant a model matrix violates.
enum class Violation {
  kDimension,
  kNonFinite,
  kNotHermitian,
  kBrokenStructure,
};

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::kDimension: return "dimension";
    case Violation::kNonFinite: return "non-finite";
    case Violation::kNotHermitian: return "not-hermitian";
    case Violation::kBrokenStructure: return "broken-structure";
  }
  return "unknown";
}

/// Raised by model validation. Carries the violated invariant, the field it
/// was detected in and the worst-offending entry.
class ModelError : public Error {
 public:
  ModelError(Violation violation, std::string field, long row, long col,
             double magnitude, const std::string& what)
      : Error(what),
        violation_(violation),
        field_(std::move(field)),
        row_(row),
        col_(col),
        magnitude_(magnitude) {}

  Violation violation() const noexcept { return violation_; }
  const std::string& field() const noexcept { return field_; }
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  Violation violation_;
  std::string field_;
  long row_;
  long col_;
  double magnitude_;
};

/// An operation was called outside its domain (non-Hurwitz drift for an H-inf
/// norm, nonpositive rate, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical stage failed. `stage()` names the pipeline step.
class NumericError : public Error {
 public:
  NumericError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// The Riccati equation has no stabilizing solution at the requested epsilon.
/// Callers shrink epsilon and retry.
class InfeasibleEpsilon : public NumericError {
 public:
  InfeasibleEpsilon(double epsilon, const std::string& what)
      : NumericError("qmi", what), epsilon_(epsilon) {}

  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// A linear closed loop is not mean-square stable (second moments diverge).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed. Line and column are 1-based; zero when the
/// error is semantic rather than syntactic.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace qsgain
