// Copyright 2026 The tempocorr Authors
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
#include <vector>

namespace tempocorr {

/// One violated invariant together with the size of the violation.
struct Violation {
    std::string invariant;
    double magnitude = 0.0;
    std::string detail;
};

/// Result of validating a numerical object. An empty report means valid.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Shapes, dimensions or labels do not fit together.
class StructuralError : public Error {
   public:
    using Error::Error;
};

/// Malformed input document (JSON, schedule strings, ...).
class InputError : public Error {
   public:
    using Error::Error;
};

/// A numerical invariant (positivity, normalization, ...) does not hold.
class InvariantError : public Error {
   public:
    InvariantError(const std::string &what, ValidationReport report)
        : Error(what + ": " + report.summary()), report_(std::move(report)) {}
    const ValidationReport &report() const { return report_; }

   private:
    ValidationReport report_;
};

/// A table entry needed by an operation is absent. Nothing is ever imputed.
class MissingDataError : public Error {
   public:
    using Error::Error;
};

/// Behavior violates the arrow-of-time constraints, so macrorealism is ill-posed.
class AotViolationError : public Error {
   public:
    using Error::Error;
};

/// An enumeration would exceed its size guard.
class SizeGuardError : public Error {
   public:
    using Error::Error;
};

/// The conic solver did not converge.
class SolverError : public Error {
   public:
    using Error::Error;
};

}  // namespace tempocorr
