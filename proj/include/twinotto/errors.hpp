// Copyright 2026 The twinotto Authors
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

namespace twinotto {

/// Bad input: a parameter or configuration value outside its allowed range.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string key, const std::string& what)
        : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)), message_(what) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string key_;
    std::string message_;
};

/// Base of all numerical failures (exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The dynamical matrix has eigenvalues off the imaginary axis, or is not
/// diagonalizable; the linearized model is outside its validity domain.
class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotHurwitzError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A covariance matrix violates sigma + i*Omega >= 0 (or a population came
/// out clearly negative).
class PhysicalityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonCanonicalPairError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BranchTrackingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionCapError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateNullspaceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File or stream failure, with the path in the message (exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace twinotto
