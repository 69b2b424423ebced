/*
 * Copyright (c) 2026 The lecopt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace lecopt {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument outside the domain of a formula or distribution.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The caller violated an operation's precondition (bad k, unsorted input...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input data failed validation. `location()` names the file and the JSON
/// pointer of the offending value when known.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::string location = {})
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// A reference to a relation that was never declared.
class ReferenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The requested work exceeds a configured limit (oracle enumeration size,
/// joint parameter space). Never a silent truncation.
class RefusalError : public Error {
 public:
  using Error::Error;
};

} // namespace lecopt
