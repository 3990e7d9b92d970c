/* Copyright 2026 The refseg Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef REFSEG_ERRORS_H_
#define REFSEG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace refseg {

// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  kInvalidInput,  // precondition violated by the caller
  kDimension,     // mask/image grid mismatch
  kParse,         // malformed file or wire payload
  kConfig,        // bad run configuration
  kBackend,       // model service failed after retries
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kDimension, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorKind::kParse, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

// `retryable` marks transport-level failures (timeouts, refused
// connections, 5xx) as opposed to a well-formed error reply.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable)
      : Error(ErrorKind::kBackend, what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

}  // namespace refseg

#endif  // REFSEG_ERRORS_H_
