// Copyright 2026 The provrepro Authors
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

#ifndef PROVREPRO_ERROR_HPP
#define PROVREPRO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace provrepro {

enum class ErrorCode {
    // workflow definition
    ValidationFailed,
    ParseError,
    // simcloud
    UnknownFlavor,
    UnknownImage,
    IpSpaceExhausted,
    NoSuchInstance,
    InvalidName,
    FileNotFound,
    // executor
    StagingError,
    MissingInput,
    MalformedInput,
    UnknownWorkflow,
    // provenance
    UnmappedJob,
    DuplicateCapture,
    NotCaptured,
    PreconditionViolation,
    StoreCorruption,
    // reproduce
    ProvisioningFailed,
    InputsMissing,
    // anything touching the state directory
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map failure classes to exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace provrepro

#endif  // PROVREPRO_ERROR_HPP
