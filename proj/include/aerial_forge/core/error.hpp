/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The aerial-forge Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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
#include <string_view>

namespace aerial_forge {

// Every failure raised by the library carries one of these codes so callers
// (tests, the CLI exit-code mapping, python bindings) can branch on the kind
// without parsing messages.
enum class ErrorCode {
    InvalidArgument,
    ConfigError,
    IoError,
    // graph
    DuplicateKind,
    UnknownKind,
    CycleDetected,
    PortMismatch,
    BlobLoadError,
    MissingInput,
    SpecMismatch,
    NodeFailure,
    // engine blob
    BadMagic,
    UnsupportedVersion,
    CrcMismatch,
    MalformedHeader,
    WeightBoundsError,
    InvalidLayerGraph,
    // estimators
    FactorizationFailure,
    UnsupportedPrbSize,
    BankError,
    // modem
    LengthError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message)
{
    if (!condition) raise(code, message);
}

} // namespace aerial_forge
