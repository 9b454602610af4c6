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
#include "aerial_forge/core/error.hpp"

namespace aerial_forge {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateKind: return "DuplicateKind";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::PortMismatch: return "PortMismatch";
    case ErrorCode::BlobLoadError: return "BlobLoadError";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NodeFailure: return "NodeFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CrcMismatch: return "CrcMismatch";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::WeightBoundsError: return "WeightBoundsError";
    case ErrorCode::InvalidLayerGraph: return "InvalidLayerGraph";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::UnsupportedPrbSize: return "UnsupportedPrbSize";
    case ErrorCode::BankError: return "BankError";
    case ErrorCode::LengthError: return "LengthError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

void raise(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace aerial_forge
