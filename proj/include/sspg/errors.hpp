// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sspg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (scene document, config values).
struct ValidationError : Error {
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, bad header).
struct FormatError : Error {
    using Error::Error;
};

/// Buffers or images whose sizes do not agree.
struct DimensionError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Bad command-line usage; maps to exit status 2.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace sspg
