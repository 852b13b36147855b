// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace volseq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be opened, written, or read.
struct IoError : Error {
  using Error::Error;
};

// Bad magic, unsupported version, or otherwise malformed file contents.
struct FormatError : Error {
  using Error::Error;
};

// Header declares more payload than the file contains.
struct TruncationError : FormatError {
  using FormatError::FormatError;
};

// Invalid or inconsistent configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// An origin or index outside the valid region.
struct BoundsError : Error {
  using Error::Error;
};

// Tensor or sequence shapes do not line up.
struct ShapeError : Error {
  using Error::Error;
};

// A required category label is missing or unusable.
struct LabelError : Error {
  using Error::Error;
};

// Not enough candidates to draw a sequence from.
struct PoolError : Error {
  using Error::Error;
};

// A dataset or archive is empty or internally inconsistent.
struct DataError : Error {
  using Error::Error;
};

// Non-finite value encountered during numeric work.
struct NumericError : Error {
  using Error::Error;
};

// Bad command-line flags or config keys.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace volseq
