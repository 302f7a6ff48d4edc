// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrn {

/// Root of the project exception hierarchy.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument value: wrong range, wrong length, unknown mode.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Qubit or element index outside the valid range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Resource limit exceeded (e.g. simulator qubit cap).
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Malformed on-disk data; carries the byte offset of the defect.
class FormatError : public Error {
  public:
    FormatError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    std::size_t byte_offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// Non-finite loss during training; carries the offending sample index.
class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& what, std::size_t sample_index)
        : Error(what + " (sample " + std::to_string(sample_index) + ")"),
          sample_(sample_index) {}
    std::size_t sample_index() const { return sample_; }

  private:
    std::size_t sample_;
};

/// Base for checkpoint load failures.
class CheckpointError : public Error {
  public:
    using Error::Error;
};

class VersionMismatchError : public CheckpointError {
  public:
    VersionMismatchError(int file_version, int supported_version)
        : CheckpointError("checkpoint format version mismatch: file has v" +
                          std::to_string(file_version) + ", this build supports v" +
                          std::to_string(supported_version)),
          file_(file_version), supported_(supported_version) {}
    int file_version() const { return file_; }
    int supported_version() const { return supported_; }

  private:
    int file_;
    int supported_;
};

class TruncationError : public CheckpointError {
  public:
    using CheckpointError::CheckpointError;
};

class ChecksumError : public CheckpointError {
  public:
    using CheckpointError::CheckpointError;
};

/// Model and dataset disagree (class sets, shapes). CLI exit code 5.
class IncompatibilityError : public Error {
  public:
    using Error::Error;
};

/// Command line misuse. CLI exit code 2.
class UsageError : public Error {
  public:
    using Error::Error;
};

}  // namespace qrn
