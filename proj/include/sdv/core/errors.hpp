#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdv {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a measurement formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two disparity maps share no jointly-valid pixel.
class InsufficientOverlapError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: bad parameters, missing thresholds, unknown labels.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Scene generation could not satisfy a placement constraint.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A value violates the invariants of its type.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input. Carries the byte offset into the input and
/// the JSON-pointer path of the offending field (empty when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset,
             std::string field_path)
      : Error(what + " (byte " + std::to_string(byte_offset) +
              (field_path.empty() ? "" : ", field " + field_path) + ")"),
        byte_offset_(byte_offset),
        field_path_(std::move(field_path)) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::size_t byte_offset_;
  std::string field_path_;
};

}  // namespace sdv
