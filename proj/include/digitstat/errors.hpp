#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace digitstat {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (bad argument, empty input, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed digit data. Carries the byte offset of the offending byte.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A request would exceed a memory or table-size budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric result cannot be certified at the available precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint could not be used: wrong version, foreign config, corruption.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace digitstat
