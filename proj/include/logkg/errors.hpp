#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logkg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but references something that does not exist (e.g. an undeclared class).
class SemanticError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class EmbedderUnavailable : public Error {
 public:
  using Error::Error;
};

/// Transport-level failure talking to a generation backend. Always retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public TransportError {
 public:
  using TransportError::TransportError;
};

class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};

class RateLimited : public TransportError {
 public:
  using TransportError::TransportError;
};

class ConformingReport : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  using Error::Error;
};

class StorageFailure : public Error {
 public:
  using Error::Error;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

class PoolExhausted : public Error {
 public:
  PoolExhausted(const std::string& what, std::size_t achieved)
      : Error(what), achieved_(achieved) {}

  /// Number of events selected before the pool ran out.
  std::size_t achieved() const noexcept { return achieved_; }

 private:
  std::size_t achieved_;
};

}  // namespace logkg
