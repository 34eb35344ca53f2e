#pragma once

#include <stdexcept>
#include <string>

namespace advprompt {

/// Base of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's domain (empty outcome, mismatched parents...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Anything that went wrong talking to an oracle.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Transport failure that persisted after all retries.
class OracleUnavailable : public OracleError {
 public:
  using OracleError::OracleError;
};

/// The oracle answered, but the answer does not match the wire protocol.
class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace advprompt
