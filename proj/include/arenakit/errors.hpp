#pragma once

#include <stdexcept>
#include <string>

namespace arenakit {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller broke an API precondition (bad arity, bad argument).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Agent/arena interaction protocol was violated (unknown arena id,
/// step after done, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Lookup of a name in a registry failed.
class RegistryError : public Error {
 public:
  using Error::Error;
};

/// String failed to parse against a grammar.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Stored data does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A component was asked to operate on an incompatible counterpart
/// (e.g. a pick-place tool stepped on a non-grid arena).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value or missing configuration file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace arenakit
