#pragma once

#include <stdexcept>
#include <string>

namespace hologforge {

// Every failure raised by the library derives from Error. The category decides
// the CLI exit code (config = 1, data = 2, io = 3).
enum class ErrorCategory { config, data, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Malformed input record. `location` is the 1-based line (CSV) or 0-based
// record index (JSON).
class ParseError : public Error {
 public:
  ParseError(std::size_t location, const std::string& what)
      : Error(ErrorCategory::data, what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class SelfLoopError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Out-of-range algorithm parameter (keep fraction, layout constants, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

// Inputs that disagree with each other (missing positions, partition gaps).
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

class NumericalDivergenceError : public Error {
 public:
  NumericalDivergenceError(int tick, const std::string& node, const std::string& what)
      : Error(ErrorCategory::data, what), tick_(tick), node_(node) {}
  int tick() const noexcept { return tick_; }
  const std::string& node() const noexcept { return node_; }

 private:
  int tick_;
  std::string node_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(ErrorCategory::config, path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace hologforge
