#pragma once

#include <stdexcept>
#include <string>

namespace swarmtopo {

/// Error families. The command line tool maps each family to its own exit code.
enum class ErrorFamily {
  io = 2,
  config = 3,
  geometry = 4,
  protocol = 5,
  oracle = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}

  ErrorFamily family() const noexcept { return family_; }

 private:
  ErrorFamily family_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorFamily::io, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorFamily::config, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(ErrorFamily::protocol, what) {}
};

class OracleError : public Error {
 public:
  explicit OracleError(const std::string& what) : Error(ErrorFamily::oracle, what) {}
};

}  // namespace swarmtopo
