#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qors {

// Operand shapes do not line up (matrix products, subsystem dims, channel dims).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that was supposed to be a density operator is not one.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Kraus sets, unitaries or Hamiltonians violating their defining constraints.
class InvalidChannelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Physical or device parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or invalid configuration file. `line` is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, std::size_t line, const std::string& message)
      : std::runtime_error((file.empty() ? std::string("<input>") : file) +
                           (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                           message),
        file_(std::move(file)),
        line_(line),
        detail_(message) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string detail_;
};

}  // namespace qors
