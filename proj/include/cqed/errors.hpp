#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock truncation too small to hold a coherent state within the tail tolerance.
class TruncationTooSmall : public Error {
 public:
  TruncationTooSmall(double tail_mass, std::size_t truncation);
  double tail_mass() const { return tail_mass_; }
  std::size_t truncation() const { return truncation_; }

 private:
  double tail_mass_;
  std::size_t truncation_;
};

class NonPhysicalState : public Error {
 public:
  using Error::Error;
};

class UnsupportedInitialState : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

/// Bad scenario or configuration. `line` is 0 when the problem is not tied to
/// a line of a config file.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message, std::size_t line = 0);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }
  /// The message without the key and line prefix.
  const std::string& message() const { return message_; }

 private:
  std::string key_;
  std::string message_;
  std::size_t line_;
};

}  // namespace cqed
