#pragma once

#include <stdexcept>
#include <string>

namespace ghzperc {

enum class ErrorKind {
  InvalidDimension,
  InvalidPlacement,
  InvalidParams,
  PartitionInfeasible,
  InvalidPartition,
  UnsupportedCombination,
  NoCrossing,
  InvalidConfig,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception type for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ghzperc
