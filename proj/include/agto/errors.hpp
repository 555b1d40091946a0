#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agto {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct LookupError : Error {
  using Error::Error;
};

struct InputError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file(file), line(line) {}
  std::string file;
  std::size_t line;
};

// Thrown when the objective returns NaN or an infinity.
struct EvaluationError : Error {
  EvaluationError(const std::string& what, std::vector<double> pos)
      : Error(what), position(std::move(pos)) {}
  std::vector<double> position;
};

struct ProtocolError : Error {
  using Error::Error;
};

} // namespace agto
