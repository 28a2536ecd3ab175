#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace proso {

// Base class for all recoverable errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration file or invalid configured range.
class ConfigError : public Error {
  using Error::Error;
};

// Malformed persisted file (track/feature/plan/model/report), bad schema version.
class FormatError : public Error {
  using Error::Error;
};

// Feature vector length does not match the model or the configured dimension.
class DimensionError : public Error {
  using Error::Error;
};

// Scaling plan does not line up with the track's word spans.
class AlignmentError : public Error {
  using Error::Error;
};

// Ranker cannot be trained: missing neutral/emotional utterances or empty
// ordered pair set.
class TrainingError : public Error {
  using Error::Error;
};

// Non-finite objective or other numeric breakdown during optimization.
class NumericalError : public Error {
  using Error::Error;
};

// No parseable JSON object in a model response.
class ParseError : public Error {
  using Error::Error;
};

// JSON present but missing required keys.
class SchemaError : public Error {
  using Error::Error;
};

// Network or authentication failure after retries.
class TransportError : public Error {
  using Error::Error;
};

// Rate metric asked for with an empty reference.
class EmptyReferenceError : public Error {
  using Error::Error;
};

// Non-fatal diagnostics accumulated by operations that repair their input
// (clamping, padding, word mismatches). Callers pass nullptr to ignore.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace proso
