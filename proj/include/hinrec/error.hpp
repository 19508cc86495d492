#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hinrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent schema / configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A record that violates the schema while loading a graph. Carries the
/// 1-based input line when the record came from a file (0 otherwise).
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Lookup of a node or edge type that the graph does not know.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Meta-path that does not type-check against a schema.
class MetaPathError : public Error {
 public:
  enum class Kind { empty, unknown_edge_type, type_mismatch, too_long, syntax };
  MetaPathError(Kind kind, std::size_t step, const std::string& what)
      : Error(what), kind_(kind), step_(step) {}
  Kind kind() const noexcept { return kind_; }
  /// 1-based offending step, 0 when not tied to a step.
  std::size_t step() const noexcept { return step_; }

 private:
  Kind kind_;
  std::size_t step_;
};

/// Full expansion refused because the projected relation is too large.
class SizeCapError : public Error {
 public:
  SizeCapError(const std::string& what, double projected)
      : Error(what), projected_(projected) {}
  double projected_entries() const noexcept { return projected_; }

 private:
  double projected_;
};

/// Numerical failure during training (non-finite loss, no positives).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace hinrec
