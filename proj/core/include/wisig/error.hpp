#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wisig {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition (dimension mismatch, non-finite
/// values, wrong labels, writer overlap, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An operation would produce nothing (e.g. fewer than two samples to pair).
class EmptyResult : public Error {
 public:
  using Error::Error;
};

/// The dataset cannot satisfy the partition recipe.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TrainingFailure : public Error {
 public:
  TrainingFailure(const std::string& what, std::uint64_t iterations, double kkt_gap)
      : Error(what), iterations_(iterations), kkt_gap_(kkt_gap) {}

  std::uint64_t iterations() const noexcept { return iterations_; }
  double kkt_gap() const noexcept { return kkt_gap_; }

 private:
  std::uint64_t iterations_;
  double kkt_gap_;
};

/// Malformed input file. `location` is a 1-based line number for text files
/// and a 0-based byte offset for binary files.
class ParseError : public Error {
 public:
  enum class Unit { line, byte_offset };

  ParseError(const std::string& what, Unit unit, std::size_t location)
      : Error(what), unit_(unit), location_(location) {}

  Unit unit() const noexcept { return unit_; }
  std::size_t location() const noexcept { return location_; }

 private:
  Unit unit_;
  std::size_t location_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wisig
