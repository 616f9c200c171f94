#pragma once

#include <stdexcept>
#include <string>

namespace opkit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch, non-square input or non-finite entries.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A tuning parameter is out of its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an input that violates its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Hypotheses of a formula (range/kernel inclusion, contraction, commutation)
/// are not satisfied by the supplied operators.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// The two-point problem (or its discretisation) is not uniquely solvable.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach its accuracy target.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// No principal square root exists (eigenvalue on the closed negative axis).
class NoPrincipalRootError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
 public:
  ParseError(const std::string& location, const std::string& what)
      : Error(location + ": " + what), location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// The Laplacian model parameters fail one or more feasibility screens.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace opkit
