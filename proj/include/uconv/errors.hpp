#pragma once

#include <stdexcept>
#include <string>

namespace uconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed data, violated preconditions. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The path leaves the ball |u(t) - 1| < sqrt(2) where a result requires it.
class RadiusError : public ValidationError {
 public:
  RadiusError(const std::string& what, int index, double t)
      : ValidationError(what), index(index), t(t) {}
  int index;
  double t;
};

// Valid input on which a computation cannot proceed. CLI exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Eigenvalue at (or within gap tolerance of) -1: the principal log is ambiguous.
class BranchError : public NumericError {
 public:
  BranchError(const std::string& what, double angle) : NumericError(what), angle(angle) {}
  double angle;
};

class ConditioningError : public NumericError {
 public:
  using NumericError::NumericError;
};

class EmptySpectrumError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateSpectrumError : public NumericError {
 public:
  DegenerateSpectrumError(const std::string& what, int index, double t, double gap)
      : NumericError(what), index(index), t(t), gap(gap) {}
  int index;
  double t;
  double gap;
};

// |p1 - p0| >= 1 between consecutive points; the grid must be refined.
class TransportBreakdownError : public NumericError {
 public:
  TransportBreakdownError(const std::string& what, double t0, double t1)
      : NumericError(what), t0(t0), t1(t1) {}
  double t0;
  double t1;
  int suggested_refinement = 2;
};

class FrameCorruptionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class PerturbationError : public NumericError {
 public:
  PerturbationError(const std::string& what, double smallest_gap)
      : NumericError(what), smallest_gap(smallest_gap) {}
  double smallest_gap;
};

// The principal log leaves the injectivity radius, so it is not a distance.
class InjectivityError : public NumericError {
 public:
  InjectivityError(const std::string& what, double t) : NumericError(what), t(t) {}
  double t;
};

}  // namespace uconv
