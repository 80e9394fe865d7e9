#pragma once

#include <stdexcept>
#include <string>

namespace susy {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class SusyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoolMismatchError : public SusyError {
 public:
  using SusyError::SusyError;
};

class DomainError : public SusyError {
 public:
  using SusyError::SusyError;
};

class ParityError : public SusyError {
 public:
  using SusyError::SusyError;
};

class DimensionError : public SusyError {
 public:
  using SusyError::SusyError;
};

class SingularBlockError : public SusyError {
 public:
  using SusyError::SusyError;
};

// Numerical failures: quadrature did not converge, integrals diverge, statistics too poor.
class NumericError : public SusyError {
 public:
  using SusyError::SusyError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ResolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class StatisticsError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ResourceError : public SusyError {
 public:
  using SusyError::SusyError;
};

}  // namespace susy
