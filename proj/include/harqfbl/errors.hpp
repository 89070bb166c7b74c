#pragma once

#include <stdexcept>
#include <string>

namespace harqfbl {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Base for failures of a numerical method on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The high-SNR alternating series lost too much precision to be trusted.
class SeriesUnstable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GammaKernelFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyFeasibleSet : public Error {
 public:
  using Error::Error;
};

}  // namespace harqfbl
