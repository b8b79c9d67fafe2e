#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong shapes, out-of-range parameters, bad wiring.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix that was required to be unitary is not.
class NonUnitary : public Error {
 public:
  using Error::Error;
};

/// S <-> T conversion is undefined because the block to invert is singular.
class ConversionUnavailable : public Error {
 public:
  using Error::Error;
};

/// Geometric-series evaluation of the loop inverse cannot converge.
class SeriesDivergent : public Error {
 public:
  using Error::Error;
};

/// Physical and fictitious slots are coupled where they must not be.
class DecouplingViolation : public Error {
 public:
  using Error::Error;
};

/// A post-condition that holds for exact arithmetic on valid inputs failed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgraph
