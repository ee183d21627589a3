#pragma once

#include <stdexcept>
#include <string>

namespace juliaflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPolynomial : public Error {
 public:
  using Error::Error;
};

class RootFindingError : public Error {
 public:
  using Error::Error;
};

// Orbit neither escaped nor stayed inside the escape radius for the full budget.
class IndeterminateGreen : public Error {
 public:
  using Error::Error;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

// No critical point escapes: the Julia set is connected.
class ConnectedJuliaSet : public Error {
 public:
  using Error::Error;
};

class ResolutionInsufficient : public Error {
 public:
  using Error::Error;
};

class PartitionInconsistency : public Error {
 public:
  using Error::Error;
};

class MalformedDocument : public Error {
 public:
  using Error::Error;
};

class AxiomViolation : public Error {
 public:
  using Error::Error;
};

class InsufficientDepth : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace juliaflow
