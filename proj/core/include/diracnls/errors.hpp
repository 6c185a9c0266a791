#pragma once

#include <stdexcept>
#include <string>

namespace diracnls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands do not share a representation (index sets, grids, sizes).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Inputs outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iteration failed to converge or diverged.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_measure)
      : Error(what), iterations_(iterations), last_measure_(last_measure) {}

  int iterations() const noexcept { return iterations_; }
  double last_measure() const noexcept { return last_measure_; }

 private:
  int iterations_;
  double last_measure_;
};

/// A symmetry identity that must hold exactly was violated.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// The lowest eigenvalue cluster does not have the expected multiplicity.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, int cluster_size)
      : Error(what), cluster_size_(cluster_size) {}

  int cluster_size() const noexcept { return cluster_size_; }

 private:
  int cluster_size_;
};

/// A resolvent shift outside the spectral window around the Dirac energy.
class StabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace diracnls
