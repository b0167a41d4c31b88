#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nhqc {

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = RealVectorT<double>;

/// Invalid arguments: bad parameters, empty inputs, unnormalized profiles.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not deliver its contract (non-convergence,
/// singular factorizations, eigenvalue collisions, exhausted budgets).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, long index = -1)
      : std::runtime_error(what), index_(index) {}

  /// Offending eigenvalue/sample index, or -1 if not applicable.
  long index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace nhqc
