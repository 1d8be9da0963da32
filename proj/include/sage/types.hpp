#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sage {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Unit system: exchange and field strengths are frequencies in MHz, times are
// in ns. A Hamiltonian H (MHz) evolves as exp(-i 2π H t).
inline constexpr double kRadPerMHzNs = 2.0 * std::numbers::pi * 1e-3;
inline constexpr double kMHzPerKHz = 1e-3;

/// Base for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace sage
