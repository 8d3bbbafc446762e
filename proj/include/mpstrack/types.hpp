#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpstrack {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

/// Thrown when tensor shapes, bond indices or operator dimensions are
/// inconsistent with the operation being requested.
class structural_error : public std::invalid_argument {
 public:
  explicit structural_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when a scalar argument is outside its admissible range
/// (e.g. s outside [0, s_max]).
class range_error : public std::out_of_range {
 public:
  explicit range_error(const std::string& msg) : std::out_of_range(msg) {}
};

}  // namespace mpstrack
