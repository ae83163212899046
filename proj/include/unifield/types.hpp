#pragma once

#include <Eigen/Dense>
#include <complex>

namespace unifield {

using cx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;
using ivec = Eigen::VectorXi;

inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace unifield
