#pragma once

#include <complex>
#include <Eigen/Dense>

namespace polspin {

using cxd = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using MatX = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;

// Angular momenta are handled as 2j (always an integer), so half-integer
// sectors need no floating-point bookkeeping.
inline int dim_of_two_j(int two_j) { return two_j + 1; }
inline double j_of_two_j(int two_j) { return 0.5 * two_j; }

}  // namespace polspin
