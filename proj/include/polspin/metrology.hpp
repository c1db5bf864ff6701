#pragma once

// Quantum-Fisher-information machinery for estimating the three parameters of
// an SU(2) rotation, plus closed-form scaling bounds for reference strategies.

#include <map>
#include <string>
#include <vector>

#include "polspin/spin_core.hpp"
#include "polspin/types.hpp"

namespace polspin {

Vec3 spin_expectation(const BlockDensityMatrix& rho);

// Symmetrized second moments: 0.5<{J_l, J_m}> - <J_l><J_m>.
Mat3 spin_covariance(const BlockDensityMatrix& rho);

struct QfiMatrix {
  Mat3 f = Mat3::Zero();
  bool singular = false;
};

// Rotation-parameter QFI from the spectral decomposition,
//   F_lm = 2 sum_{a,b} Re(<a|J_l|b><b|J_m|a>) (la-lb)^2/(la+lb),
// pairs with la+lb below 1e-10 * max eigenvalue skipped.
QfiMatrix qfi_matrix(const BlockDensityMatrix& rho);

// Sum quantum Cramer-Rao bound tr(F^{-1}); +infinity when F is singular.
double sqcrb_from_qfi(const QfiMatrix& q);
double sqcrb(const BlockDensityMatrix& rho);

// Closed-form s-QCRB of the reference strategies at photon budget N.
// Sequential entries exist only when N is divisible by 3; the platonic
// closed form 9/(N(N+2)) is always reported, with `platonic_exists`
// marking the budget where the achieving state is constructed here (N=4).
struct StrategyReport {
  int n_photons = 0;
  std::map<std::string, double> entries;
  bool platonic_exists = false;
};
StrategyReport strategy_report(int n_photons);

struct UnpolarizedCheck {
  bool pass = false;
  double vector_norm = 0.0;      // |<J>|
  double moment_residual = 0.0;  // max |<J_l J_m> - target delta_lm|
  double target = 0.0;           // (N/6)(N/2 + 1)
};
UnpolarizedCheck is_second_order_unpolarized(const BlockDensityMatrix& rho,
                                             double tol = 1e-9);

// M_k = sum_q |tr(B T_kq^+)|^2, k = 0..two_j, on the trace-normalized
// sector block.
std::vector<double> multipole_moments(const BlockDensityMatrix& rho, int two_j);

// Tetrahedron projection probability <t|U rho U^+|t> after rotating rho by
// theta * axis, for each theta in thetas.
std::vector<double> rotation_scan(const BlockDensityMatrix& rho, const Vec3& axis,
                                  const std::vector<double>& thetas);

// Local maxima of a periodic sequence (strict neighbors).
int count_local_maxima_periodic(const std::vector<double>& values);

}  // namespace polspin
