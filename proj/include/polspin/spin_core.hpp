#pragma once

// Collective-spin states of N photons in two polarization modes, Dicke basis
// |j,m> <-> |n_H = j+m, n_V = j-m>, stored with m descending (m = j first).

#include <vector>

#include "polspin/types.hpp"

namespace polspin {

struct PureSpinState {
  int two_j = 0;
  VecXc amps;  // dimension two_j+1, index i holds m = j - i
};

struct AngularMomentumTriple {
  MatXc x, y, z;
};

// Rotation vector theta: the rotation exp(-i theta.J), i.e. a right-handed
// rotation of Bloch vectors by |theta| about axis theta/|theta|.
struct RotationParams {
  Vec3 theta = Vec3::Zero();
};

// Block-diagonal density matrix over total-spin sectors; `mult` counts the
// identical copies of a sector (Schur multiplicity), so
// trace = sum_j mult_j * tr(block_j).
struct BlockDensityMatrix {
  struct Sector {
    int two_j = 0;
    int mult = 1;
    MatXc block;
  };
  std::vector<Sector> sectors;
};

// --- construction ---------------------------------------------------------

AngularMomentumTriple build_generators(int two_j);

// Spin-coherent state along (theta, phi):
//   psi_m = C(N, j+m)^{1/2} cos(theta/2)^{j+m} (e^{i phi} sin(theta/2))^{j-m}
PureSpinState coherent_state(int n_photons, double theta, double phi);

// (|N,0> + |0,N>)/sqrt(2) in occupation language.
PureSpinState noon_state(int n_photons);

// sqrt(1/3)|4_H,0_V> + sqrt(2/3)|1_H,3_V>; Majorana points form a regular
// tetrahedron with one vertex at the north pole.
PureSpinState tetrahedron_state();

// Multiplicity of spin j in the N-fold product of spin-1/2's.
int sector_multiplicity(int two_j, int n_photons);

// All-sector skeleton (zero blocks) for N photons, j descending.
BlockDensityMatrix empty_block_density(int n_photons);

// rho = |psi><psi| embedded as the single occupied sector.
BlockDensityMatrix pure_density(const PureSpinState& psi);

// --- operations -----------------------------------------------------------

// Global-phase canonicalization: first nonzero amplitude made real positive.
PureSpinState canonicalize_phase(PureSpinState s);

// exp(-i theta.J) on the two_j sector.
MatXc rotation_unitary(int two_j, const RotationParams& r);

PureSpinState rotate(const PureSpinState& s, const RotationParams& r);
BlockDensityMatrix rotate_density(const BlockDensityMatrix& rho, const RotationParams& r);

cxd overlap(const PureSpinState& a, const PureSpinState& b);

// Uhlmann fidelity sqrt(mult_j <psi|block_j|psi>) for psi's sector (0 if the
// sector is absent).
double fidelity(const BlockDensityMatrix& rho, const PureSpinState& psi);

double trace(const BlockDensityMatrix& rho);

// Throws ValidationError unless Hermitian, PSD (eigenvalues >= -tol) and
// unit trace within tol.
void validate_density(const BlockDensityMatrix& rho, double tol = 1e-9);

}  // namespace polspin
