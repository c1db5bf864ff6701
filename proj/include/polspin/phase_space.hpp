#pragma once

// Spherical Wigner function of a spin sector,
//   W(theta, phi) = sum_{kq} tr(B T_kq^+) Y_kq(theta, phi),
// on regular latitude-longitude grids, plus the tetrahedron-frame
// vertex-centered projections.

#include <vector>

#include "polspin/spin_core.hpp"
#include "polspin/types.hpp"

namespace polspin {

// Spherical harmonic Y_lm (Condon-Shortley phase).
cxd spherical_harmonic(int l, int m, double theta, double phi);

struct WignerExpansion {
  int two_j = 0;
  std::vector<std::vector<cxd>> rho_kq;  // [k][k+q] = tr(B T_kq^+)
};

WignerExpansion wigner_expansion(const BlockDensityMatrix& rho, int two_j);
double wigner_eval(const WignerExpansion& w, double theta, double phi);

struct SphericalGrid {
  std::vector<double> thetas;  // n_theta points, inclusive [0, pi]
  std::vector<double> phis;    // n_phi points, [0, 2 pi)
  MatX values;                 // (n_theta, n_phi)
};

SphericalGrid wigner_grid(const BlockDensityMatrix& rho, int two_j, int n_theta,
                          int n_phi);

// Bilinear interpolation with azimuthal wrap-around.
double grid_interpolate(const SphericalGrid& g, double theta, double phi);

// Unit vectors of the reference tetrahedron: north pole plus three vertices
// at colatitude 2 atan(sqrt 2), azimuths 0, 2pi/3, 4pi/3.
std::vector<Vec3> tetrahedron_vertices();

// The 12 proper rotations preserving that tetrahedron (identity included).
std::vector<Mat3> tetrahedral_rotations();

RotationParams rotation_params_from_matrix(const Mat3& r);

// Vertex-centered projection: rotate the state so vertex i sits at the map
// center (theta = pi/2, phi = pi) with its designated neighbor
// (vertex (i+1) mod 4) on the phi = 0 meridian in the north, then grid the
// Wigner function.
struct VertexProjection {
  int vertex = 0;
  Vec3 vertex_direction = Vec3::Zero();
  RotationParams rotation;
  SphericalGrid map;
};

std::vector<VertexProjection> vertex_projections(const BlockDensityMatrix& rho,
                                                 int n_theta, int n_phi);

}  // namespace polspin
