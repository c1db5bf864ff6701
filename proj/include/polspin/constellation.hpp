#pragma once

// Majorana (stellar) representation: a pure spin-N/2 state as an unordered
// multiset of N points on the unit sphere, via the roots of
//   P(z) = sum_n psi_{n-j} sqrt(C(N,n)) z^n,   z = tan(theta/2) e^{i phi}
// with the convention that a root z maps to the point
//   theta = 2 atan|z|,  phi = arg(-z),
// so that products of single-photon factors (cos(theta/2) a_H^+ +
// e^{i phi} sin(theta/2) a_V^+) reproduce the state.

#include <cstdint>
#include <vector>

#include "polspin/spin_core.hpp"
#include "polspin/types.hpp"

namespace polspin {

struct SpherePoint {
  double theta = 0.0;  // colatitude in [0, pi]
  double phi = 0.0;    // azimuth in [0, 2 pi); fixed to 0 at the poles
};

struct Constellation {
  std::vector<SpherePoint> points;
};

Vec3 unit_vector(const SpherePoint& p);
SpherePoint sphere_point_from_unit(const Vec3& v);

// Symmetrized product of the single-photon factors; N = points.size().
// Deterministic up to global phase (canonicalized).
PureSpinState constellation_to_state(const Constellation& c);

// Polynomial rooting; degree deficit contributes south-pole points.
Constellation state_to_constellation(const PureSpinState& s);

Constellation rotate_constellation(const Constellation& c, const RotationParams& r);

// Uniform iid points on the sphere from a fixed seed.
Constellation random_constellation(int n_points, std::uint64_t seed);

// Largest chordal mismatch under the optimal point pairing (exact assignment
// for n <= 8, greedy beyond).  Infinity if sizes differ.
double constellation_distance(const Constellation& a, const Constellation& b);

}  // namespace polspin
