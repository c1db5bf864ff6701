#include "polspin/phase_space.hpp"

#include <cmath>

#include "polspin/errors.hpp"
#include "polspin/tensor_ops.hpp"

namespace polspin {

cxd spherical_harmonic(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (am > l) return cxd(0.0, 0.0);
  double leg = std::sph_legendre(unsigned(l), unsigned(am), theta);
  if (m < 0 && am % 2 != 0) leg = -leg;  // Y_{l,-m} = (-1)^m conj(Y_{lm})
  return leg * cxd(std::cos(m * phi), std::sin(m * phi));
}

WignerExpansion wigner_expansion(const BlockDensityMatrix& rho, int two_j) {
  for (const auto& sec : rho.sectors) {
    if (sec.two_j != two_j) continue;
    WignerExpansion w;
    w.two_j = two_j;
    const auto basis = tensor_operator_basis(two_j);
    for (int k = 0; k <= two_j; ++k) {
      std::vector<cxd> row;
      for (const auto& t : basis[k]) row.push_back((sec.block * t.adjoint()).trace());
      w.rho_kq.push_back(std::move(row));
    }
    return w;
  }
  throw ValidationError("wigner_expansion: sector not present");
}

double wigner_eval(const WignerExpansion& w, double theta, double phi) {
  cxd sum(0.0, 0.0);
  for (int k = 0; k < int(w.rho_kq.size()); ++k)
    for (int q = -k; q <= k; ++q)
      sum += w.rho_kq[k][k + q] * spherical_harmonic(k, q, theta, phi);
  return sum.real();
}

SphericalGrid wigner_grid(const BlockDensityMatrix& rho, int two_j, int n_theta,
                          int n_phi) {
  if (n_theta < 2 || n_phi < 2)
    throw ValidationError("wigner_grid: need at least a 2x2 grid");
  const WignerExpansion w = wigner_expansion(rho, two_j);
  SphericalGrid g;
  g.thetas.resize(n_theta);
  g.phis.resize(n_phi);
  for (int i = 0; i < n_theta; ++i) g.thetas[i] = pi * i / double(n_theta - 1);
  for (int k = 0; k < n_phi; ++k) g.phis[k] = 2.0 * pi * k / double(n_phi);
  g.values.resize(n_theta, n_phi);
  // Separate theta and phi: per row collapse k at fixed q, then sweep the
  // azimuthal phases.  Keeps sph_legendre calls at n_theta * O(j^2).
  const int kmax = two_j;
  std::vector<cxd> aq(2 * kmax + 1);
  for (int i = 0; i < n_theta; ++i) {
    const double th = g.thetas[i];
    for (int q = -kmax; q <= kmax; ++q) {
      cxd acc(0.0, 0.0);
      const int aqi = std::abs(q);
      for (int k = aqi; k <= kmax; ++k) {
        double leg = std::sph_legendre(unsigned(k), unsigned(aqi), th);
        if (q < 0 && aqi % 2 != 0) leg = -leg;
        acc += w.rho_kq[k][k + q] * leg;
      }
      aq[kmax + q] = acc;
    }
    for (int c = 0; c < n_phi; ++c) {
      cxd sum(0.0, 0.0);
      for (int q = -kmax; q <= kmax; ++q)
        sum += aq[kmax + q] * cxd(std::cos(q * g.phis[c]), std::sin(q * g.phis[c]));
      g.values(i, c) = sum.real();
    }
  }
  return g;
}

double grid_interpolate(const SphericalGrid& g, double theta, double phi) {
  const int nt = int(g.thetas.size()), np = int(g.phis.size());
  theta = std::clamp(theta, 0.0, pi);
  phi = std::fmod(phi, 2.0 * pi);
  if (phi < 0.0) phi += 2.0 * pi;
  const double ft = theta / pi * (nt - 1);
  int i0 = std::min(int(ft), nt - 2);
  const double wt = ft - i0;
  const double fp = phi / (2.0 * pi) * np;
  int k0 = std::min(int(fp), np - 1);
  const double wp = fp - k0;
  const int k1 = (k0 + 1) % np;
  return (1.0 - wt) * ((1.0 - wp) * g.values(i0, k0) + wp * g.values(i0, k1)) +
         wt * ((1.0 - wp) * g.values(i0 + 1, k0) + wp * g.values(i0 + 1, k1));
}

std::vector<Vec3> tetrahedron_vertices() {
  const double theta_t = 2.0 * std::atan(std::sqrt(2.0));
  std::vector<Vec3> v{Vec3(0, 0, 1)};
  for (int k = 0; k < 3; ++k) {
    const double phi = 2.0 * pi * k / 3.0;
    v.emplace_back(std::sin(theta_t) * std::cos(phi),
                   std::sin(theta_t) * std::sin(phi), std::cos(theta_t));
  }
  return v;
}

std::vector<Mat3> tetrahedral_rotations() {
  const auto v = tetrahedron_vertices();
  std::vector<Mat3> rots;
  rots.push_back(Mat3::Identity());
  // 8 face rotations: +-2pi/3 about each vertex axis.
  for (const auto& axis : v)
    for (const double s : {1.0, -1.0})
      rots.push_back(Eigen::AngleAxisd(s * 2.0 * pi / 3.0, axis.normalized())
                         .toRotationMatrix());
  // 3 edge rotations: pi about the axes through opposite edge midpoints
  // (midpoint of (v0, vk) is antipodal to that of the remaining pair).
  for (int k = 1; k <= 3; ++k)
    rots.push_back(
        Eigen::AngleAxisd(pi, (v[0] + v[k]).normalized()).toRotationMatrix());
  return rots;
}

RotationParams rotation_params_from_matrix(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  RotationParams out;
  out.theta = aa.angle() * aa.axis();
  return out;
}

namespace {

Mat3 frame_from(const Vec3& primary, const Vec3& secondary) {
  Mat3 f;
  f.col(0) = primary.normalized();
  const Vec3 orth = secondary - secondary.dot(f.col(0)) * f.col(0);
  f.col(1) = orth.normalized();
  f.col(2) = f.col(0).cross(f.col(1));
  return f;
}

}  // namespace

std::vector<VertexProjection> vertex_projections(const BlockDensityMatrix& rho,
                                                 int n_theta, int n_phi) {
  const auto v = tetrahedron_vertices();
  // Map center direction and the phi = 0 landing direction of the neighbor:
  // center (pi/2, pi); neighbor at arccos(-1/3) from it, northern branch.
  const Vec3 center(-1.0, 0.0, 0.0);
  const double theta_n = std::asin(1.0 / 3.0);
  const Vec3 neighbor_target(std::sin(theta_n), 0.0, std::cos(theta_n));
  const Mat3 target_frame = frame_from(center, neighbor_target);

  std::vector<VertexProjection> out;
  for (int i = 0; i < 4; ++i) {
    const Mat3 source_frame = frame_from(v[i], v[(i + 1) % 4]);
    const Mat3 r = target_frame * source_frame.transpose();
    VertexProjection p;
    p.vertex = i;
    p.vertex_direction = v[i];
    p.rotation = rotation_params_from_matrix(r);
    p.map = wigner_grid(rotate_density(rho, p.rotation), 4, n_theta, n_phi);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace polspin
