#include <doctest.h>

#include <cmath>

#include "polspin/constellation.hpp"
#include "polspin/errors.hpp"
#include "polspin/phase_space.hpp"
#include "polspin/tensor_ops.hpp"
#include "test_helpers.hpp"

using namespace polspin;
using polspin::testing::max_abs_diff;
using polspin::testing::random_block_density;
using polspin::testing::random_rotation;

namespace {

Mat3 rodrigues(const RotationParams& r) {
  const double angle = r.theta.norm();
  if (angle < 1e-15) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, r.theta / angle).toRotationMatrix();
}

// 5-point Gauss-Legendre rule on [-1, 1]: exact for polynomials up to
// degree 9, ample for the degree <= 4 latitude dependence at two_j = 4.
constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};

double sphere_integral(const WignerExpansion& w) {
  // exact phi sum (16 >= 2*4 + 1 samples) times Gauss-Legendre in cos(theta)
  double total = 0.0;
  for (int g = 0; g < 5; ++g) {
    const double theta = std::acos(kGlNode[g]);
    double phi_sum = 0.0;
    for (int p = 0; p < 16; ++p)
      phi_sum += wigner_eval(w, theta, 2.0 * pi * p / 16.0);
    total += kGlWeight[g] * phi_sum * (2.0 * pi / 16.0);
  }
  return total;
}

}  // namespace

TEST_SUITE("phase_space") {

TEST_CASE("spherical harmonics: frozen reference values") {
  CHECK(std::abs(spherical_harmonic(0, 0, 1.234, 5.6) -
                 cxd(0.2820947917738781, 0.0)) < 1e-13);
  CHECK(std::abs(spherical_harmonic(1, 1, pi / 2, 0.0) -
                 cxd(-0.3454941494713355, 0.0)) < 1e-13);
  CHECK(std::abs(spherical_harmonic(2, 0, 0.0, 0.0) -
                 cxd(0.6307831305050401, 0.0)) < 1e-13);
  // Y_21 = -sqrt(15/8pi) cos(theta) sin(theta) e^{i phi}
  const double th = pi / 4, ph = 1.3;
  const cxd y21 = -std::sqrt(15.0 / (8.0 * pi)) * std::cos(th) * std::sin(th) *
                  std::exp(cxd(0, ph));
  CHECK(std::abs(spherical_harmonic(2, 1, th, ph) - y21) < 1e-13);
}

TEST_CASE("spherical harmonics: conjugation and addition theorem") {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    const double th = std::acos(2.0 * uniform_double(rng) - 1.0);
    const double ph = 2.0 * pi * uniform_double(rng);
    for (int l = 0; l <= 6; ++l) {
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) {
        const cxd y = spherical_harmonic(l, m, th, ph);
        const cxd flipped = spherical_harmonic(l, -m, th, ph);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(flipped - sign * std::conj(y)) < 1e-12);
        sum += std::norm(y);
      }
      CHECK(sum == doctest::Approx((2.0 * l + 1.0) / (4.0 * pi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Clebsch-Gordan spot values (doubled arguments)") {
  const double s2 = std::sqrt(0.5);
  CHECK(clebsch_gordan(1, 1, 1, -1, 0, 0) == doctest::Approx(s2).epsilon(1e-14));
  CHECK(clebsch_gordan(1, -1, 1, 1, 0, 0) == doctest::Approx(-s2).epsilon(1e-14));
  CHECK(clebsch_gordan(1, 1, 1, 1, 2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clebsch_gordan(2, 0, 2, 0, 4, 0) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
  CHECK(clebsch_gordan(2, 0, 2, 0, 0, 0) ==
        doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(clebsch_gordan(4, 0, 4, 0, 0, 0) ==
        doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  // parity / triangle violations vanish
  CHECK(clebsch_gordan(1, 1, 1, 1, 2, 0) == 0.0);
  CHECK(clebsch_gordan(1, 1, 1, -1, 6, 0) == 0.0);
}

TEST_CASE("Clebsch-Gordan column orthonormality") {
  // sum_{m1,m2} <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M'> = delta_JJ' delta_MM'
  const int tj1 = 4, tj2 = 2;
  for (int tJ = 2; tJ <= 6; tJ += 2)
    for (int tJp = 2; tJp <= 6; tJp += 2)
      for (int tM = -2; tM <= 2; tM += 4) {
        double sum = 0.0;
        for (int m1 = -tj1; m1 <= tj1; m1 += 2)
          for (int m2 = -tj2; m2 <= tj2; m2 += 2)
            sum += clebsch_gordan(tj1, m1, tj2, m2, tJ, tM) *
                   clebsch_gordan(tj1, m1, tj2, m2, tJp, tM);
        CHECK(sum == doctest::Approx(tJ == tJp ? 1.0 : 0.0).epsilon(1e-12));
      }
}

TEST_CASE("tensor operator basis is orthonormal") {
  const auto basis = tensor_operator_basis(4);
  REQUIRE(basis.size() == 5);
  for (int k = 0; k <= 4; ++k) REQUIRE(basis[k].size() == size_t(2 * k + 1));
  for (int k = 0; k <= 4; ++k)
    for (int q = -k; q <= k; ++q)
      for (int kp = 0; kp <= 4; ++kp)
        for (int qp = -kp; qp <= kp; ++qp) {
          const cxd ip =
              (basis[k][k + q].adjoint() * basis[kp][kp + qp]).trace();
          const double expect = (k == kp && q == qp) ? 1.0 : 0.0;
          CHECK(std::abs(ip - cxd(expect, 0)) < 1e-12);
        }
  // T00 is the normalized identity; adjoint symmetry T_kq^+ = (-1)^q T_k,-q
  CHECK(max_abs_diff(basis[0][0], MatXc::Identity(5, 5) / std::sqrt(5.0)) < 1e-13);
  for (int k = 0; k <= 4; ++k)
    for (int q = -k; q <= k; ++q) {
      const double sign = (q % 2 == 0) ? 1.0 : -1.0;
      CHECK(max_abs_diff(basis[k][k + q].adjoint(), sign * basis[k][k - q]) < 1e-12);
    }
}

TEST_CASE("wigner_expansion stores tr(B T_kq^+) with rho_00 fixed by trace") {
  std::mt19937_64 rng(67);
  const auto rho = random_block_density(4, rng);
  const auto w = wigner_expansion(rho, 4);
  CHECK(w.two_j == 4);
  REQUIRE(w.rho_kq.size() == 5);
  const double tr = std::real(rho.sectors[0].block.trace());
  CHECK(std::abs(w.rho_kq[0][0] - cxd(tr / std::sqrt(5.0), 0)) < 1e-12);
}

TEST_CASE("Wigner function integrates to sqrt(4 pi / (2j+1)) times the trace") {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = random_block_density(4, rng);
    const auto w = wigner_expansion(rho, 4);
    const double tr = std::real(rho.sectors[0].block.trace());
    CHECK(sphere_integral(w) ==
          doctest::Approx(std::sqrt(4.0 * pi / 5.0) * tr).epsilon(1e-10));
  }
}

TEST_CASE("Wigner function is covariant under rotations") {
  std::mt19937_64 rng(73);
  for (int rep = 0; rep < 6; ++rep) {
    const auto rho = random_block_density(4, rng);
    const auto r = random_rotation(rng);
    const auto w0 = wigner_expansion(rho, 4);
    const auto w1 = wigner_expansion(rotate_density(rho, r), 4);
    const Mat3 rot = rodrigues(r);
    for (int pt = 0; pt < 10; ++pt) {
      const double th = std::acos(2.0 * uniform_double(rng) - 1.0);
      const double ph = 2.0 * pi * uniform_double(rng);
      const Vec3 n = unit_vector(SpherePoint{th, ph});
      const auto back = sphere_point_from_unit(rot.transpose() * n);
      CHECK(wigner_eval(w1, th, ph) ==
            doctest::Approx(wigner_eval(w0, back.theta, back.phi)).epsilon(1e-10));
    }
  }
}

TEST_CASE("wigner_grid matches pointwise evaluation") {
  std::mt19937_64 rng(79);
  const auto rho = random_block_density(4, rng);
  const auto w = wigner_expansion(rho, 4);
  const auto g = wigner_grid(rho, 4, 25, 48);
  REQUIRE(g.thetas.size() == 25);
  REQUIRE(g.phis.size() == 48);
  CHECK(g.thetas.front() == 0.0);
  CHECK(g.thetas.back() == doctest::Approx(pi).epsilon(1e-15));
  CHECK(g.phis.front() == 0.0);
  CHECK(g.phis.back() < 2.0 * pi);
  for (int it = 0; it < 25; it += 6)
    for (int ip = 0; ip < 48; ip += 7)
      CHECK(g.values(it, ip) ==
            doctest::Approx(wigner_eval(w, g.thetas[it], g.phis[ip])).epsilon(1e-12));
}

TEST_CASE("grid_interpolate: nodes exact, azimuthal wrap continuous") {
  std::mt19937_64 rng(83);
  const auto rho = random_block_density(4, rng);
  const auto g = wigner_grid(rho, 4, 40, 80);
  CHECK(grid_interpolate(g, g.thetas[7], g.phis[11]) ==
        doctest::Approx(g.values(7, 11)).epsilon(1e-13));
  // midpoint between the last column and the wrapped first column
  const double phi_mid = g.phis.back() + 0.5 * (g.phis[1] - g.phis[0]);
  const double expect = 0.5 * (g.values(13, 79) + g.values(13, 0));
  CHECK(grid_interpolate(g, g.thetas[13], phi_mid) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("tetrahedron vertex geometry") {
  const auto v = tetrahedron_vertices();
  REQUIRE(v.size() == 4);
  CHECK((v[0] - Vec3(0, 0, 1)).norm() < 1e-14);
  for (int a = 0; a < 4; ++a) {
    CHECK(v[a].norm() == doctest::Approx(1.0).epsilon(1e-14));
    for (int b = a + 1; b < 4; ++b)
      CHECK(v[a].dot(v[b]) == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("the 12 proper tetrahedral rotations form a group") {
  const auto rots = tetrahedral_rotations();
  REQUIRE(rots.size() == 12);
  const auto v = tetrahedron_vertices();
  int trace3 = 0, trace0 = 0, tracem1 = 0;
  for (const auto& r : rots) {
    CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    const double tr = r.trace();
    if (std::abs(tr - 3.0) < 1e-9) ++trace3;
    if (std::abs(tr) < 1e-9) ++trace0;
    if (std::abs(tr + 1.0) < 1e-9) ++tracem1;
    // each rotation permutes the vertex set
    for (const auto& vert : v) {
      double best = 2.0;
      for (const auto& w : v) best = std::min(best, (r * vert - w).norm());
      CHECK(best < 1e-12);
    }
  }
  CHECK(trace3 == 1);    // identity
  CHECK(trace0 == 8);    // +-120 degrees about the four vertex axes
  CHECK(tracem1 == 3);   // 180 degrees about the three edge-midpoint axes
  // closure under composition
  for (const auto& a : rots)
    for (const auto& b : rots) {
      const Mat3 ab = a * b;
      double best = 10.0;
      for (const auto& c : rots)
        best = std::min(best, (ab - c).cwiseAbs().maxCoeff());
      CHECK(best < 1e-10);
    }
}

TEST_CASE("rotation_params_from_matrix inverts rodrigues") {
  std::mt19937_64 rng(89);
  for (int rep = 0; rep < 20; ++rep) {
    const auto r = random_rotation(rng);
    const Mat3 m = rodrigues(r);
    const auto back = rotation_params_from_matrix(m);
    CHECK((rodrigues(back) - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ideal-state Wigner function has the tetrahedral symmetry") {
  const auto rho = pure_density(tetrahedron_state());
  const auto w = wigner_expansion(rho, 4);
  std::mt19937_64 rng(97);
  for (const auto& r : tetrahedral_rotations()) {
    for (int pt = 0; pt < 15; ++pt) {
      const double th = std::acos(2.0 * uniform_double(rng) - 1.0);
      const double ph = 2.0 * pi * uniform_double(rng);
      const Vec3 n = unit_vector(SpherePoint{th, ph});
      const auto moved = sphere_point_from_unit(r * n);
      CHECK(wigner_eval(w, moved.theta, moved.phi) ==
            doctest::Approx(wigner_eval(w, th, ph)).epsilon(1e-10));
    }
  }
}

TEST_CASE("vertex projections: all four maps agree for the ideal state") {
  const auto rho = pure_density(tetrahedron_state());
  const auto proj = vertex_projections(rho, 45, 90);
  REQUIRE(proj.size() == 4);
  const auto verts = tetrahedron_vertices();
  for (int i = 0; i < 4; ++i) {
    CHECK(proj[i].vertex == i);
    CHECK((proj[i].vertex_direction - verts[i]).norm() < 1e-12);
    // the rotation really sends vertex i to the map center (-1, 0, 0)
    const Mat3 rot = rodrigues(proj[i].rotation);
    CHECK((rot * verts[i] - Vec3(-1, 0, 0)).norm() < 1e-12);
    // and its designated neighbor to the phi = 0 meridian, north side
    const double tp = std::asin(1.0 / 3.0);
    CHECK((rot * verts[(i + 1) % 4] - Vec3(std::sin(tp), 0, std::cos(tp))).norm() <
          1e-12);
  }
  for (int i = 1; i < 4; ++i)
    CHECK((proj[i].map.values - proj[0].map.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("vertex projection maps are grids of the rotated state") {
  const auto rho = pure_density(tetrahedron_state());
  const auto proj = vertex_projections(rho, 31, 62);
  const auto g = wigner_grid(rotate_density(rho, proj[2].rotation), 4, 31, 62);
  CHECK((proj[2].map.values - g.values).cwiseAbs().maxCoeff() < 1e-12);
}

}  // TEST_SUITE
