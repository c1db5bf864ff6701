#include "polspin/spin_core.hpp"

#include <cmath>

#include "polspin/errors.hpp"

namespace polspin {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

}  // namespace

AngularMomentumTriple build_generators(int two_j) {
  if (two_j < 0) throw ValidationError("build_generators: two_j must be >= 0");
  const int d = dim_of_two_j(two_j);
  const double j = j_of_two_j(two_j);
  MatXc jp = MatXc::Zero(d, d), jz = MatXc::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = j - i;
    jz(i, i) = m;
    if (i + 1 < d) {
      // raising: |j, m-1> -> |j, m>, i.e. column i+1 to row i
      const double mm = m - 1.0;
      jp(i, i + 1) = std::sqrt(j * (j + 1.0) - mm * (mm + 1.0));
    }
  }
  const MatXc jm = jp.adjoint();
  AngularMomentumTriple g;
  g.x = 0.5 * (jp + jm);
  g.y = cxd(0.0, -0.5) * (jp - jm);
  g.z = jz;
  return g;
}

PureSpinState canonicalize_phase(PureSpinState s) {
  const double scale = s.amps.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return s;
  for (int i = 0; i < s.amps.size(); ++i) {
    if (std::abs(s.amps(i)) > 1e-12 * scale) {
      const cxd ph = s.amps(i) / std::abs(s.amps(i));
      s.amps /= ph;
      s.amps(i) = cxd(std::abs(s.amps(i)), 0.0);
      break;
    }
  }
  return s;
}

PureSpinState coherent_state(int n_photons, double theta, double phi) {
  if (n_photons < 1) throw ValidationError("coherent_state: need n_photons >= 1");
  const int d = n_photons + 1;
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  PureSpinState st;
  st.two_j = n_photons;
  st.amps.resize(d);
  for (int i = 0; i < d; ++i) {
    const int n_h = n_photons - i;  // j + m
    st.amps(i) = std::sqrt(binomial(n_photons, n_h)) * std::pow(c, n_h) *
                 std::pow(cxd(std::cos(phi), std::sin(phi)) * s, n_photons - n_h);
  }
  st.amps.normalize();
  return canonicalize_phase(st);
}

PureSpinState noon_state(int n_photons) {
  if (n_photons < 1) throw ValidationError("noon_state: need n_photons >= 1");
  PureSpinState st;
  st.two_j = n_photons;
  st.amps = VecXc::Zero(n_photons + 1);
  st.amps(0) = st.amps(n_photons) = 1.0 / std::sqrt(2.0);
  return st;
}

PureSpinState tetrahedron_state() {
  PureSpinState st;
  st.two_j = 4;
  st.amps = VecXc::Zero(5);
  st.amps(0) = std::sqrt(1.0 / 3.0);  // |4_H, 0_V>
  st.amps(3) = std::sqrt(2.0 / 3.0);  // |1_H, 3_V>
  return st;
}

int sector_multiplicity(int two_j, int n_photons) {
  if (two_j < 0 || two_j > n_photons || (n_photons - two_j) % 2 != 0) return 0;
  const int k = (n_photons - two_j) / 2;
  return int(std::lround(binomial(n_photons, k) - binomial(n_photons, k - 1)));
}

BlockDensityMatrix empty_block_density(int n_photons) {
  if (n_photons < 1) throw ValidationError("empty_block_density: need n_photons >= 1");
  BlockDensityMatrix rho;
  for (int two_j = n_photons; two_j >= 0; two_j -= 2) {
    BlockDensityMatrix::Sector s;
    s.two_j = two_j;
    s.mult = sector_multiplicity(two_j, n_photons);
    s.block = MatXc::Zero(two_j + 1, two_j + 1);
    rho.sectors.push_back(std::move(s));
  }
  return rho;
}

BlockDensityMatrix pure_density(const PureSpinState& psi) {
  BlockDensityMatrix rho;
  BlockDensityMatrix::Sector s;
  s.two_j = psi.two_j;
  s.mult = 1;
  s.block = psi.amps * psi.amps.adjoint();
  rho.sectors.push_back(std::move(s));
  return rho;
}

MatXc rotation_unitary(int two_j, const RotationParams& r) {
  const int d = dim_of_two_j(two_j);
  const double angle = r.theta.norm();
  if (angle == 0.0) return MatXc::Identity(d, d);
  const AngularMomentumTriple g = build_generators(two_j);
  const MatXc h = r.theta.x() * g.x + r.theta.y() * g.y + r.theta.z() * g.z;
  Eigen::SelfAdjointEigenSolver<MatXc> es(h);
  VecXc phases(d);
  for (int i = 0; i < d; ++i) {
    const double lam = es.eigenvalues()(i);
    phases(i) = cxd(std::cos(lam), -std::sin(lam));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

PureSpinState rotate(const PureSpinState& s, const RotationParams& r) {
  PureSpinState out = s;
  out.amps = rotation_unitary(s.two_j, r) * s.amps;
  return out;
}

BlockDensityMatrix rotate_density(const BlockDensityMatrix& rho, const RotationParams& r) {
  BlockDensityMatrix out = rho;
  for (auto& sec : out.sectors) {
    if (sec.two_j == 0) continue;
    const MatXc u = rotation_unitary(sec.two_j, r);
    sec.block = u * sec.block * u.adjoint();
  }
  return out;
}

cxd overlap(const PureSpinState& a, const PureSpinState& b) {
  if (a.two_j != b.two_j) return cxd(0.0, 0.0);
  return a.amps.dot(b.amps);
}

double fidelity(const BlockDensityMatrix& rho, const PureSpinState& psi) {
  // Uhlmann fidelity against a pure target: sqrt(<psi|rho|psi>).
  for (const auto& sec : rho.sectors) {
    if (sec.two_j == psi.two_j)
      return std::sqrt(std::max(
          0.0, sec.mult * std::real(psi.amps.dot(sec.block * psi.amps))));
  }
  return 0.0;
}

double trace(const BlockDensityMatrix& rho) {
  double t = 0.0;
  for (const auto& sec : rho.sectors) t += sec.mult * std::real(sec.block.trace());
  return t;
}

void validate_density(const BlockDensityMatrix& rho, double tol) {
  if (rho.sectors.empty()) throw ValidationError("density: no sectors");
  for (const auto& sec : rho.sectors) {
    const int d = dim_of_two_j(sec.two_j);
    if (sec.two_j < 0 || sec.mult < 1)
      throw ValidationError("density: bad sector metadata");
    if (sec.block.rows() != d || sec.block.cols() != d)
      throw ValidationError("density: block dimension mismatch");
    if ((sec.block - sec.block.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw ValidationError("density: block not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatXc> es(sec.block, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      throw ValidationError("density: block not positive semidefinite");
  }
  if (std::abs(trace(rho) - 1.0) > tol)
    throw ValidationError("density: trace differs from 1");
}

}  // namespace polspin
