#include "polspin/metrology.hpp"

#include <cmath>
#include <limits>

#include "polspin/errors.hpp"
#include "polspin/tensor_ops.hpp"

namespace polspin {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

int photon_number(const BlockDensityMatrix& rho) {
  int n = 0;
  for (const auto& sec : rho.sectors) n = std::max(n, sec.two_j);
  return n;
}

}  // namespace

Vec3 spin_expectation(const BlockDensityMatrix& rho) {
  Vec3 v = Vec3::Zero();
  for (const auto& sec : rho.sectors) {
    if (sec.two_j == 0) continue;
    const auto g = build_generators(sec.two_j);
    v.x() += sec.mult * std::real((sec.block * g.x).trace());
    v.y() += sec.mult * std::real((sec.block * g.y).trace());
    v.z() += sec.mult * std::real((sec.block * g.z).trace());
  }
  return v;
}

Mat3 spin_covariance(const BlockDensityMatrix& rho) {
  const Vec3 mean = spin_expectation(rho);
  Mat3 cov = Mat3::Zero();
  for (const auto& sec : rho.sectors) {
    if (sec.two_j == 0) continue;
    const auto g = build_generators(sec.two_j);
    const MatXc js[3] = {g.x, g.y, g.z};
    for (int l = 0; l < 3; ++l)
      for (int m = l; m < 3; ++m)
        cov(l, m) += sec.mult *
                     0.5 * std::real((sec.block * (js[l] * js[m] + js[m] * js[l])).trace());
  }
  for (int l = 0; l < 3; ++l)
    for (int m = l; m < 3; ++m) {
      cov(l, m) -= mean(l) * mean(m);
      cov(m, l) = cov(l, m);
    }
  return cov;
}

QfiMatrix qfi_matrix(const BlockDensityMatrix& rho) {
  struct SectorEig {
    int mult;
    Eigen::VectorXd lam;
    MatXc jrot[3];  // generators in the eigenbasis
  };
  std::vector<SectorEig> eigs;
  double lam_max = 0.0;
  for (const auto& sec : rho.sectors) {
    Eigen::SelfAdjointEigenSolver<MatXc> es(sec.block);
    SectorEig se;
    se.mult = sec.mult;
    se.lam = es.eigenvalues();
    lam_max = std::max(lam_max, se.lam.size() ? se.lam.maxCoeff() : 0.0);
    const auto g = build_generators(sec.two_j);
    const MatXc js[3] = {g.x, g.y, g.z};
    for (int l = 0; l < 3; ++l)
      se.jrot[l] = es.eigenvectors().adjoint() * js[l] * es.eigenvectors();
    eigs.push_back(std::move(se));
  }
  const double cutoff = 1e-10 * lam_max;

  QfiMatrix q;
  for (const auto& se : eigs) {
    const int d = int(se.lam.size());
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double sum = se.lam(a) + se.lam(b);
        if (sum <= cutoff) continue;
        const double w = (se.lam(a) - se.lam(b)) * (se.lam(a) - se.lam(b)) / sum;
        if (w == 0.0) continue;
        for (int l = 0; l < 3; ++l)
          for (int m = l; m < 3; ++m)
            q.f(l, m) += se.mult * 2.0 * w *
                         std::real(se.jrot[l](a, b) * se.jrot[m](b, a));
      }
  }
  for (int l = 0; l < 3; ++l)
    for (int m = l + 1; m < 3; ++m) q.f(m, l) = q.f(l, m);

  Eigen::SelfAdjointEigenSolver<Mat3> es(q.f, Eigen::EigenvaluesOnly);
  const double fmax = es.eigenvalues().cwiseAbs().maxCoeff();
  q.singular = (fmax <= 0.0) || (es.eigenvalues().minCoeff() <= 1e-12 * fmax);
  return q;
}

double sqcrb_from_qfi(const QfiMatrix& q) {
  if (q.singular) return inf;
  Eigen::SelfAdjointEigenSolver<Mat3> es(q.f, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += 1.0 / es.eigenvalues()(i);
  return s;
}

double sqcrb(const BlockDensityMatrix& rho) { return sqcrb_from_qfi(qfi_matrix(rho)); }

StrategyReport strategy_report(int n_photons) {
  if (n_photons < 1) throw ValidationError("strategy_report: need n_photons >= 1");
  const double n = n_photons;
  StrategyReport rep;
  rep.n_photons = n_photons;
  rep.entries["coherent_single"] = inf;  // third rotation axis carries no signal
  rep.entries["noon_simultaneous"] = 2.0 / n + 1.0 / (n * n);
  rep.entries["platonic"] = 9.0 / (n * (n + 2.0));
  rep.platonic_exists = (n_photons == 4);
  if (n_photons % 3 == 0) {
    rep.entries["coherent_sequential"] = 9.0 / (2.0 * n);
    rep.entries["noon_sequential"] = 27.0 / (n * (n + 6.0));
  }
  if (n_photons == 4) {
    // The constructed optimal states must reproduce the closed forms.
    const double tetra = sqcrb(pure_density(tetrahedron_state()));
    const double noon = sqcrb(pure_density(noon_state(4)));
    if (std::abs(tetra - rep.entries["platonic"]) > 1e-9 ||
        std::abs(noon - rep.entries["noon_simultaneous"]) > 1e-9)
      throw ConvergenceError("strategy_report: closed forms disagree with states");
  }
  return rep;
}

UnpolarizedCheck is_second_order_unpolarized(const BlockDensityMatrix& rho, double tol) {
  const double n = photon_number(rho);
  UnpolarizedCheck out;
  out.target = n / 6.0 * (0.5 * n + 1.0);
  out.vector_norm = spin_expectation(rho).norm();
  // Raw second moments (covariance plus mean terms).
  const Mat3 cov = spin_covariance(rho);
  const Vec3 mean = spin_expectation(rho);
  double resid = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m) {
      const double raw = cov(l, m) + mean(l) * mean(m);
      resid = std::max(resid, std::abs(raw - (l == m ? out.target : 0.0)));
    }
  out.moment_residual = resid;
  out.pass = out.vector_norm <= tol && resid <= tol;
  return out;
}

std::vector<double> multipole_moments(const BlockDensityMatrix& rho, int two_j) {
  for (const auto& sec : rho.sectors) {
    if (sec.two_j != two_j) continue;
    const double tr = std::real(sec.block.trace());
    if (std::abs(tr) < 1e-14)
      throw ValidationError("multipole_moments: sector has (near) zero trace");
    const MatXc b = sec.block / tr;
    const auto basis = tensor_operator_basis(two_j);
    std::vector<double> m(two_j + 1, 0.0);
    for (int k = 0; k <= two_j; ++k)
      for (const auto& t : basis[k])
        m[k] += std::norm((b * t.adjoint()).trace());
    return m;
  }
  throw ValidationError("multipole_moments: sector not present");
}

std::vector<double> rotation_scan(const BlockDensityMatrix& rho, const Vec3& axis,
                                  const std::vector<double>& thetas) {
  if (axis.norm() < 1e-14) throw ValidationError("rotation_scan: zero axis");
  const Vec3 unit = axis / axis.norm();
  const PureSpinState target = tetrahedron_state();
  std::vector<double> out;
  out.reserve(thetas.size());
  for (const double th : thetas) {
    const double f = fidelity(rotate_density(rho, {th * unit}), target);
    out.push_back(f * f);  // projection probability <t|U rho U^+|t>
  }
  return out;
}

int count_local_maxima_periodic(const std::vector<double>& values) {
  const int n = int(values.size());
  if (n < 3) return 0;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double prev = values[(i + n - 1) % n];
    const double next = values[(i + 1) % n];
    if (values[i] > prev && values[i] > next) ++count;
  }
  return count;
}

}  // namespace polspin
