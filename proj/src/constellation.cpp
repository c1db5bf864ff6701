#include "polspin/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polspin/errors.hpp"
#include "polspin/rng.hpp"

namespace polspin {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

// Roots of sum_n c[n] z^n (c.back() != 0) as companion-matrix eigenvalues,
// refined by one Newton step.
std::vector<cxd> poly_roots(const std::vector<cxd>& c) {
  const int deg = int(c.size()) - 1;
  std::vector<cxd> roots;
  if (deg < 1) return roots;
  MatXc companion = MatXc::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<MatXc> es(companion);
  for (int i = 0; i < deg; ++i) {
    cxd z = es.eigenvalues()(i);
    // Newton polish; skip if the derivative underflows (multiple root).
    cxd p = 0.0, dp = 0.0;
    for (int n = deg; n >= 0; --n) {
      dp = dp * z + p;
      p = p * z + c[n];
    }
    if (std::abs(dp) > 1e-300) {
      const cxd step = p / dp;
      if (std::abs(step) < 0.5 * (1.0 + std::abs(z))) z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace

Vec3 unit_vector(const SpherePoint& p) {
  return Vec3(std::sin(p.theta) * std::cos(p.phi),
              std::sin(p.theta) * std::sin(p.phi), std::cos(p.theta));
}

SpherePoint sphere_point_from_unit(const Vec3& v) {
  SpherePoint p;
  const double z = std::clamp(v.z() / v.norm(), -1.0, 1.0);
  p.theta = std::acos(z);
  const double rho = std::hypot(v.x(), v.y());
  if (rho < 1e-14) {
    p.phi = 0.0;
    p.theta = z > 0.0 ? 0.0 : pi;
  } else {
    p.phi = std::atan2(v.y(), v.x());
    if (p.phi < 0.0) p.phi += 2.0 * pi;
  }
  return p;
}

PureSpinState constellation_to_state(const Constellation& c) {
  const int n = int(c.points.size());
  if (n < 1) throw ValidationError("constellation_to_state: empty constellation");
  // Expand prod_k (c_k z + s_k e^{i phi_k}) by repeated convolution.
  std::vector<cxd> coeff{1.0};
  for (const auto& p : c.points) {
    const double ch = std::cos(0.5 * p.theta), sh = std::sin(0.5 * p.theta);
    const cxd lead = ch;
    const cxd tail = sh * cxd(std::cos(p.phi), std::sin(p.phi));
    std::vector<cxd> next(coeff.size() + 1, cxd(0.0, 0.0));
    for (size_t i = 0; i < coeff.size(); ++i) {
      next[i] += coeff[i] * tail;
      next[i + 1] += coeff[i] * lead;
    }
    coeff = std::move(next);
  }
  PureSpinState st;
  st.two_j = n;
  st.amps.resize(n + 1);
  for (int nn = 0; nn <= n; ++nn)
    st.amps(n - nn) = coeff[nn] / std::sqrt(binomial(n, nn));
  const double nrm = st.amps.norm();
  if (nrm < 1e-14)
    throw ValidationError("constellation_to_state: degenerate (norm underflow)");
  st.amps /= nrm;
  return canonicalize_phase(st);
}

Constellation state_to_constellation(const PureSpinState& s) {
  const int n = s.two_j;
  if (n < 1) throw ValidationError("state_to_constellation: need two_j >= 1");
  if (s.amps.size() != n + 1)
    throw ValidationError("state_to_constellation: amplitude size mismatch");
  std::vector<cxd> c(n + 1);
  double cmax = 0.0;
  for (int nn = 0; nn <= n; ++nn) {
    c[nn] = s.amps(n - nn) * std::sqrt(binomial(n, nn));
    cmax = std::max(cmax, std::abs(c[nn]));
  }
  if (cmax == 0.0) throw ValidationError("state_to_constellation: zero state");
  int deg = n;
  while (deg > 0 && std::abs(c[deg]) <= 1e-12 * cmax) --deg;
  c.resize(deg + 1);

  Constellation out;
  for (int k = 0; k < n - deg; ++k) out.points.push_back({pi, 0.0});  // degree deficit
  for (const cxd& z : poly_roots(c)) {
    SpherePoint p;
    const double r = std::abs(z);
    if (!(r < 1e8)) {
      p.theta = pi;
      p.phi = 0.0;
    } else if (r < 1e-14) {
      p.theta = 0.0;
      p.phi = 0.0;
    } else {
      p.theta = 2.0 * std::atan(r);
      p.phi = std::atan2(-z.imag(), -z.real());
      if (p.phi < 0.0) p.phi += 2.0 * pi;
    }
    out.points.push_back(p);
  }
  return out;
}

Constellation rotate_constellation(const Constellation& c, const RotationParams& r) {
  const double angle = r.theta.norm();
  Constellation out;
  if (angle == 0.0) return c;
  const Vec3 axis = r.theta / angle;
  const Mat3 rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  for (const auto& p : c.points)
    out.points.push_back(sphere_point_from_unit(rot * unit_vector(p)));
  return out;
}

Constellation random_constellation(int n_points, std::uint64_t seed) {
  if (n_points < 1) throw ValidationError("random_constellation: need n_points >= 1");
  std::mt19937_64 rng(seed);
  Constellation c;
  for (int i = 0; i < n_points; ++i) {
    SpherePoint p;
    const double z = 2.0 * uniform_double(rng) - 1.0;
    p.theta = std::acos(std::clamp(z, -1.0, 1.0));
    p.phi = 2.0 * pi * uniform_double(rng);
    c.points.push_back(p);
  }
  return c;
}

double constellation_distance(const Constellation& a, const Constellation& b) {
  const size_t n = a.points.size();
  if (n != b.points.size()) return std::numeric_limits<double>::infinity();
  std::vector<Vec3> ua, ub;
  for (const auto& p : a.points) ua.push_back(unit_vector(p));
  for (const auto& p : b.points) ub.push_back(unit_vector(p));
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto cost = [&](const std::vector<size_t>& perm) {
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i)
      worst = std::max(worst, (ua[i] - ub[perm[i]]).norm());
    return worst;
  };
  if (n <= 8) {
    double best = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
      best = std::min(best, cost(idx));
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
  }
  // Greedy fallback for large constellations.
  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double bestd = std::numeric_limits<double>::infinity();
    size_t bestk = 0;
    for (size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      const double d = (ua[i] - ub[k]).norm();
      if (d < bestd) {
        bestd = d;
        bestk = k;
      }
    }
    used[bestk] = true;
    worst = std::max(worst, bestd);
  }
  return worst;
}

}  // namespace polspin
