#include "polspin/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "polspin/errors.hpp"
#include "polspin/metrology.hpp"
#include "polspin/rng.hpp"

namespace polspin {

namespace {

// Columns are the Dicke states quantized along `axis`.
MatXc basis_unitary(int two_j, const Vec3& axis) {
  const Vec3 n = axis.normalized();
  const double cz = std::clamp(n.z(), -1.0, 1.0);
  const Vec3 rot_axis = Vec3(0, 0, 1).cross(n);
  const double s = rot_axis.norm();
  RotationParams r;
  if (s < 1e-14) {
    if (cz > 0.0) return MatXc::Identity(two_j + 1, two_j + 1);
    r.theta = Vec3(pi, 0.0, 0.0);  // z -> -z about x
  } else {
    r.theta = std::acos(cz) * (rot_axis / s);
  }
  return rotation_unitary(two_j, r);
}

constexpr int kOutcomes = 5;  // photons in the + port, 0..4

}  // namespace

std::vector<BasisSetting> default_bases() {
  std::vector<BasisSetting> bases;
  bases.push_back({Vec3(0, 0, 1)});
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const double z_lo = 0.25, z_hi = 0.85;
  for (int i = 0; i < 12; ++i) {
    const double z = z_lo + (z_hi - z_lo) * (i + 0.5) / 12.0;
    const double phi = 2.0 * pi * std::fmod(i * golden, 1.0);
    const double r = std::sqrt(1.0 - z * z);
    bases.push_back({Vec3(r * std::cos(phi), r * std::sin(phi), z)});
  }
  return bases;
}

std::vector<double> outcome_probabilities(const BlockDensityMatrix& rho,
                                          const BasisSetting& b) {
  if (b.axis.norm() < 1e-14)
    throw ValidationError("outcome_probabilities: zero measurement axis");
  std::vector<double> p(kOutcomes, 0.0);
  for (const auto& sec : rho.sectors) {
    if (sec.two_j % 2 != 0) continue;
    const int j2 = sec.two_j;  // doubled j
    const MatXc u = basis_unitary(j2, b.axis);
    const MatXc rot = u.adjoint() * sec.block * u;
    for (int k = 0; k < kOutcomes; ++k) {
      const int two_m = 2 * k - 4;
      if (std::abs(two_m) > j2) continue;
      const int idx = (j2 - two_m) / 2;  // m-descending index
      p[k] += sec.mult * std::real(rot(idx, idx));
    }
  }
  return p;
}

std::vector<CountRecord> simulate_counts(const BlockDensityMatrix& rho,
                                         const std::vector<BasisSetting>& bases,
                                         long total_events, std::uint64_t seed) {
  if (bases.empty()) throw ValidationError("simulate_counts: no bases");
  if (total_events < 1) throw ValidationError("simulate_counts: need events >= 1");
  std::mt19937_64 rng(seed);
  std::vector<CountRecord> out;
  const long base_events = total_events / long(bases.size());
  const long extra = total_events % long(bases.size());
  for (size_t b = 0; b < bases.size(); ++b) {
    const long n_b = base_events + (long(b) < extra ? 1 : 0);
    std::vector<double> p = outcome_probabilities(rho, bases[b]);
    for (double& v : p) v = std::max(v, 0.0);
    const std::vector<long> counts = multinomial_sample(rng, p, n_b);
    for (int k = 1; k <= 3; ++k)
      out.push_back({int(b), k, counts[k]});
  }
  return out;
}

namespace {

struct MeasurementModel {
  // Per kept bin and sector: the projecting vector (u columns), so
  // tr(B Pi) = v^+ B v.  Sector order: two_j = 4, 2, 0 with mults 1, 3, 2.
  struct Bin {
    int basis = 0, outcome = 0;
    VecXc v[3];     // empty when |m| > j
    bool has[3] = {false, false, false};
  };
  std::vector<Bin> bins;
  MatXc g[3];  // sum of kept projectors per sector
  int mults[3] = {1, 3, 2};
  int two_js[3] = {4, 2, 0};
};

MeasurementModel build_model(const std::vector<BasisSetting>& bases) {
  MeasurementModel mm;
  for (int s = 0; s < 3; ++s)
    mm.g[s] = MatXc::Zero(mm.two_js[s] + 1, mm.two_js[s] + 1);
  for (size_t b = 0; b < bases.size(); ++b) {
    MatXc u[3];
    for (int s = 0; s < 3; ++s) u[s] = basis_unitary(mm.two_js[s], bases[b].axis);
    for (int k = 1; k <= 3; ++k) {
      MeasurementModel::Bin bin;
      bin.basis = int(b);
      bin.outcome = k;
      const int two_m = 2 * k - 4;
      for (int s = 0; s < 3; ++s) {
        if (std::abs(two_m) > mm.two_js[s]) continue;
        const int idx = (mm.two_js[s] - two_m) / 2;
        bin.v[s] = u[s].col(idx);
        bin.has[s] = true;
        mm.g[s] += bin.v[s] * bin.v[s].adjoint();
      }
      mm.bins.push_back(std::move(bin));
    }
  }
  return mm;
}

double bin_probability(const MeasurementModel& mm, const MeasurementModel::Bin& bin,
                       const MatXc blocks[3]) {
  double p = 0.0;
  for (int s = 0; s < 3; ++s)
    if (bin.has[s])
      p += mm.mults[s] * std::real(bin.v[s].dot(blocks[s] * bin.v[s]));
  return p;
}

}  // namespace

ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& counts,
                                     const std::vector<BasisSetting>& bases,
                                     const MleOptions& opts) {
  if (bases.empty()) throw ValidationError("mle_reconstruct: no bases");
  MeasurementModel mm = build_model(bases);

  // Order counts onto the model bins.  A recorded zero still matters: it
  // enters the censored likelihood through the detected-fraction term, so
  // identifiability is judged on the recorded bins, not the positive ones.
  std::vector<double> n(mm.bins.size(), 0.0);
  double n_total = 0.0;
  std::set<size_t> recorded;
  for (const auto& c : counts) {
    if (c.basis_index < 0 || c.basis_index >= int(bases.size()))
      throw ValidationError("mle_reconstruct: count references unknown basis");
    if (c.outcome < 1 || c.outcome > 3)
      throw ValidationError("mle_reconstruct: outcome outside the kept range");
    if (c.count < 0) throw ValidationError("mle_reconstruct: negative count");
    const size_t bin = size_t(c.basis_index) * 3 + size_t(c.outcome - 1);
    n[bin] += double(c.count);
    n_total += double(c.count);
    recorded.insert(bin);
  }
  if (n_total <= 0.0) throw ValidationError("mle_reconstruct: no events");
  if (recorded.size() < 35)
    throw ValidationError("mle_reconstruct: fewer than 35 recorded projections; "
                          "the tied-sector model is not identifiable");

  MatXc blocks[3] = {MatXc::Identity(5, 5) / 16.0, MatXc::Identity(3, 3) / 16.0,
                     MatXc::Identity(1, 1) / 16.0};

  auto log_likelihood = [&](const MatXc bl[3]) {
    double ll = 0.0, d = 0.0;
    for (size_t i = 0; i < mm.bins.size(); ++i) {
      const double p = bin_probability(mm, mm.bins[i], bl);
      d += p;
      if (n[i] > 0.0) ll += n[i] * std::log(std::max(p, 1e-300));
    }
    return ll - n_total * std::log(std::max(d, 1e-300));
  };

  double ll = log_likelihood(blocks);
  double eps = 1.0;
  long iter = 0;
  bool converged = false;
  while (iter < opts.max_iterations) {
    ++iter;
    // Gradient pieces: R = sum (n/p) Pi and the censoring term c G.
    double d = 0.0;
    std::vector<double> p(mm.bins.size());
    for (size_t i = 0; i < mm.bins.size(); ++i) {
      p[i] = bin_probability(mm, mm.bins[i], blocks);
      d += p[i];
    }
    const double c = n_total / std::max(d, 1e-300);
    MatXc grad[3];
    for (int s = 0; s < 3; ++s) grad[s] = -c * double(mm.mults[s]) * mm.g[s];
    for (size_t i = 0; i < mm.bins.size(); ++i) {
      if (n[i] <= 0.0) continue;
      const double w = n[i] / std::max(p[i], 1e-300);
      for (int s = 0; s < 3; ++s)
        if (mm.bins[i].has[s])
          grad[s] += (w * mm.mults[s]) * (mm.bins[i].v[s] * mm.bins[i].v[s].adjoint());
    }
    for (int s = 0; s < 3; ++s) grad[s] /= n_total;

    // Diluted congruence step with backtracking; acceptance keeps the
    // likelihood monotone by construction.
    bool accepted = false;
    while (eps > 1e-12) {
      MatXc trial[3];
      double tr = 0.0;
      for (int s = 0; s < 3; ++s) {
        const MatXc m =
            MatXc::Identity(grad[s].rows(), grad[s].cols()) + eps * grad[s];
        trial[s] = m * blocks[s] * m.adjoint();
        trial[s] = 0.5 * (trial[s] + trial[s].adjoint().eval());
        tr += mm.mults[s] * std::real(trial[s].trace());
      }
      for (int s = 0; s < 3; ++s) trial[s] /= tr;
      const double ll_trial = log_likelihood(trial);
      if (ll_trial + 1e-13 * (std::abs(ll) + 1.0) >= ll) {
        const double gain = ll_trial - ll;
        for (int s = 0; s < 3; ++s) blocks[s] = trial[s];
        ll = ll_trial;
        accepted = true;
        eps = std::min(eps * 1.25, 4.0);
        if (gain >= 0.0 && gain < opts.tol) converged = true;
        break;
      }
      eps *= 0.5;
    }
    if (!accepted) converged = true;  // step size exhausted: stationary
    if (converged) break;
  }
  if (!converged)
    throw ConvergenceError("mle_reconstruct: iteration cap reached before the "
                           "log-likelihood settled");

  ReconstructionResult res;
  res.rho = empty_block_density(4);
  for (int s = 0; s < 3; ++s) res.rho.sectors[s].block = blocks[s];
  res.log_likelihood = ll;
  res.iterations = iter;
  res.converged = converged;
  res.phi = align_phase(res.rho, tetrahedron_state());
  return res;
}

double align_phase(const BlockDensityMatrix& rho, const PureSpinState& target) {
  const int two_j = target.two_j;
  const MatXc* block = nullptr;
  int mult = 1;
  for (const auto& sec : rho.sectors)
    if (sec.two_j == two_j) {
      block = &sec.block;
      mult = sec.mult;
    }
  if (!block) throw ValidationError("align_phase: target sector not present");

  // Fidelity after exp(-i phi Jz) conjugation is a trig polynomial in phi:
  // F(phi) = sum_d C_d e^{-i d phi}, d = m - m'.
  const int d = two_j + 1;
  std::vector<cxd> harm(2 * two_j + 1, cxd(0.0, 0.0));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      harm[two_j + (b - a)] += double(mult) * std::conj(target.amps(a)) *
                               target.amps(b) * (*block)(a, b);
  auto eval = [&](double phi) {
    cxd f(0.0, 0.0);
    for (int dd = -two_j; dd <= two_j; ++dd)
      f += harm[two_j + dd] * cxd(std::cos(dd * phi), -std::sin(dd * phi));
    return f.real();
  };
  auto deriv = [&](double phi, int order) {
    cxd f(0.0, 0.0);
    for (int dd = -two_j; dd <= two_j; ++dd) {
      cxd c = harm[two_j + dd] * cxd(std::cos(dd * phi), -std::sin(dd * phi));
      if (order == 1) c *= cxd(0.0, -double(dd));
      if (order == 2) c *= -double(dd) * double(dd);
      f += c;
    }
    return f.real();
  };

  const int grid = 4096;
  std::vector<double> f(grid);
  double fmax = -1e300;
  for (int i = 0; i < grid; ++i) {
    f[i] = eval(2.0 * pi * i / grid);
    fmax = std::max(fmax, f[i]);
  }
  const double plateau = 1e-9 * (std::abs(fmax) + 1e-18);
  std::vector<double> candidates;
  for (int i = 0; i < grid; ++i) {
    const double prev = f[(i + grid - 1) % grid], next = f[(i + 1) % grid];
    if (f[i] >= prev && f[i] >= next && f[i] >= fmax - plateau)
      candidates.push_back(2.0 * pi * i / grid);
  }
  if (candidates.empty()) return 0.0;  // flat landscape

  double best_phi = 0.0, best_val = -1e300;
  for (double phi : candidates) {
    for (int it = 0; it < 60; ++it) {
      const double g1 = deriv(phi, 1), g2 = deriv(phi, 2);
      if (g2 >= -1e-18) break;
      const double step = g1 / g2;
      phi -= step;
      if (std::abs(step) < 1e-14) break;
    }
    double wrapped = std::remainder(phi, 2.0 * pi);
    if (wrapped <= -pi) wrapped += 2.0 * pi;
    const double val = eval(wrapped);
    const bool better =
        val > best_val + 1e-12 * (std::abs(best_val) + 1.0) ||
        (std::abs(val - best_val) <= 1e-12 * (std::abs(best_val) + 1.0) &&
         std::abs(wrapped) < std::abs(best_phi));
    if (best_val == -1e300 || better) {
      best_val = val;
      best_phi = wrapped;
    }
  }
  return best_phi;
}

MonteCarloErrors monte_carlo_errors(const std::vector<CountRecord>& counts,
                                    const std::vector<BasisSetting>& bases,
                                    int n_resamples, std::uint64_t seed,
                                    const MleOptions& opts) {
  MonteCarloErrors mc;
  mc.n_resamples = n_resamples;
  if (n_resamples < 1) return mc;

  const PureSpinState tetra = tetrahedron_state();
  std::vector<MatX> sum1_re, sum2_re, sum1_im, sum2_im;
  double fid1 = 0, fid2 = 0, s1 = 0, s2 = 0, pop1 = 0, pop2 = 0;
  long n_ok = 0, n_sqcrb = 0;
  for (int i = 0; i < n_resamples; ++i) {
    std::mt19937_64 rng(seed + std::uint64_t(i));
    std::vector<CountRecord> resampled = counts;
    for (auto& c : resampled) c.count = poisson_sample(rng, double(c.count));
    ReconstructionResult r;
    try {
      r = mle_reconstruct(resampled, bases, opts);
    } catch (const std::exception&) {
      ++mc.n_failures;
      continue;
    }
    RotationParams align;
    align.theta = Vec3(0, 0, r.phi);
    const BlockDensityMatrix aligned = rotate_density(r.rho, align);
    if (sum1_re.empty()) {
      for (const auto& sec : aligned.sectors) {
        sum1_re.push_back(MatX::Zero(sec.block.rows(), sec.block.cols()));
        sum2_re.push_back(MatX::Zero(sec.block.rows(), sec.block.cols()));
        sum1_im.push_back(MatX::Zero(sec.block.rows(), sec.block.cols()));
        sum2_im.push_back(MatX::Zero(sec.block.rows(), sec.block.cols()));
      }
    }
    for (size_t s = 0; s < aligned.sectors.size(); ++s) {
      const MatX re = aligned.sectors[s].block.real();
      const MatX im = aligned.sectors[s].block.imag();
      sum1_re[s] += re;
      sum2_re[s] += re.cwiseProduct(re);
      sum1_im[s] += im;
      sum2_im[s] += im.cwiseProduct(im);
    }
    const double fid = fidelity(aligned, tetra);
    fid1 += fid;
    fid2 += fid * fid;
    const double bound = sqcrb(r.rho);
    if (std::isfinite(bound)) {
      s1 += bound;
      s2 += bound * bound;
      ++n_sqcrb;
    }
    const double pop = std::real(aligned.sectors[0].block.trace());
    pop1 += pop;
    pop2 += pop * pop;
    ++n_ok;
  }
  if (n_ok == 0) return mc;

  auto sd = [](double s1v, double s2v, long n) {
    const double var = s2v / n - (s1v / n) * (s1v / n);
    return std::sqrt(std::max(var, 0.0));
  };
  for (size_t s = 0; s < sum1_re.size(); ++s) {
    MatX sr = (sum2_re[s] / n_ok - (sum1_re[s] / n_ok).cwiseProduct(sum1_re[s] / n_ok))
                  .cwiseMax(0.0)
                  .cwiseSqrt();
    MatX si = (sum2_im[s] / n_ok - (sum1_im[s] / n_ok).cwiseProduct(sum1_im[s] / n_ok))
                  .cwiseMax(0.0)
                  .cwiseSqrt();
    mc.std_real.push_back(std::move(sr));
    mc.std_imag.push_back(std::move(si));
  }
  mc.fidelity_std = sd(fid1, fid2, n_ok);
  mc.sqcrb_std = n_sqcrb > 0 ? sd(s1, s2, n_sqcrb)
                             : std::numeric_limits<double>::infinity();
  mc.symmetric_population_std = sd(pop1, pop2, n_ok);
  return mc;
}

}  // namespace polspin
