#include "polspin/source_sim.hpp"

#include <cmath>

#include "polspin/errors.hpp"

namespace polspin {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void add_amp(std::map<FockKey, cxd>& amps, FockKey key, cxd value) {
  auto [it, fresh] = amps.try_emplace(key, value);
  if (!fresh) it->second += value;
}

}  // namespace

double SourceParams::matched_alpha() const { return std::sqrt(2.0 * eta * t); }

FockRegister vacuum_register(int n_max) {
  if (n_max < 1) throw ValidationError("vacuum_register: n_max must be >= 1");
  FockRegister reg;
  reg.n_max = n_max;
  FockBranch b;
  b.amps[0] = cxd(1.0, 0.0);
  reg.branches.push_back(std::move(b));
  return reg;
}

double register_weight(const FockRegister& reg) {
  double w = 0.0;
  for (const auto& b : reg.branches)
    for (const auto& [k, a] : b.amps) w += std::norm(a);
  return w;
}

void normalize_register(FockRegister& reg) {
  const double w = register_weight(reg);
  if (w <= 0.0) throw ConvergenceError("normalize_register: register has no weight");
  const double s = 1.0 / std::sqrt(w);
  for (auto& b : reg.branches)
    for (auto& [k, a] : b.amps) a *= s;
}

void apply_squeezer(FockRegister& reg, int mode, double xi) {
  if (std::abs(xi) >= 1.0)
    throw ValidationError("apply_squeezer: |xi| must be < 1 for a normalizable state");
  for (auto& br : reg.branches) {
    std::map<FockKey, cxd> out;
    for (const auto& [key, amp] : br.amps) {
      const int n = key_occupation(key, mode);
      double coeff = 1.0;  // p-pair term, built iteratively
      for (int p = 0;; ++p) {
        if (p > 0) {
          const int top = n + 2 * p;
          coeff *= 0.5 * xi * std::sqrt(double(top - 1) * double(top)) / double(p);
        }
        const double w = std::norm(amp) * coeff * coeff;
        if (p > 0 && w < 1e-32 && n + 2 * p > reg.n_max) break;
        if (n + 2 * p <= reg.n_max)
          add_amp(out, key_with_occupation(key, mode, n + 2 * p), amp * coeff);
        else
          reg.truncation_loss += w;
        if (n + 2 * p > reg.n_max + 60) break;
      }
    }
    br.amps = std::move(out);
  }
}

void apply_displacement(FockRegister& reg, int mode, double alpha) {
  const int n_ext = reg.n_max + 14;  // headroom so the chop is quantifiable
  MatXc gen = MatXc::Zero(n_ext, n_ext);
  for (int n = 0; n + 1 < n_ext; ++n) {
    gen(n + 1, n) = alpha * std::sqrt(double(n + 1));   // alpha a^+
    gen(n, n + 1) = -alpha * std::sqrt(double(n + 1));  // -alpha a
  }
  // gen is anti-Hermitian: diagonalize i*gen and exponentiate the phases.
  Eigen::SelfAdjointEigenSolver<MatXc> es(cxd(0.0, 1.0) * gen);
  VecXc ph(n_ext);
  for (int i = 0; i < n_ext; ++i) {
    const double lam = es.eigenvalues()(i);
    ph(i) = cxd(std::cos(lam), -std::sin(lam));
  }
  const MatXc u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();

  for (auto& br : reg.branches) {
    std::map<FockKey, cxd> out;
    for (const auto& [key, amp] : br.amps) {
      const int n = key_occupation(key, mode);
      for (int m = 0; m < n_ext; ++m) {
        const cxd a = amp * u(m, n);
        if (std::norm(a) < 1e-32 && m > reg.n_max) continue;
        if (m <= reg.n_max)
          add_amp(out, key_with_occupation(key, mode, m), a);
        else
          reg.truncation_loss += std::norm(a);
      }
    }
    br.amps = std::move(out);
  }
}

void apply_pair_source(FockRegister& reg, int mode_a, int mode_b, double mu) {
  if (std::abs(mu) >= 1.0)
    throw ValidationError("apply_pair_source: |mu| must be < 1");
  for (auto& br : reg.branches) {
    std::map<FockKey, cxd> out;
    for (const auto& [key, amp] : br.amps) {
      const int na = key_occupation(key, mode_a);
      const int nb = key_occupation(key, mode_b);
      double coeff = 1.0;
      for (int p = 0;; ++p) {
        if (p > 0)
          coeff *= mu * std::sqrt(double(na + p) * double(nb + p)) / double(p);
        const bool fits = na + p <= reg.n_max && nb + p <= reg.n_max;
        const double w = std::norm(amp) * coeff * coeff;
        if (fits) {
          FockKey k2 = key_with_occupation(key, mode_a, na + p);
          k2 = key_with_occupation(k2, mode_b, nb + p);
          add_amp(out, k2, amp * coeff);
        } else {
          reg.truncation_loss += w;
          if (w < 1e-32) break;
        }
        if (p > reg.n_max + 60) break;
      }
    }
    br.amps = std::move(out);
  }
}

void apply_beamsplitter(FockRegister& reg, int mode_a, int mode_b,
                        const Eigen::Matrix2cd& u) {
  if ((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("apply_beamsplitter: matrix is not unitary");
  for (auto& br : reg.branches) {
    std::map<FockKey, cxd> out;
    for (const auto& [key, amp] : br.amps) {
      const int na = key_occupation(key, mode_a);
      const int nb = key_occupation(key, mode_b);
      const int n = na + nb;
      // Monomial x^na y^nb -> product of transformed factors, collected as
      // coefficients of x^k y^(n-k).
      std::vector<cxd> coeff(n + 1, cxd(0.0, 0.0));
      for (int i = 0; i <= na; ++i)
        for (int j = 0; j <= nb; ++j) {
          // i of the a-factors and j of the b-factors land on mode a
          const int k = i + j;
          cxd c = binomial(na, i) * binomial(nb, j) *
                  std::pow(u(0, 0), i) * std::pow(u(1, 0), na - i) *
                  std::pow(u(0, 1), j) * std::pow(u(1, 1), nb - j);
          coeff[k] += c;
        }
      const double norm_in = std::sqrt(factorial(na) * factorial(nb));
      for (int k = 0; k <= n; ++k) {
        if (coeff[k] == cxd(0.0, 0.0)) continue;
        const cxd a =
            amp * coeff[k] * std::sqrt(factorial(k) * factorial(n - k)) / norm_in;
        if (k > reg.n_max || n - k > reg.n_max) {
          reg.truncation_loss += std::norm(a);
          continue;
        }
        FockKey k2 = key_with_occupation(key, mode_a, k);
        k2 = key_with_occupation(k2, mode_b, n - k);
        add_amp(out, k2, a);
      }
    }
    br.amps = std::move(out);
  }
}

Eigen::Matrix2cd hwp_unitary(double angle) {
  Eigen::Matrix2cd u;
  const double c = std::cos(2.0 * angle), s = std::sin(2.0 * angle);
  u << c, s, s, -c;
  return u;
}

void apply_loss(FockRegister& reg, int mode, double transmission,
                int BranchRecord::*counter) {
  if (transmission < 0.0 || transmission > 1.0)
    throw ValidationError("apply_loss: transmission must be in [0, 1]");
  std::vector<FockBranch> result;
  for (auto& br : reg.branches) {
    std::map<int, FockBranch> by_lost;
    for (const auto& [key, amp] : br.amps) {
      const int n = key_occupation(key, mode);
      for (int k = 0; k <= n; ++k) {
        const double f = std::sqrt(binomial(n, k) * std::pow(transmission, n - k) *
                                   std::pow(1.0 - transmission, k));
        if (f == 0.0) continue;
        auto& sub = by_lost[k];
        add_amp(sub.amps, key_with_occupation(key, mode, n - k), amp * f);
      }
    }
    for (auto& [k, sub] : by_lost) {
      sub.rec = br.rec;
      sub.rec.*counter += k;
      result.push_back(std::move(sub));
    }
  }
  reg.branches = std::move(result);
}

// ---------------------------------------------------------------------------
// Analytic event ledger.  Closed forms for the four leading heralded event
// classes, tracked through the same optical conventions as the register
// pipeline but with no Fock machinery: only the relevant photon-number
// components are carried.

namespace {

struct LedgerInputs {
  double e_coh;     // exp(-alpha^2/2)
  double nsq;       // collinear squeezer normalization (amplitude)
  double nmu2;      // herald-pair normalization 1/(1-mu^2)
  double a0, a1, a2;  // x^{2p} monomial coefficients of the squeezed state
};

LedgerInputs ledger_inputs(const SourceParams& p, double alpha) {
  LedgerInputs li;
  const double xi = 2.0 * p.eta;
  double nsq2 = 0.0;
  for (int n = 0; n < 60; ++n) {
    const double term =
        std::pow(0.5 * xi, n) * std::sqrt(factorial(2 * n)) / factorial(n);
    nsq2 += term * term;
    if (term * term < 1e-30) break;
  }
  li.nsq = std::sqrt(nsq2);
  li.nmu2 = 1.0 / (1.0 - p.mu * p.mu);
  li.e_coh = std::exp(-0.5 * alpha * alpha);
  li.a0 = 1.0 / li.nsq;
  li.a1 = 0.5 * xi / li.nsq;
  li.a2 = 0.25 * xi * xi / 2.0 / li.nsq;
  return li;
}

// Weight of the polynomial sum_k r[k] h^k v^{deg-k} after merging the signal
// photon into h (h -> (h'+s')/sqrt2, s -> (h'-s')/sqrt2), keeping the
// dark-port vacuum component.
double merged_signal_weight(const std::vector<double>& r) {
  const int deg = int(r.size()) - 1;  // source polynomial degree (3)
  double w = 0.0;
  for (int k = 0; k <= deg; ++k) {
    const double coeff = r[k] / std::pow(2.0, 0.5 * k) / std::sqrt(2.0);
    w += coeff * coeff * factorial(k + 1) * factorial(deg - k);
  }
  return w;
}

}  // namespace

std::vector<EventClass> analytic_ledger(const SourceParams& p);

std::vector<EventClass> analytic_ledger(const SourceParams& p) {
  const double alpha = p.alpha < 0.0 ? p.matched_alpha() : p.alpha;
  const LedgerInputs li = ledger_inputs(p, alpha);
  const double mu2 = p.mu * p.mu, tau = p.tau, t = p.t;
  const double s2 = std::sqrt(2.0);

  std::vector<EventClass> out;

  {  // Class A: three collinear photons plus the heralded one, nothing lost.
    const double c21 = li.a1 * t * li.e_coh * alpha;
    const double c03 = li.a0 * li.e_coh * alpha * alpha * alpha / 6.0;
    // x^2 y -> (h-v)^2 (h+v) / (2 sqrt2), y^3 -> (h+v)^3 / (2 sqrt2);
    // rh[k] multiplies h^k v^{3-k}.
    const std::vector<double> rh{(c21 + c03) / (2.0 * s2),
                                 (-c21 + 3.0 * c03) / (2.0 * s2),
                                 (-c21 + 3.0 * c03) / (2.0 * s2),
                                 (c21 + c03) / (2.0 * s2)};
    EventClass ec;
    ec.label = "desired";
    ec.monomial = "eta^3 t^3 mu^2 tau^2";
    ec.analytic = mu2 * tau * tau / li.nmu2 * merged_signal_weight(rh);
    out.push_back(ec);
  }

  {  // Class B: one collinear photon lost before the waveplate.
    // Losing one of n collinear photons carries a factor n on the monomial.
    const double c30 = 4.0 * li.a2 * std::pow(t, 1.5) * std::sqrt(1.0 - t) * li.e_coh;
    const double c12 =
        li.a1 * std::sqrt(t) * std::sqrt(1.0 - t) * li.e_coh * alpha * alpha;
    // x^3 -> (h-v)^3/(2 sqrt2), x y^2 -> (h-v)(h+v)^2/(2 sqrt2)
    const std::vector<double> rh{(-c30 - c12) / (2.0 * s2),
                                 (3.0 * c30 - c12) / (2.0 * s2),
                                 (-3.0 * c30 + c12) / (2.0 * s2),
                                 (c30 + c12) / (2.0 * s2)};
    EventClass ec;
    ec.label = "collinear_photon_lost";
    ec.monomial = "eta^4 t^3 (1-t) mu^2 tau^2";
    ec.analytic = mu2 * tau * tau / li.nmu2 * merged_signal_weight(rh);
    out.push_back(ec);
  }

  // Four-photon collinear component (shared by classes C and D).
  const double c40 = li.a2 * t * t * li.e_coh;
  const double c22 = li.a1 * t * li.e_coh * alpha * alpha / 2.0;
  const double c04 = li.a0 * li.e_coh * std::pow(alpha, 4) / 24.0;
  // x^4 -> (h-v)^4/4, x^2 y^2 -> (h^2-v^2)^2/4, y^4 -> (h+v)^4/4;
  // q[k] multiplies h^k v^{4-k}.
  const std::vector<double> q{
      (c40 + c22 + c04) / 4.0, (-4.0 * c40 + 4.0 * c04) / 4.0,
      (6.0 * c40 - 2.0 * c22 + 6.0 * c04) / 4.0, (-4.0 * c40 + 4.0 * c04) / 4.0,
      (c40 + c22 + c04) / 4.0};

  {  // Class C: herald clicked but its twin was lost on the signal path.
    double w = 0.0;
    for (int k = 0; k <= 4; ++k) {
      const double coeff = q[k] / std::pow(2.0, 0.5 * k);
      w += coeff * coeff * factorial(k) * factorial(4 - k);
    }
    EventClass ec;
    ec.label = "signal_lost";
    ec.monomial = "eta^4 t^4 mu^2 tau (1-tau)";
    ec.analytic = mu2 * tau * (1.0 - tau) / li.nmu2 * w;
    out.push_back(ec);
  }

  {  // Class D: signal photon exits through the unused merge port.
    double w = 0.0;
    for (int k = 0; k <= 4; ++k) {
      const double coeff = q[k] * (k - 1) / std::pow(2.0, 0.5 * k) / s2;
      w += coeff * coeff * factorial(k) * factorial(4 - k);
    }
    EventClass ec;
    ec.label = "signal_to_dark";
    ec.monomial = "eta^4 t^4 mu^2 tau^2";
    ec.analytic = mu2 * tau * tau / li.nmu2 * w;
    out.push_back(ec);
  }

  return out;
}

SourceOutput run_pipeline(const SourceParams& p) {
  if (p.n_max < 6) throw ValidationError("run_pipeline: n_max must be >= 6");
  if (p.eta < 0.0 || 2.0 * p.eta >= 1.0)
    throw ValidationError("run_pipeline: need 0 <= eta < 0.5");
  if (p.mu < 0.0 || p.mu >= 1.0) throw ValidationError("run_pipeline: need 0 <= mu < 1");
  if (p.t < 0.0 || p.t > 1.0 || p.tau < 0.0 || p.tau > 1.0)
    throw ValidationError("run_pipeline: transmissions must be in [0, 1]");
  if (p.epsilon < 0.0 || p.epsilon > 1.0)
    throw ValidationError("run_pipeline: epsilon must be in [0, 1]");
  const double alpha = p.alpha < 0.0 ? p.matched_alpha() : p.alpha;

  FockRegister reg = vacuum_register(p.n_max);
  apply_squeezer(reg, kModeH, 2.0 * p.eta);
  normalize_register(reg);
  apply_loss(reg, kModeH, p.t, &BranchRecord::lost_collinear);
  apply_displacement(reg, kModeV, alpha);
  // Balanced polarization rotation mapping the collinear pair + coherent beam
  // onto the three-photon N00N component (locked relative phase).
  Eigen::Matrix2cd mix;
  mix << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0),
      1.0 / std::sqrt(2.0);
  apply_beamsplitter(reg, kModeH, kModeV, mix);
  apply_pair_source(reg, kModeHerald, kModeSignal, p.mu);
  normalize_register(reg);
  apply_loss(reg, kModeHerald, p.tau, &BranchRecord::lost_herald);
  apply_loss(reg, kModeSignal, p.tau, &BranchRecord::lost_signal);
  // Merge the signal path into H on a balanced splitter; the second output
  // port is undetected ("dark").
  Eigen::Matrix2cd merge;
  merge << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0),
      -1.0 / std::sqrt(2.0);
  apply_beamsplitter(reg, kModeH, kModeSignal, merge);

  // Decompose on (herald count, dark count) and condition on an exact
  // five-fold coincidence: one herald detection with four polarization
  // photons (the dark port is unobserved and stays free).
  SourceOutput out;
  out.truncation_loss = reg.truncation_loss;
  MatXc block = MatXc::Zero(5, 5);
  std::map<std::string, double> sim_class;
  double success = 0.0;
  for (const auto& br : reg.branches) {
    std::map<std::pair<int, int>, VecXc> sub;  // (n_T, n_S) -> 4-photon amps
    for (const auto& [key, amp] : br.amps) {
      const int nh = key_occupation(key, kModeH), nv = key_occupation(key, kModeV);
      const int nt = key_occupation(key, kModeHerald),
                ns = key_occupation(key, kModeSignal);
      if (nt != 1 || nh + nv != 4) continue;
      auto [it, fresh] = sub.try_emplace({nt, ns}, VecXc::Zero(5));
      it->second(4 - nh) += amp;  // index 0 <-> n_H = 4 (m descending)
    }
    for (const auto& [tag, psi] : sub) {
      const double w = psi.squaredNorm();
      if (w <= 0.0) continue;
      success += w;
      block += psi * psi.adjoint();
      BranchRecord rec = br.rec;
      rec.herald_clicks = tag.first;
      rec.dark = tag.second;
      std::string label = "other";
      if (rec.herald_clicks == 1 && rec.lost_herald == 0) {
        if (rec.lost_collinear == 0 && rec.lost_signal == 0 && rec.dark == 0)
          label = "desired";
        else if (rec.lost_collinear == 1 && rec.lost_signal == 0 && rec.dark == 0)
          label = "collinear_photon_lost";
        else if (rec.lost_collinear == 0 && rec.lost_signal == 1 && rec.dark == 0)
          label = "signal_lost";
        else if (rec.lost_collinear == 0 && rec.lost_signal == 0 && rec.dark == 1)
          label = "signal_to_dark";
      }
      sim_class[label] += w;
    }
  }
  if (success <= 0.0)
    throw ConvergenceError("run_pipeline: post-selection has no weight");

  out.success_probability = success;
  out.rho = empty_block_density(4);
  out.rho.sectors[0].block = block / std::real(block.trace());
  if (p.epsilon > 0.0) out.rho = leakage_channel(out.rho, p.epsilon);

  out.ledger = analytic_ledger(p);
  for (auto& ec : out.ledger) ec.simulated = sim_class[ec.label];
  if (sim_class.count("other")) {
    EventClass other;
    other.label = "other";
    other.monomial = "";
    other.analytic = 0.0;
    other.simulated = sim_class["other"];
    out.ledger.push_back(other);
  }
  return out;
}

BlockDensityMatrix leakage_channel(const BlockDensityMatrix& rho, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw ValidationError("leakage_channel: epsilon must be in [0, 1]");
  BlockDensityMatrix out = empty_block_density(4);
  const BlockDensityMatrix::Sector* spin2 = nullptr;
  for (const auto& sec : rho.sectors) {
    if (sec.two_j == 4) spin2 = &sec;
    for (auto& osec : out.sectors)
      if (osec.two_j == sec.two_j) osec.block = sec.block;
  }
  if (!spin2) throw ValidationError("leakage_channel: spin-2 sector required");
  for (auto& sec : out.sectors) {
    if (sec.two_j == 4) sec.block *= (1.0 - epsilon);
    if (sec.two_j == 2)
      sec.block += (epsilon / 3.0) * (MatXc::Identity(3, 3) / 3.0);
  }
  return out;
}

}  // namespace polspin
