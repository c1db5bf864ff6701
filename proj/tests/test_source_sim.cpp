#include <doctest.h>

#include <cmath>

#include "polspin/errors.hpp"
#include "polspin/source_sim.hpp"
#include "test_helpers.hpp"

using namespace polspin;

namespace {

FockRegister single_key(int n_max, int nh, int nv, int nt = 0, int ns = 0) {
  FockRegister reg = vacuum_register(n_max);
  FockKey k = 0;
  k = key_with_occupation(k, kModeH, nh);
  k = key_with_occupation(k, kModeV, nv);
  k = key_with_occupation(k, kModeHerald, nt);
  k = key_with_occupation(k, kModeSignal, ns);
  reg.branches[0].amps.clear();
  reg.branches[0].amps[k] = cxd(1.0, 0.0);
  return reg;
}

cxd amp_at(const FockBranch& br, int nh, int nv, int nt = 0, int ns = 0) {
  FockKey k = 0;
  k = key_with_occupation(k, kModeH, nh);
  k = key_with_occupation(k, kModeV, nv);
  k = key_with_occupation(k, kModeHerald, nt);
  k = key_with_occupation(k, kModeSignal, ns);
  const auto it = br.amps.find(k);
  return it == br.amps.end() ? cxd(0.0, 0.0) : it->second;
}

const EventClass& find_class(const SourceOutput& out, const std::string& label) {
  for (const auto& ec : out.ledger)
    if (ec.label == label) return ec;
  REQUIRE(false);
  return out.ledger.front();
}

}  // namespace

TEST_SUITE("source_sim") {

TEST_CASE("vacuum register and weight bookkeeping") {
  auto reg = vacuum_register(8);
  REQUIRE(reg.branches.size() == 1);
  CHECK(register_weight(reg) == doctest::Approx(1.0));
  CHECK(reg.truncation_loss == 0.0);
  CHECK_THROWS_AS(vacuum_register(0), ValidationError);
}

TEST_CASE("squeezer produces even pair amplitudes") {
  auto reg = vacuum_register(10);
  apply_squeezer(reg, kModeH, 0.0);
  CHECK(register_weight(reg) == doctest::Approx(1.0));
  CHECK(std::abs(amp_at(reg.branches[0], 0, 0) - cxd(1, 0)) < 1e-15);

  const double xi = 0.3;
  reg = vacuum_register(10);
  apply_squeezer(reg, kModeH, xi);
  const cxd a0 = amp_at(reg.branches[0], 0, 0);
  const cxd a2 = amp_at(reg.branches[0], 2, 0);
  const cxd a4 = amp_at(reg.branches[0], 4, 0);
  CHECK(std::abs(a2 / a0 - cxd(xi / std::sqrt(2.0), 0)) < 1e-14);
  CHECK(std::abs(a4 / a0 - cxd(xi * xi * std::sqrt(6.0) / 4.0, 0)) < 1e-14);
  CHECK(std::abs(amp_at(reg.branches[0], 1, 0)) == 0.0);
  normalize_register(reg);
  CHECK(register_weight(reg) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(apply_squeezer(reg, kModeH, 1.0), ValidationError);
}

TEST_CASE("squeezer truncation is accounted for") {
  // exp[(xi/2) a^+2]|0> has squared norm 1/sqrt(1 - xi^2)
  auto reg = vacuum_register(6);
  apply_squeezer(reg, kModeH, 0.5);
  CHECK(register_weight(reg) + reg.truncation_loss ==
        doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-9));
  CHECK(reg.truncation_loss > 0.0);
}

TEST_CASE("displacement is unitary and builds a coherent state") {
  auto reg = vacuum_register(8);
  apply_displacement(reg, kModeV, 0.0);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 0) - cxd(1, 0)) < 1e-12);

  const double alpha = 0.4;
  reg = vacuum_register(8);
  apply_displacement(reg, kModeV, alpha);
  CHECK(register_weight(reg) == doctest::Approx(1.0).epsilon(1e-12));
  const double p0 = std::norm(amp_at(reg.branches[0], 0, 0));
  const double p1 = std::norm(amp_at(reg.branches[0], 0, 1));
  CHECK(p1 / p0 == doctest::Approx(alpha * alpha).epsilon(1e-12));
  CHECK(p0 == doctest::Approx(std::exp(-alpha * alpha)).epsilon(1e-12));
}

TEST_CASE("pair source emits twin photons") {
  auto reg = vacuum_register(8);
  apply_pair_source(reg, kModeHerald, kModeSignal, 0.0);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 0) - cxd(1, 0)) < 1e-15);

  const double mu = 0.3;
  reg = vacuum_register(8);
  apply_pair_source(reg, kModeHerald, kModeSignal, mu);
  for (const auto& [key, amp] : reg.branches[0].amps)
    CHECK(key_occupation(key, kModeHerald) == key_occupation(key, kModeSignal));
  const cxd a0 = amp_at(reg.branches[0], 0, 0, 0, 0);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 0, 1, 1) / a0 - cxd(mu, 0)) < 1e-14);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 0, 2, 2) / a0 - cxd(mu * mu, 0)) < 1e-14);
  CHECK_THROWS_AS(apply_pair_source(reg, kModeHerald, kModeSignal, 1.0),
                  ValidationError);
}

TEST_CASE("balanced splitter: two-photon interference kills the coincidence") {
  auto reg = single_key(8, 1, 1);
  Eigen::Matrix2cd mix;
  mix << 1, 1, -1, 1;
  mix /= std::sqrt(2.0);
  apply_beamsplitter(reg, kModeH, kModeV, mix);
  CHECK(register_weight(reg) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(amp_at(reg.branches[0], 1, 1)) < 1e-14);
  CHECK(std::abs(amp_at(reg.branches[0], 2, 0) - cxd(1.0 / std::sqrt(2.0), 0)) <
        1e-13);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 2) + cxd(1.0 / std::sqrt(2.0), 0)) <
        1e-13);

  Eigen::Matrix2cd bad;
  bad << 1, 0, 1, 1;
  CHECK_THROWS_AS(apply_beamsplitter(reg, kModeH, kModeV, bad), ValidationError);
}

TEST_CASE("beamsplitter conserves photon number") {
  auto reg = single_key(12, 3, 2);
  Eigen::Matrix2cd u;
  const double th = 0.37;
  u << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
  apply_beamsplitter(reg, kModeH, kModeV, u);
  CHECK(register_weight(reg) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& [key, amp] : reg.branches[0].amps)
    CHECK(key_occupation(key, kModeH) + key_occupation(key, kModeV) == 5);
}

TEST_CASE("half-wave plate settings") {
  const auto swap = hwp_unitary(pi / 4);
  CHECK(std::abs(swap(0, 0)) < 1e-15);
  CHECK(std::abs(swap(0, 1) - cxd(1, 0)) < 1e-15);
  auto reg = single_key(8, 1, 0);
  apply_beamsplitter(reg, kModeH, kModeV, swap);
  CHECK(std::abs(amp_at(reg.branches[0], 0, 1) - cxd(1, 0)) < 1e-13);

  Eigen::Matrix2cd merge;
  merge << 1, 1, 1, -1;
  merge /= std::sqrt(2.0);
  CHECK((hwp_unitary(pi / 8) - merge).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("loss splits branches and counts the lost photons") {
  auto reg = single_key(8, 2, 0);
  apply_loss(reg, kModeH, 1.0, &BranchRecord::lost_collinear);
  REQUIRE(reg.branches.size() == 1);
  CHECK(reg.branches[0].rec.lost_collinear == 0);

  reg = single_key(8, 2, 0);
  apply_loss(reg, kModeH, 0.0, &BranchRecord::lost_collinear);
  REQUIRE(reg.branches.size() == 1);
  CHECK(reg.branches[0].rec.lost_collinear == 2);
  CHECK(key_occupation(reg.branches[0].amps.begin()->first, kModeH) == 0);
  CHECK(register_weight(reg) == doctest::Approx(1.0).epsilon(1e-14));

  const double tr = 0.7;
  reg = single_key(8, 1, 0);
  apply_loss(reg, kModeH, tr, &BranchRecord::lost_collinear);
  REQUIRE(reg.branches.size() == 2);
  double kept = 0.0, lost = 0.0;
  for (const auto& br : reg.branches) {
    double w = 0.0;
    for (const auto& [k, a] : br.amps) w += std::norm(a);
    (br.rec.lost_collinear == 0 ? kept : lost) += w;
  }
  CHECK(kept == doctest::Approx(tr).epsilon(1e-14));
  CHECK(lost == doctest::Approx(1.0 - tr).epsilon(1e-14));
  CHECK_THROWS_AS(apply_loss(reg, kModeH, 1.5, &BranchRecord::lost_collinear),
                  ValidationError);
}

TEST_CASE("lossless low-gain pipeline delivers the target state") {
  SourceParams p;
  p.eta = 1e-3;
  p.mu = 1e-3;
  p.t = 1.0;
  p.tau = 1.0;
  p.n_max = 8;
  const auto out = run_pipeline(p);
  CHECK_NOTHROW(validate_density(out.rho));
  CHECK(fidelity(out.rho, tetrahedron_state()) >= 0.999);
  CHECK(out.success_probability > 0.0);
  CHECK(out.success_probability < 1e-10);

  // loss-tagged classes are impossible without loss
  CHECK(find_class(out, "desired").simulated > 0.0);
  CHECK(find_class(out, "collinear_photon_lost").simulated == 0.0);
  CHECK(find_class(out, "signal_lost").simulated == 0.0);
  CHECK(find_class(out, "collinear_photon_lost").analytic == 0.0);
  CHECK(find_class(out, "signal_lost").analytic == 0.0);
  // the dark-port class survives even in the lossless device
  CHECK(find_class(out, "signal_to_dark").simulated > 0.0);

  double total = 0.0;
  for (const auto& ec : out.ledger) total += ec.simulated;
  CHECK(total == doctest::Approx(out.success_probability).epsilon(1e-12));
}

TEST_CASE("event ledger: closed forms match the register simulation") {
  SourceParams p;
  p.eta = 0.06;
  p.mu = 0.10;
  p.t = 0.8;
  p.tau = 0.7;
  p.n_max = 10;
  const auto out = run_pipeline(p);
  for (const auto* label :
       {"desired", "collinear_photon_lost", "signal_lost", "signal_to_dark"}) {
    const auto& ec = find_class(out, label);
    CHECK(ec.analytic > 0.0);
    CHECK(std::abs(ec.simulated - ec.analytic) < 1e-8 * ec.analytic);
  }
  const double pa = find_class(out, "desired").simulated;
  CHECK(pa > find_class(out, "collinear_photon_lost").simulated);
  CHECK(pa > find_class(out, "signal_lost").simulated);
  CHECK(pa > find_class(out, "signal_to_dark").simulated);
}

TEST_CASE("ledger weights scale exactly with the herald-arm transmission") {
  SourceParams p;
  p.eta = 0.05;
  p.mu = 0.08;
  p.t = 0.8;
  p.n_max = 8;
  p.tau = 0.9;
  const auto hi = run_pipeline(p);
  p.tau = 0.6;
  const auto lo = run_pipeline(p);
  // desired events need both herald-path photons: weight goes as tau^2
  CHECK(find_class(hi, "desired").simulated / find_class(lo, "desired").simulated ==
        doctest::Approx((0.9 * 0.9) / (0.6 * 0.6)).epsilon(1e-9));
  // a lost twin carries tau (1 - tau)
  CHECK(find_class(hi, "signal_lost").simulated /
            find_class(lo, "signal_lost").simulated ==
        doctest::Approx((0.9 * 0.1) / (0.6 * 0.4)).epsilon(1e-9));
}

TEST_CASE("matched coherent amplitude balances the collinear arm") {
  SourceParams p;
  CHECK(p.matched_alpha() == doctest::Approx(std::sqrt(2.0 * p.eta * p.t)));
  p.alpha = 0.25;  // explicit override is honored
  p.eta = 1e-3;
  p.mu = 1e-3;
  p.t = 1.0;
  p.tau = 1.0;
  const auto out = run_pipeline(p);
  // unmatched drive degrades the state but still heralds events
  CHECK(out.success_probability > 0.0);
  CHECK(fidelity(out.rho, tetrahedron_state()) < 0.999);
}

TEST_CASE("leakage channel") {
  const auto rho = pure_density(tetrahedron_state());
  const auto same = leakage_channel(rho, 0.0);
  const auto mixed = leakage_channel(rho, 0.3);
  CHECK_NOTHROW(validate_density(same));
  CHECK_NOTHROW(validate_density(mixed));
  CHECK(fidelity(same, tetrahedron_state()) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(fidelity(mixed, tetrahedron_state()) ==
        doctest::Approx(std::sqrt(0.7)).epsilon(1e-13));
  for (const auto& sec : mixed.sectors) {
    if (sec.two_j == 4)
      CHECK(std::abs(std::real(sec.block.trace()) - 0.7) < 1e-13);
    if (sec.two_j == 2)
      CHECK((sec.block - 0.1 * MatXc::Identity(3, 3) / 3.0 * 1.0)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
    if (sec.two_j == 0) CHECK(std::abs(sec.block(0, 0)) < 1e-15);
  }
  CHECK_THROWS_AS(leakage_channel(rho, 1.5), ValidationError);
  CHECK_THROWS_AS(leakage_channel(empty_block_density(2), 0.1), ValidationError);
}

TEST_CASE("pipeline applies the requested leakage") {
  SourceParams p;
  p.eta = 1e-3;
  p.mu = 1e-3;
  p.t = 1.0;
  p.tau = 1.0;
  p.n_max = 8;
  const double f0 = fidelity(run_pipeline(p).rho, tetrahedron_state());
  p.epsilon = 0.2;
  const auto out = run_pipeline(p);
  CHECK(fidelity(out.rho, tetrahedron_state()) ==
        doctest::Approx(std::sqrt(0.8) * f0).epsilon(1e-12));
}

TEST_CASE("pipeline input validation") {
  SourceParams p;
  p.n_max = 5;
  CHECK_THROWS_AS(run_pipeline(p), ValidationError);
  p = SourceParams{};
  p.eta = 0.5;
  CHECK_THROWS_AS(run_pipeline(p), ValidationError);
  p = SourceParams{};
  p.mu = 1.0;
  CHECK_THROWS_AS(run_pipeline(p), ValidationError);
  p = SourceParams{};
  p.t = 1.2;
  CHECK_THROWS_AS(run_pipeline(p), ValidationError);
  p = SourceParams{};
  p.epsilon = -0.1;
  CHECK_THROWS_AS(run_pipeline(p), ValidationError);

  p = SourceParams{};
  p.eta = 0.0;
  p.mu = 0.0;  // no herald photons at all: post-selection is empty
  CHECK_THROWS_AS(run_pipeline(p), ConvergenceError);
}

}  // TEST_SUITE
