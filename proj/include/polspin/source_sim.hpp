#pragma once

// Heralded tetrahedron-state source: a collinear squeezed/coherent pair in
// the two polarization modes, a heralded single photon merged into H, loss on
// every path, and post-selection on (herald click, 4 detected photons).
//
// The register tracks a weighted list of pure few-mode Fock vectors; loss and
// detection split branches and leave a classical record, so event classes
// stay separable after conditioning.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polspin/spin_core.hpp"
#include "polspin/types.hpp"

namespace polspin {

enum Mode : int { kModeH = 0, kModeV = 1, kModeHerald = 2, kModeSignal = 3 };
inline constexpr int kNumModes = 4;

struct SourceParams {
  double eta = 0.078;    // collinear pair amplitude per source
  double mu = 0.14;      // herald-pair amplitude
  double t = 0.16;       // collinear-path transmission
  double tau = 0.12;     // herald/signal-path transmission
  double alpha = -1.0;   // coherent amplitude; negative means sqrt(2 eta t)
  int n_max = 8;         // per-mode Fock cutoff
  double epsilon = 0.0;  // depolarizing leakage applied to the output

  double matched_alpha() const;
};

struct BranchRecord {
  int lost_collinear = 0;
  int lost_herald = 0;
  int lost_signal = 0;
  int dark = 0;            // photons leaving through the unused merge port
  int herald_clicks = 0;   // photons on the herald detector
};

// Occupation key: 8 bits per mode, H lowest.
using FockKey = std::uint32_t;
inline int key_occupation(FockKey k, int mode) { return int((k >> (8 * mode)) & 0xff); }
inline FockKey key_with_occupation(FockKey k, int mode, int n) {
  return (k & ~(FockKey(0xff) << (8 * mode))) | (FockKey(n) << (8 * mode));
}

struct FockBranch {
  std::map<FockKey, cxd> amps;  // branch probability = sum |amp|^2
  BranchRecord rec;
};

struct FockRegister {
  int n_max = 8;
  std::vector<FockBranch> branches;
  double truncation_loss = 0.0;  // weight chopped by the Fock cutoff
};

FockRegister vacuum_register(int n_max);
double register_weight(const FockRegister& reg);
void normalize_register(FockRegister& reg);

// exp[(xi/2) a^+2] (normalized afterwards by the caller via
// normalize_register; pair amplitude ratio <2|..|0> = xi/sqrt(2)).
void apply_squeezer(FockRegister& reg, int mode, double xi);

// Unitary displacement exp[alpha a^+ - alpha a] (alpha real).
void apply_displacement(FockRegister& reg, int mode, double alpha);

// exp[mu a^+ b^+] two-mode pair source (normalize afterwards).
void apply_pair_source(FockRegister& reg, int mode_a, int mode_b, double mu);

// Passive two-mode mixing: creation operators map a_i^+ -> sum_j U_ji a_j^+.
void apply_beamsplitter(FockRegister& reg, int mode_a, int mode_b,
                        const Eigen::Matrix2cd& u);

// Half-wave plate at `angle` between fast axis and H.
Eigen::Matrix2cd hwp_unitary(double angle);

// Photon loss with the given intensity transmission; lost photons are
// counted into the chosen record field.
void apply_loss(FockRegister& reg, int mode, double transmission,
                int BranchRecord::*counter);

struct EventClass {
  std::string label;
  std::string monomial;   // leading-order parameter dependence
  double analytic = 0.0;  // closed-form probability (0 when not modeled)
  double simulated = 0.0; // conditional weight from the register
};

struct SourceOutput {
  BlockDensityMatrix rho;        // sectors (2,1), (1,3), (0,2)
  double success_probability = 0.0;
  std::vector<EventClass> ledger;
  double truncation_loss = 0.0;
};

SourceOutput run_pipeline(const SourceParams& p);

// (1-eps) on the spin-2 block, eps spread as identity/3 over the three
// spin-1 copies.  Requires a 4-photon block structure.
BlockDensityMatrix leakage_channel(const BlockDensityMatrix& rho, double epsilon);

}  // namespace polspin
