#pragma once

// Collective polarization tomography of the heralded 4-photon state: photon
// counting in rotated polarization bases with the two extreme outcomes
// censored, maximum-likelihood reconstruction over the tied sector structure,
// z-phase alignment and Monte-Carlo error bars.

#include <cstdint>
#include <vector>

#include "polspin/spin_core.hpp"
#include "polspin/types.hpp"

namespace polspin {

struct BasisSetting {
  Vec3 axis = Vec3(0, 0, 1);  // unit measurement axis
};

// z axis plus 12 axes on a spherical-Fibonacci shell of the upper
// hemisphere; minimum pairwise axis angle exceeds 20 degrees.
std::vector<BasisSetting> default_bases();

// p(k), k = 0..4 photons in the +axis port.
std::vector<double> outcome_probabilities(const BlockDensityMatrix& rho,
                                          const BasisSetting& b);

struct CountRecord {
  int basis_index = 0;
  int outcome = 0;  // photons in the + port; only 1..3 are kept
  long count = 0;
};

// Events split evenly across bases (remainder to the first ones); outcomes
// 0 and 4 are censored from the record.
std::vector<CountRecord> simulate_counts(const BlockDensityMatrix& rho,
                                         const std::vector<BasisSetting>& bases,
                                         long total_events, std::uint64_t seed);

struct MleOptions {
  double tol = 1e-10;       // log-likelihood change at convergence
  long max_iterations = 100000;
};

struct MonteCarloErrors {
  int n_resamples = 0;
  int n_failures = 0;
  std::vector<MatX> std_real, std_imag;  // per sector, aligned entries
  double fidelity_std = 0.0;
  double sqcrb_std = 0.0;
  double symmetric_population_std = 0.0;
};

struct ReconstructionResult {
  BlockDensityMatrix rho;
  double log_likelihood = 0.0;
  long iterations = 0;
  bool converged = false;
  double phi = 0.0;  // z-phase aligning rho to the ideal tetrahedron
  MonteCarloErrors mc;
};

// Censored-likelihood MLE: multinomial over the 39 kept bins plus the
// detected-fraction normalization term.  Monotone diluted fixed-point
// iteration; throws ConvergenceError at the iteration cap.
ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& counts,
                                     const std::vector<BasisSetting>& bases,
                                     const MleOptions& opts = {});

// Phase of the z-rotation maximizing fidelity with `target`; ties are broken
// toward the smallest |phi|, result in (-pi, pi].
double align_phase(const BlockDensityMatrix& rho, const PureSpinState& target);

// Poisson resampling of the counts, one MLE per resample, entrywise and
// derived-scalar standard deviations.  Resample i uses seed + i.
MonteCarloErrors monte_carlo_errors(const std::vector<CountRecord>& counts,
                                    const std::vector<BasisSetting>& bases,
                                    int n_resamples, std::uint64_t seed,
                                    const MleOptions& opts = {});

}  // namespace polspin
