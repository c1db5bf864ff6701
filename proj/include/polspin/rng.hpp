#pragma once

// Deterministic sampling helpers on top of std::mt19937_64.  The standard
// distribution objects are implementation-defined, so anything that must be
// reproducible bit-for-bit across toolchains draws through these instead.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace polspin {

inline double uniform_double(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline int uniform_int(std::mt19937_64& rng, int n) {
  return int(uniform_double(rng) * n) % n;
}

// Product-of-uniforms Poisson for small means, recursive halving above.
inline long poisson_sample(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 60.0) {
    const long a = poisson_sample(rng, 0.5 * mean);
    const long b = poisson_sample(rng, mean - 0.5 * mean);
    return a + b;
  }
  const double limit = std::exp(-mean);
  long k = 0;
  double prod = uniform_double(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform_double(rng);
  }
  return k;
}

// n independent draws from the categorical distribution p (need not be
// normalized); returns per-category counts.
inline std::vector<long> multinomial_sample(std::mt19937_64& rng,
                                            const std::vector<double>& p, long n) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += (p[i] > 0.0 ? p[i] : 0.0);
    cdf[i] = acc;
  }
  std::vector<long> counts(p.size(), 0);
  for (long e = 0; e < n; ++e) {
    const double u = uniform_double(rng) * acc;
    size_t lo = 0, hi = p.size() - 1;
    while (lo < hi) {
      const size_t mid = (lo + hi) / 2;
      if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    ++counts[lo];
  }
  return counts;
}

}  // namespace polspin
