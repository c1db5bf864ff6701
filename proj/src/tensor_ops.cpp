#include "polspin/tensor_ops.hpp"

#include <array>
#include <cmath>

#include "polspin/errors.hpp"

namespace polspin {

namespace {

// ln(n!) table; plenty for the sector sizes used here.
double ln_factorial(int n) {
  static const auto table = [] {
    std::array<double, 171> t{};
    t[0] = 0.0;
    for (int i = 1; i < int(t.size()); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  return table[n];
}

}  // namespace

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m) {
  if (two_m1 + two_m2 != two_m) return 0.0;
  if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
  if ((two_j1 + two_j2 + two_j) % 2 != 0) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 || std::abs(two_m) > two_j)
    return 0.0;
  if ((two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0) return 0.0;

  // Racah's closed form; factorial arguments are integers by the parity
  // checks above (all in halved units).
  auto f = [](int two_n) { return ln_factorial(two_n / 2); };
  const double ln_delta = f(two_j1 + two_j2 - two_j) + f(two_j1 - two_j2 + two_j) +
                          f(-two_j1 + two_j2 + two_j) - f(two_j1 + two_j2 + two_j + 2);
  const double ln_pref =
      0.5 * (std::log(double(two_j + 1)) + ln_delta + f(two_j1 + two_m1) +
             f(two_j1 - two_m1) + f(two_j2 + two_m2) + f(two_j2 - two_m2) +
             f(two_j + two_m) + f(two_j - two_m));

  double sum = 0.0;
  for (int two_t = 0;; two_t += 2) {
    const int a = two_j1 + two_j2 - two_j - two_t;
    const int b = two_j1 - two_m1 - two_t;
    const int c = two_j2 + two_m2 - two_t;
    const int d = two_j - two_j2 + two_m1 + two_t;
    const int e = two_j - two_j1 - two_m2 + two_t;
    if (a < 0 || b < 0 || c < 0) break;
    if (d < 0 || e < 0) continue;
    const double ln_term = f(two_t) + f(a) + f(b) + f(c) + f(d) + f(e);
    const double sgn = (two_t / 2) % 2 == 0 ? 1.0 : -1.0;
    sum += sgn * std::exp(ln_pref - ln_term);
  }
  return sum;
}

std::vector<std::vector<MatXc>> tensor_operator_basis(int two_j) {
  if (two_j < 0) throw ValidationError("tensor_operator_basis: two_j must be >= 0");
  const int d = dim_of_two_j(two_j);
  std::vector<std::vector<MatXc>> ops;
  for (int k = 0; k <= two_j; ++k) {
    std::vector<MatXc> row;
    for (int q = -k; q <= k; ++q) {
      MatXc t = MatXc::Zero(d, d);
      const double scale = std::sqrt(double(2 * k + 1) / double(two_j + 1));
      for (int ip = 0; ip < d; ++ip) {    // row: m' = j - ip
        for (int i = 0; i < d; ++i) {     // col: m  = j - i
          const int two_mp = two_j - 2 * ip;
          const int two_m = two_j - 2 * i;
          t(ip, i) = scale * clebsch_gordan(two_j, two_m, 2 * k, 2 * q, two_j, two_mp);
        }
      }
      row.push_back(std::move(t));
    }
    ops.push_back(std::move(row));
  }
  return ops;
}

}  // namespace polspin
