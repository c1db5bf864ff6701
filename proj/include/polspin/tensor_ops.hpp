#pragma once

// Clebsch-Gordan coefficients and orthonormal irreducible tensor operators
//   T_kq = sqrt((2k+1)/(2j+1)) sum_{m,m'} <j m; k q | j m'> |j m'><j m|,
// normalized so tr(T_kq^+ T_k'q') = delta_kk' delta_qq'.

#include <vector>

#include "polspin/types.hpp"

namespace polspin {

// <j1 m1; j2 m2 | j m>, all arguments doubled (two_x = 2x).
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m);

// [k][k+q] -> T_kq on the two_j sector (m-descending row/column order),
// k = 0 .. two_j, q = -k .. k.
std::vector<std::vector<MatXc>> tensor_operator_basis(int two_j);

}  // namespace polspin
