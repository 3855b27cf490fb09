#pragma once

#include <vector>

namespace skyrlab {

// Eigendecomposition of a dense real symmetric matrix.
// values are ascending; vectors[k*n .. k*n+n-1] is the unit eigenvector
// belonging to values[k].
struct EigenResult {
  std::vector<double> values;
  std::vector<double> vectors;
  int n = 0;
};

// Householder tridiagonalization followed by implicit-shift QL iteration.
// Converges to machine precision (off-diagonals below eps * spectral scale);
// throws NoConvergence after 50 sweeps on one eigenvalue, which for a
// symmetric matrix does not happen in finite arithmetic.
// a is row-major n*n and is left untouched.
EigenResult eigen_sym(const std::vector<double>& a, int n);

}  // namespace skyrlab
