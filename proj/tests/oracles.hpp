#pragma once

// Test-only reference computations, deliberately independent of the library's
// evaluation paths (no determinants, no finite differences).

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Sign of a permutation given as an index vector.
inline int permutation_sign(std::vector<int> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    while (perm[i] != static_cast<int>(i)) {
      std::swap(perm[i], perm[perm[i]]);
      sign = -sign;
    }
  return sign;
}

/// sum over increasing I of c_I * sum_{perm} sgn * prod_t v_{perm(t)}[I_t].
inline double evaluate_by_permutations(const std::vector<std::vector<int>>& indices, const Eigen::VectorXd& coeffs,
                                       const std::vector<Eigen::VectorXd>& vectors) {
  const int k = static_cast<int>(vectors.size());
  double total = 0.0;
  for (std::size_t s = 0; s < indices.size(); ++s) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double alt = 0.0;
    do {
      double prod = permutation_sign(perm);
      for (int t = 0; t < k; ++t) prod *= vectors[perm[t]][indices[s][t]];
      alt += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += coeffs[static_cast<Eigen::Index>(s)] * alt;
  }
  return total;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace oracle
