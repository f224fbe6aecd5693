#pragma once

// Independent reference computations used only by the tests. None of these
// call into the eigensolver or the code path they are compared against.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <algorithm>
#include <vector>

#include "qdisc/ensemble.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/measurement.hpp"

namespace qdisc::oracle {

// Rank by Gaussian elimination with partial pivoting.
inline std::size_t rank(std::vector<std::vector<Complex>> a, double tol = 1e-9) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    if (std::abs(a[piv][c]) <= tol) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const Complex f = a[i][c] / a[r][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

// Gram matrix G_ab = <v_a, v_b>.
inline std::vector<std::vector<Complex>> gram(const std::vector<std::vector<Complex>>& vs) {
  std::vector<std::vector<Complex>> g(vs.size(), std::vector<Complex>(vs.size()));
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = 0; b < vs.size(); ++b)
      for (std::size_t k = 0; k < vs[a].size(); ++k) g[a][b] += std::conj(vs[a][k]) * vs[b][k];
  return g;
}

// Eigenvalues of a 2x2 Hermitian matrix [[a, b], [conj(b), c]], descending.
inline std::pair<double, double> eig2(double a, Complex b, double c) {
  const double mean = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
  return {mean + rad, mean - rad};
}

// max { sum w_k S_k : 0 <= S_k <= 1, sum S_k <= budget } by enumerating every
// basic feasible solution: all S_k at a bound, or the budget row active with
// exactly one free coordinate.
inline double lp_by_vertices(const std::vector<double>& w, double budget) {
  const std::size_t n = w.size();
  double best = -1.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double used = 0.0, value = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask >> k & 1) {
        used += 1.0;
        value += w[k];
      }
    if (used <= budget + 1e-12) best = std::max(best, value);
    for (std::size_t f = 0; f < n; ++f) {
      if (mask >> f & 1) continue;
      const double s = budget - used;
      if (s >= -1e-12 && s <= 1.0 + 1e-12) best = std::max(best, value + s * w[f]);
    }
  }
  return best;
}

// Success probability by summing Born probabilities outcome by outcome: the
// effect of outcome j is F_j = V^H |j><j| V and Pr[j | rho] = Tr(rho F_j).
inline double success_by_outcomes(const Ensemble& e, const ModelMeasurement& m) {
  const std::size_t d = e.dimension;
  double total = 0.0;
  for (std::size_t j = 0; j < m.outcomes(); ++j) {
    std::vector<std::vector<Complex>> f(d, std::vector<Complex>(d));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) f[a][b] = std::conj(m.isometry(j, a)) * m.isometry(j, b);
    const Message& msg = e.messages[m.decision[j]];
    Complex tr = 0.0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) tr += msg.state(a, b) * f[b][a];
    total += msg.prior * tr.real();
  }
  return total;
}

// Random Hermitian matrix with i.i.d. Gaussian entries.
template <typename Rng>
HermitianMatrix random_hermitian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
  return HermitianMatrix::hermitian_part(m);
}

}  // namespace qdisc::oracle
