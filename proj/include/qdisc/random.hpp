#pragma once

// Seeded generators for random unitaries, states, ensembles and measurements.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qdisc/ensemble.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/measurement.hpp"

namespace qdisc {

using Rng = std::mt19937_64;

// splitmix64; derives independent per-instance seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g(r, c) = Complex(n(rng), n(rng));
  return g;
}

// Q factor of a complex Gaussian matrix with R's diagonal made positive,
// which is Haar distributed. Modified Gram-Schmidt produces that R directly.
// Returns the first `cols` columns (an isometry when cols < rows).
inline ComplexMatrix haar_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix q = gaussian_matrix(rows, cols, rng);
  for (std::size_t k = 0; k < cols; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex dot = 0.0;
      for (std::size_t r = 0; r < rows; ++r) dot += std::conj(q(r, j)) * q(r, k);
      for (std::size_t r = 0; r < rows; ++r) q(r, k) -= dot * q(r, j);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += std::norm(q(r, k));
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < rows; ++r) q(r, k) /= norm;
  }
  return q;
}

inline ComplexMatrix haar_unitary(std::size_t n, Rng& rng) { return haar_isometry(n, n, rng); }

// Flat Dirichlet sample of length n.
inline std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = ex(rng));
  for (double& x : p) x /= s;
  return p;
}

inline std::vector<Complex> random_ket(std::size_t d, Rng& rng) {
  return haar_isometry(d, 1, rng).column(0);
}

// U diag(spectrum) U^H with Haar U; `rank` nonzero eigenvalues.
inline HermitianMatrix random_density(std::size_t d, std::size_t rank, Rng& rng) {
  std::vector<double> spectrum(d, 0.0);
  const std::vector<double> head = random_distribution(rank, rng);
  for (std::size_t k = 0; k < rank && k < d; ++k) spectrum[k] = head[k];
  return sandwich(haar_unitary(d, rng), HermitianMatrix::diagonal(spectrum));
}

enum class StateKind { pure, mixed };

inline Ensemble random_ensemble(std::size_t d, std::size_t m, StateKind kind, Rng& rng) {
  Ensemble e;
  e.dimension = d;
  const std::vector<double> priors = random_distribution(m, rng);
  for (std::size_t i = 0; i < m; ++i) {
    if (kind == StateKind::pure) {
      e.add_pure(priors[i], random_ket(d, rng));
    } else {
      e.add_mixed(priors[i], random_density(d, d, rng));
    }
  }
  return e;
}

// Random q x d isometry (q >= d) with a uniformly random decision rule.
inline ModelMeasurement random_model(std::size_t d, std::size_t q, std::size_t m, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  ModelMeasurement mm;
  mm.isometry = haar_isometry(q, d, rng);
  mm.decision.resize(q);
  for (std::size_t& g : mm.decision) g = pick(rng);
  return mm;
}

// n-outcome POVM: G^{-1/2} A_i G^{-1/2} for random PSD A_i of full rank.
inline Povm random_povm(std::size_t d, std::size_t n, Rng& rng) {
  std::vector<HermitianMatrix> a;
  HermitianMatrix g = HermitianMatrix::zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix x = gaussian_matrix(d, d, rng);
    a.push_back(HermitianMatrix::hermitian_part(x * x.adjoint()));
    g += a.back();
  }
  const HermitianMatrix root = sqrt_pinv(g, 1e-14);
  Povm p;
  for (const HermitianMatrix& ai : a)
    p.elements.push_back(sandwich(root.matrix(), ai));
  return p;
}

}  // namespace qdisc
