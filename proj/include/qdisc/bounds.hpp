#pragma once

// Closed-form upper bounds on the optimal one-shot success probability.
//
// Both the pure-state and the mixed-state bound reduce to the same linear
// program: maximize sum_k w_k S_k subject to 0 <= S_k <= 1 and
// sum_k S_k <= d. Its optimum picks the d largest weights.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

struct LpSolution {
  double value = 0.0;
  // Indices with S = 1, largest weight first; ties resolved lowest index first.
  std::vector<std::size_t> selection;
};

inline LpSolution lp_optimum(std::span<const double> weights, std::size_t budget) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) {
      throw PreconditionError("lp_optimum: negative weight at index " + std::to_string(k));
    }
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  order.resize(std::min(budget, order.size()));
  LpSolution out;
  for (std::size_t k : order) out.value += weights[k];
  out.selection = std::move(order);
  return out;
}

inline void require_distribution(std::span<const double> priors) {
  if (priors.empty()) throw PreconditionError("empty prior distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (!(priors[i] >= 0.0)) {
      throw PreconditionError("invalid distribution: prior " + std::to_string(i) +
                              " is negative");
    }
    sum += priors[i];
  }
  if (std::abs(sum - 1.0) > kTolerances.validation) {
    throw PreconditionError("invalid distribution: priors sum to " + std::to_string(sum));
  }
}

inline double classical_top_d(std::span<const double> priors, std::size_t d) {
  require_distribution(priors);
  if (d < 1) throw PreconditionError("classical_top_d: d must be at least 1");
  return lp_optimum(priors, d).value;
}

struct BoundOptions {
  // Work on the joint support (the default) or keep the ambient dimension.
  bool compress = true;
};

namespace detail {

inline Ensemble working_ensemble(const Ensemble& e, const BoundOptions& opt) {
  require_valid(e);
  return opt.compress ? compress(e).ensemble : e;
}

inline std::optional<std::size_t> first_mixed_message(const Ensemble& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    const EigDecomposition eig = eigh(e.messages[i].state);
    if (eig.eigenvalues.size() > 1 && eig.eigenvalues[1] > kTolerances.support_cutoff) return i;
  }
  return std::nullopt;
}

}  // namespace detail

// d * max_i p_i ||rho_i||_inf
inline double dimension_ceiling(const Ensemble& e, const BoundOptions& opt = {}) {
  const Ensemble w = detail::working_ensemble(e, opt);
  double best = 0.0;
  for (const Message& m : w.messages) best = std::max(best, m.prior * max_eigenvalue(m.state));
  return double(w.dimension) * best;
}

inline double spectral_bound(const Ensemble& e, const BoundOptions& opt = {}) {
  const Ensemble w = detail::working_ensemble(e, opt);
  const std::vector<double> weights = weighted_spectrum(w).weights();
  return lp_optimum(weights, w.dimension).value;
}

inline double pure_bound(const Ensemble& e, const BoundOptions& opt = {}) {
  const Ensemble w = detail::working_ensemble(e, opt);
  if (auto i = detail::first_mixed_message(w)) {
    throw PreconditionError("pure_bound: message " + std::to_string(*i) + " is not a pure state");
  }
  return classical_top_d(w.priors(), w.dimension);
}

struct BoundReport {
  double classical_top_d = 0.0;
  double dimension_ceiling = 0.0;
  double spectral_bound = 0.0;
  std::optional<double> pure_bound;  // present iff every state has rank one
  std::size_t effective_dimension = 0;
};

inline BoundReport compute_bounds(const Ensemble& e, const BoundOptions& opt = {}) {
  const Ensemble w = detail::working_ensemble(e, opt);
  const BoundOptions no_recompress{false};
  BoundReport r;
  r.effective_dimension = w.dimension;
  r.classical_top_d = classical_top_d(w.priors(), w.dimension);
  r.dimension_ceiling = dimension_ceiling(w, no_recompress);
  r.spectral_bound = spectral_bound(w, no_recompress);
  if (!detail::first_mixed_message(w)) r.pure_bound = pure_bound(w, no_recompress);
  return r;
}

}  // namespace qdisc
