#pragma once

// Ensembles paired with measurements that meet the top-d bounds with
// equality.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdisc/bounds.hpp"
#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/measurement.hpp"

namespace qdisc {

struct TightInstance {
  Ensemble ensemble;
  ModelMeasurement measurement;
  double claimed_value = 0.0;
};

// The k-th most likely message is encoded as |e_k> for k < d, every other
// message as |e_0>; outcome k is decoded as the k-th most likely message.
inline TightInstance pure_tight(std::span<const double> priors, std::size_t d) {
  require_distribution(priors);
  if (d < 1) throw PreconditionError("pure_tight: d must be at least 1");
  const LpSolution top = lp_optimum(priors, d);

  std::vector<std::size_t> slot(priors.size(), 0);
  for (std::size_t k = 0; k < top.selection.size(); ++k) slot[top.selection[k]] = k;

  TightInstance t;
  t.ensemble.dimension = d;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    std::vector<Complex> ket(d);
    ket[slot[i]] = 1.0;
    t.ensemble.add_pure(priors[i], std::move(ket));
  }
  t.measurement.isometry = ComplexMatrix::identity(d);
  t.measurement.decision.assign(d, top.selection.front());
  for (std::size_t k = 0; k < top.selection.size(); ++k) t.measurement.decision[k] = top.selection[k];
  t.claimed_value = top.value;
  return t;
}

inline ValidationReport validate(const WeightedSpectrum& s, std::size_t d) {
  ValidationReport r;
  const double tol = kTolerances.validation;
  const std::size_t m = s.message_count();
  if (m == 0) {
    r.violations.push_back({"spectrum has no entries", 1.0});
    return r;
  }
  std::vector<double> lambda_sum(m, 0.0), prior(m, 0.0);
  std::vector<std::size_t> entries(m, 0), nonzero(m, 0);
  for (const SpectralEntry& e : s.entries) {
    if (!(e.lambda >= 0.0) || !(e.weighted_lambda >= 0.0)) {
      r.violations.push_back({"negative eigenvalue for message " + std::to_string(e.message),
                              -std::min(e.lambda, e.weighted_lambda)});
    }
    lambda_sum[e.message] += e.lambda;
    prior[e.message] += e.weighted_lambda;
    ++entries[e.message];
    if (e.lambda > kTolerances.zero_eigenvalue) ++nonzero[e.message];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += prior[i];
    const std::string tag = "message " + std::to_string(i) + ": ";
    if (entries[i] == 0) {
      r.violations.push_back({tag + "no spectral entries", 1.0});
      continue;
    }
    if (std::abs(lambda_sum[i] - 1.0) > tol) {
      r.violations.push_back({tag + "eigenvalues sum to " + std::to_string(lambda_sum[i]),
                              std::abs(lambda_sum[i] - 1.0)});
    }
    if (nonzero[i] > d) {
      r.violations.push_back({tag + std::to_string(nonzero[i]) +
                                  " nonzero eigenvalues exceed dimension " + std::to_string(d),
                              double(nonzero[i] - d)});
    }
  }
  for (const SpectralEntry& e : s.entries) {
    const double dev = std::abs(e.weighted_lambda - prior[e.message] * e.lambda);
    if (dev > tol) {
      r.violations.push_back({"message " + std::to_string(e.message) + " eigen " +
                                  std::to_string(e.eigen) +
                                  ": weighted eigenvalue is not prior * eigenvalue",
                              dev});
    }
  }
  if (std::abs(total - 1.0) > tol) {
    r.violations.push_back({"weighted eigenvalues sum to " + std::to_string(total),
                            std::abs(total - 1.0)});
  }
  return r;
}

// The d largest weighted eigenvalues are placed on distinct basis vectors
// |e_k> as eigenvectors of their owning messages. The remaining nonzero
// components of each message fill that message's unused basis vectors in
// index order, so every state is diagonal. Measuring in the standard basis
// and decoding outcome k as the owner of the k-th largest weight attains the
// bound.
inline TightInstance mixed_tight(const WeightedSpectrum& s, std::size_t d) {
  if (d < 1) throw PreconditionError("mixed_tight: d must be at least 1");
  const ValidationReport report = validate(s, d);
  if (!report.ok()) throw ValidationError("inconsistent spectrum: " + report.summary());

  const std::size_t m = s.message_count();
  const std::vector<double> weights = s.weights();
  const LpSolution top = lp_optimum(weights, d);

  std::vector<std::vector<double>> diag(m, std::vector<double>(d, 0.0));
  std::vector<std::vector<bool>> used(m, std::vector<bool>(d, false));
  std::vector<bool> placed(s.entries.size(), false);
  for (std::size_t k = 0; k < top.selection.size(); ++k) {
    const SpectralEntry& e = s.entries[top.selection[k]];
    placed[top.selection[k]] = true;
    if (e.lambda <= kTolerances.zero_eigenvalue) continue;
    diag[e.message][k] = e.lambda;
    used[e.message][k] = true;
  }
  for (std::size_t idx = 0; idx < s.entries.size(); ++idx) {
    const SpectralEntry& e = s.entries[idx];
    if (placed[idx] || e.lambda <= kTolerances.zero_eigenvalue) continue;
    std::size_t slot = 0;
    while (used[e.message][slot]) ++slot;
    diag[e.message][slot] = e.lambda;
    used[e.message][slot] = true;
  }

  std::vector<double> prior(m, 0.0);
  for (const SpectralEntry& e : s.entries) prior[e.message] += e.weighted_lambda;

  TightInstance t;
  t.ensemble.dimension = d;
  for (std::size_t i = 0; i < m; ++i) t.ensemble.add_mixed(prior[i], HermitianMatrix::diagonal(diag[i]));
  t.measurement.isometry = ComplexMatrix::identity(d);
  t.measurement.decision.assign(d, s.entries[top.selection.front()].message);
  for (std::size_t k = 0; k < top.selection.size(); ++k)
    t.measurement.decision[k] = s.entries[top.selection[k]].message;
  t.claimed_value = top.value;
  return t;
}

// Spectrum with one entry per (message, eigenvalue) from explicit lists;
// each message's eigenvalues are taken in the given order.
inline WeightedSpectrum make_spectrum(std::span<const double> priors,
                                      const std::vector<std::vector<double>>& eigenvalues) {
  if (priors.size() != eigenvalues.size()) {
    throw PreconditionError("make_spectrum: prior and eigenvalue list counts differ");
  }
  WeightedSpectrum s;
  for (std::size_t i = 0; i < priors.size(); ++i)
    for (std::size_t k = 0; k < eigenvalues[i].size(); ++k)
      s.entries.push_back({i, k, eigenvalues[i][k], priors[i] * eigenvalues[i][k]});
  return s;
}

}  // namespace qdisc
