#pragma once

// Measurements as an isometry V (q x d, V^H V = I) followed by a standard
// basis readout and a deterministic decision rule g, together with the POVM
// view and the budget certificate {S_ik} behind the spectral bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

// Decision entries are zero-based message indices in memory; the JSON form
// is one-based.
struct ModelMeasurement {
  ComplexMatrix isometry;
  std::vector<std::size_t> decision;

  std::size_t outcomes() const noexcept { return isometry.rows(); }
  std::size_t dimension() const noexcept { return isometry.cols(); }
};

struct Povm {
  std::vector<HermitianMatrix> elements;

  std::size_t dimension() const { return elements.empty() ? 0 : elements.front().dim(); }
};

inline ValidationReport validate(const ModelMeasurement& m, std::size_t message_count) {
  ValidationReport r;
  if (m.decision.size() != m.outcomes()) {
    r.violations.push_back({"decision rule length " + std::to_string(m.decision.size()) +
                                " != outcome count " + std::to_string(m.outcomes()),
                            1.0});
  }
  for (std::size_t j = 0; j < m.decision.size(); ++j) {
    if (m.decision[j] >= message_count) {
      r.violations.push_back({"outcome " + std::to_string(j) + " decides for message " +
                                  std::to_string(m.decision[j]) + " of " +
                                  std::to_string(message_count),
                              1.0});
    }
  }
  const double defect = orthonormality_defect(m.isometry);
  if (defect > kTolerances.validation) {
    r.violations.push_back({"isometry columns are not orthonormal", defect});
  }
  return r;
}

inline ValidationReport validate(const Povm& p) {
  ValidationReport r;
  if (p.elements.empty()) {
    r.violations.push_back({"POVM has no elements", 1.0});
    return r;
  }
  const std::size_t d = p.dimension();
  HermitianMatrix total = HermitianMatrix::zero(d);
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    if (p.elements[i].dim() != d) {
      r.violations.push_back({"element " + std::to_string(i) + " has wrong dimension", 1.0});
      return r;
    }
    const double lmin = min_eigenvalue(p.elements[i]);
    if (lmin < -kTolerances.validation) {
      r.violations.push_back({"element " + std::to_string(i) + " not PSD", -lmin});
    }
    total += p.elements[i];
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      worst = std::max(worst, std::abs(total(j, k) - Complex(j == k ? 1.0 : 0.0)));
  if (worst > kTolerances.validation) {
    r.violations.push_back({"elements do not sum to identity", worst});
  }
  return r;
}

namespace detail {

inline void require_compatible(const Ensemble& e, const ModelMeasurement& m) {
  if (m.dimension() != e.dimension) {
    throw PreconditionError("dimension mismatch: measurement acts on " +
                            std::to_string(m.dimension()) + " dimensions, ensemble has " +
                            std::to_string(e.dimension));
  }
  if (m.decision.size() != m.outcomes()) {
    throw PreconditionError("decision rule length does not match outcome count");
  }
  for (std::size_t g : m.decision) {
    if (g >= e.size()) {
      throw PreconditionError("decision rule names message " + std::to_string(g) +
                              " but the ensemble has " + std::to_string(e.size()));
    }
  }
}

// <row| rho |row>^* style quadratic form: sum_ab r_a rho_ab conj(r_b).
inline double row_expectation(std::span<const Complex> row, const HermitianMatrix& rho) {
  Complex acc = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] == Complex(0.0)) continue;
    Complex inner = 0.0;
    for (std::size_t b = 0; b < row.size(); ++b) inner += rho(a, b) * std::conj(row[b]);
    acc += row[a] * inner;
  }
  return acc.real();
}

}  // namespace detail

// sum_j p_{g(j)} <j| V rho_{g(j)} V^H |j>
inline double success_probability(const Ensemble& e, const ModelMeasurement& m) {
  detail::require_compatible(e, m);
  double p = 0.0;
  for (std::size_t j = 0; j < m.outcomes(); ++j) {
    const Message& msg = e.messages[m.decision[j]];
    p += msg.prior * detail::row_expectation(m.isometry.row(j), msg.state);
  }
  return p;
}

inline double success_probability_povm(const Ensemble& e, const Povm& p) {
  if (p.elements.size() != e.size()) {
    throw PreconditionError("POVM has " + std::to_string(p.elements.size()) +
                            " elements for " + std::to_string(e.size()) + " messages");
  }
  if (p.dimension() != e.dimension) {
    throw PreconditionError("dimension mismatch: POVM acts on " + std::to_string(p.dimension()) +
                            " dimensions, ensemble has " + std::to_string(e.dimension));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    s += e.messages[i].prior * trace_product(e.messages[i].state, p.elements[i]);
  return s;
}

// Dilation: element E_i = sum_k mu_k v_k v_k^H contributes rows sqrt(mu_k) v_k^H,
// all decided for message i. Eigenvalues at or below the POVM rank cutoff are
// dropped.
inline ModelMeasurement model_from_povm(const Povm& p) {
  const ValidationReport r = validate(p);
  if (!r.ok()) throw ValidationError("invalid POVM: " + r.summary());

  const std::size_t d = p.dimension();
  std::vector<std::vector<Complex>> rows;
  std::vector<std::size_t> decision;
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    const EigDecomposition eig = eigh(p.elements[i]);
    for (std::size_t k = 0; k < d; ++k) {
      const double mu = eig.eigenvalues[k];
      if (mu <= kTolerances.povm_rank) continue;
      std::vector<Complex> row(d);
      const double s = std::sqrt(mu);
      for (std::size_t c = 0; c < d; ++c) row[c] = s * std::conj(eig.eigenvectors(c, k));
      rows.push_back(std::move(row));
      decision.push_back(i);
    }
  }
  ComplexMatrix v(rows.size(), d);
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t c = 0; c < d; ++c) v(j, c) = rows[j][c];
  return {std::move(v), std::move(decision)};
}

// E_i = sum_{j in g^{-1}(i)} V^H |j><j| V
inline Povm povm_from_model(const ModelMeasurement& m, std::size_t message_count) {
  const std::size_t d = m.dimension();
  std::vector<ComplexMatrix> acc(message_count, ComplexMatrix(d, d));
  for (std::size_t j = 0; j < m.outcomes(); ++j) {
    if (m.decision[j] >= message_count) throw PreconditionError("decision index out of range");
    const auto row = m.isometry.row(j);
    ComplexMatrix& e = acc[m.decision[j]];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) e(a, b) += std::conj(row[a]) * row[b];
  }
  Povm p;
  for (const ComplexMatrix& e : acc) p.elements.push_back(HermitianMatrix::hermitian_part(e));
  return p;
}

// |<j|V u>|^2 for the in-scope outcomes j in g^{-1}(i); this is ||v_jk||^2,
// the squared projection of row <j|V onto span(u).
struct RowProjection {
  std::size_t outcome = 0;
  double norm_sq = 0.0;
};

struct Budget {
  std::size_t message = 0;
  std::size_t eigen = 0;
  double lambda = 0.0;
  double weighted_lambda = 0.0;
  double s_value = 0.0;  // zero, and exempt from the <= 1 check, when lambda is absent
  std::vector<RowProjection> projections;
};

struct LpCertificate {
  std::vector<Budget> budgets;
  std::size_t dimension = 0;
  double total = 0.0;               // sum of s_value
  double reproduced_success = 0.0;  // sum of weighted_lambda * s_value
  double direct_success = 0.0;      // success_probability of the same pair

  double worst_lower_slack() const {
    double w = 0.0;
    for (const Budget& b : budgets) w = std::min(w, b.s_value);
    return w;
  }
  double worst_upper_excess() const {
    double w = 0.0;
    for (const Budget& b : budgets) w = std::max(w, b.s_value - 1.0);
    return w;
  }
  bool bounded(double tol = 1e-10) const {
    return worst_lower_slack() >= -tol && worst_upper_excess() <= tol;
  }
  bool within_budget(double tol = 1e-9) const { return total <= double(dimension) + tol; }
  bool identity_holds(double tol = 1e-10) const {
    return std::abs(reproduced_success - direct_success) <= tol;
  }
};

// Factor rho_i = psi_i psi_i^H with psi_i = U diag(sqrt(lambda)); then
// S_ik = sum_{j in g^{-1}(i)} |<j|V psi_i|k>|^2 / lambda_ik = sum_j |<j|V u_k>|^2.
inline LpCertificate extract_certificate(const Ensemble& e, const ModelMeasurement& m) {
  detail::require_compatible(e, m);
  const std::size_t d = e.dimension;

  std::vector<std::vector<std::size_t>> preimage(e.size());
  for (std::size_t j = 0; j < m.outcomes(); ++j) preimage[m.decision[j]].push_back(j);

  LpCertificate cert;
  cert.dimension = d;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const EigDecomposition eig = eigh(e.messages[i].state);
    for (std::size_t k = 0; k < d; ++k) {
      Budget b;
      b.message = i;
      b.eigen = k;
      b.lambda = std::max(eig.eigenvalues[k], 0.0);
      b.weighted_lambda = e.messages[i].prior * b.lambda;
      if (b.lambda > kTolerances.zero_eigenvalue) {
        for (std::size_t j : preimage[i]) {
          const auto row = m.isometry.row(j);
          Complex amp = 0.0;
          for (std::size_t c = 0; c < d; ++c) amp += row[c] * eig.eigenvectors(c, k);
          const double n2 = std::norm(amp);
          b.projections.push_back({j, n2});
          b.s_value += n2;
        }
      }
      cert.total += b.s_value;
      cert.reproduced_success += b.weighted_lambda * b.s_value;
      cert.budgets.push_back(std::move(b));
    }
  }
  cert.direct_success = success_probability(e, m);
  return cert;
}

}  // namespace qdisc
