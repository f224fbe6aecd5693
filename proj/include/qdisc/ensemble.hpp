#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

struct Message {
  double prior = 0.0;
  HermitianMatrix state;
  // Set when the state was given as a ket; the serializer then writes it back
  // in the "pure" form.
  std::optional<std::vector<Complex>> ket;
};

// Priors with density matrices on a common d-dimensional space. Holding an
// Ensemble does not imply it is valid; see validate().
struct Ensemble {
  std::size_t dimension = 0;
  std::vector<Message> messages;

  std::size_t size() const noexcept { return messages.size(); }

  std::vector<double> priors() const {
    std::vector<double> p;
    p.reserve(messages.size());
    for (const Message& m : messages) p.push_back(m.prior);
    return p;
  }

  void add_pure(double prior, std::vector<Complex> ket) {
    HermitianMatrix rho = HermitianMatrix::outer(ket);
    messages.push_back({prior, std::move(rho), std::move(ket)});
  }

  void add_mixed(double prior, HermitianMatrix state) {
    messages.push_back({prior, std::move(state), std::nullopt});
  }
};

struct Violation {
  std::string what;
  double slack = 0.0;  // measured distance from the admissible region
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }

  std::string summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) os << "; ";
      os << violations[i].what << " (slack " << violations[i].slack << ")";
    }
    return os.str();
  }
};

inline ValidationReport validate(const Ensemble& e) {
  ValidationReport report;
  const double tol = kTolerances.validation;
  if (e.dimension < 1) report.violations.push_back({"dimension must be at least 1", 1.0});
  if (e.messages.empty()) report.violations.push_back({"ensemble has no messages", 1.0});

  double prior_sum = 0.0;
  for (std::size_t i = 0; i < e.messages.size(); ++i) {
    const Message& msg = e.messages[i];
    const std::string tag = "message " + std::to_string(i) + ": ";
    if (!std::isfinite(msg.prior) || msg.prior < 0.0) {
      report.violations.push_back({tag + "negative prior " + std::to_string(msg.prior),
                                   std::isfinite(msg.prior) ? -msg.prior : 1.0});
    }
    prior_sum += msg.prior;
    if (msg.state.dim() != e.dimension) {
      report.violations.push_back(
          {tag + "state dimension " + std::to_string(msg.state.dim()) + " != " +
               std::to_string(e.dimension),
           std::abs(double(msg.state.dim()) - double(e.dimension))});
      continue;
    }
    const double tr = msg.state.trace();
    if (std::abs(tr - 1.0) > tol) {
      report.violations.push_back({tag + "trace " + std::to_string(tr), std::abs(tr - 1.0)});
    }
    const double lmin = min_eigenvalue(msg.state);
    if (lmin < -tol) {
      report.violations.push_back(
          {tag + "state not PSD, min eigenvalue " + std::to_string(lmin), -lmin});
    }
  }
  if (std::abs(prior_sum - 1.0) > tol) {
    report.violations.push_back(
        {"prior sum " + std::to_string(prior_sum), std::abs(prior_sum - 1.0)});
  }
  return report;
}

inline void require_valid(const Ensemble& e) {
  const ValidationReport r = validate(e);
  if (!r.ok()) throw ValidationError("invalid ensemble: " + r.summary());
}

inline HermitianMatrix state_sum(const Ensemble& e) {
  HermitianMatrix total = HermitianMatrix::zero(e.dimension);
  for (const Message& m : e.messages) total += m.state;
  return total;
}

// Rank of sum_i rho_i with eigenvalues below the support cutoff counted as zero.
inline std::size_t joint_support_dimension(const Ensemble& e) {
  std::size_t rank = 0;
  for (double l : eigh(state_sum(e)).eigenvalues)
    if (l > kTolerances.support_cutoff) ++rank;
  return rank;
}

struct CompressedEnsemble {
  Ensemble ensemble;
  ComplexMatrix isometry;  // d x d', columns span the joint support
};

// Restrict every state to the joint support. States become W^H rho W for the
// returned isometry W; a full-support ensemble is returned unchanged together
// with the identity.
inline CompressedEnsemble compress(const Ensemble& e) {
  const EigDecomposition eig = eigh(state_sum(e));
  std::size_t rank = 0;
  for (double l : eig.eigenvalues)
    if (l > kTolerances.support_cutoff) ++rank;
  if (rank == e.dimension) return {e, ComplexMatrix::identity(e.dimension)};

  ComplexMatrix w(e.dimension, rank);
  for (std::size_t r = 0; r < e.dimension; ++r)
    for (std::size_t c = 0; c < rank; ++c) w(r, c) = eig.eigenvectors(r, c);
  const ComplexMatrix w_adj = w.adjoint();

  Ensemble out;
  out.dimension = rank;
  out.messages.reserve(e.messages.size());
  for (const Message& m : e.messages) out.add_mixed(m.prior, sandwich(w_adj, m.state));
  return {std::move(out), std::move(w)};
}

// Apply A rho A^H to every state; A unitary (conjugation) or an isometry
// (embedding into a larger space).
inline Ensemble transform_states(const Ensemble& e, const ComplexMatrix& a) {
  if (a.cols() != e.dimension) throw PreconditionError("transform dimension mismatch");
  Ensemble out;
  out.dimension = a.rows();
  for (const Message& m : e.messages) out.add_mixed(m.prior, sandwich(a, m.state));
  return out;
}

struct SpectralEntry {
  std::size_t message = 0;
  std::size_t eigen = 0;
  double lambda = 0.0;
  double weighted_lambda = 0.0;
};

// The multiset {p_i * lambda_ik}, ordered by (message, eigen index) with each
// message's eigenvalues descending.
struct WeightedSpectrum {
  std::vector<SpectralEntry> entries;

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(entries.size());
    for (const SpectralEntry& s : entries) w.push_back(s.weighted_lambda);
    return w;
  }

  std::size_t message_count() const {
    std::size_t m = 0;
    for (const SpectralEntry& s : entries) m = std::max(m, s.message + 1);
    return m;
  }

  double total() const {
    double t = 0.0;
    for (const SpectralEntry& s : entries) t += s.weighted_lambda;
    return t;
  }
};

inline WeightedSpectrum weighted_spectrum(const Ensemble& e) {
  WeightedSpectrum ws;
  ws.entries.reserve(e.size() * e.dimension);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const EigDecomposition eig = eigh(e.messages[i].state);
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
      // Round-off negatives of a PSD state are reported as zero.
      const double lambda = std::max(eig.eigenvalues[k], 0.0);
      ws.entries.push_back({i, k, lambda, e.messages[i].prior * lambda});
    }
  }
  return ws;
}

}  // namespace qdisc
