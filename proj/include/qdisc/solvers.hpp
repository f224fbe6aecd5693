#pragma once

// Numerical estimates of the true discrimination optimum: Helstrom's binary
// formula, the pretty-good measurement, an iterative optimal-POVM search and
// a projective grid search for qubits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/measurement.hpp"

namespace qdisc {

struct SolverConfig {
  double tol = 1e-10;  // stop once one iteration gains less than this
  std::size_t max_iters = 20000;
  std::uint64_t seed = 0;
  std::size_t restarts = 3;  // extra starts beyond the PGM
  bool record_history = false;
};

struct SolverResult {
  double success = 0.0;
  Povm measurement;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;  // success gain of the final iteration
  // Objective of the dual-feasible point built from the final POVM; the true
  // optimum lies in [success, dual_bound].
  double dual_bound = 0.0;
  std::vector<double> history;  // success per iterate of the winning start
};

inline double helstrom(const Ensemble& e) {
  if (e.size() != 2) {
    throw PreconditionError("helstrom needs exactly two messages, got " + std::to_string(e.size()));
  }
  const HermitianMatrix diff =
      e.messages[0].prior * e.messages[0].state - e.messages[1].prior * e.messages[1].state;
  return 0.5 * (1.0 + trace_norm(diff));
}

namespace detail {

// rho^{-1/2} w_i rho_i rho^{-1/2} with rho = sum w_i rho_i; the kernel of rho
// goes to message 0.
inline Povm weighted_pgm(const Ensemble& e, const std::vector<double>& weights) {
  const std::size_t d = e.dimension;
  HermitianMatrix avg = HermitianMatrix::zero(d);
  for (std::size_t i = 0; i < e.size(); ++i) avg += weights[i] * e.messages[i].state;
  const EigDecomposition eig = eigh(avg);
  const double cutoff = 1e-12 * std::max(1.0, eig.eigenvalues.front());
  const HermitianMatrix root =
      spectral_map(eig, [cutoff](double l) { return l > cutoff ? 1.0 / std::sqrt(l) : 0.0; });
  Povm p;
  p.elements.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    p.elements.push_back(
        HermitianMatrix::hermitian_part(root.matrix() * (weights[i] * e.messages[i].state).matrix() *
                                        root.matrix()));
  }
  p.elements[0] += kernel_projector(eig, cutoff);
  return p;
}

// E_i <- G^{-1/2} clip(E_i) G^{-1/2}, G = sum_i clip(E_i); restores
// positivity and completeness.
inline Povm renormalize(std::vector<HermitianMatrix> elems) {
  const std::size_t d = elems.front().dim();
  HermitianMatrix g = HermitianMatrix::zero(d);
  for (HermitianMatrix& x : elems) {
    x = clip_negative(x);
    g += x;
  }
  const EigDecomposition eig = eigh(g);
  const double cutoff = 1e-14 * std::max(1.0, eig.eigenvalues.front());
  const HermitianMatrix root =
      spectral_map(eig, [cutoff](double l) { return l > cutoff ? 1.0 / std::sqrt(l) : 0.0; });
  Povm p;
  for (const HermitianMatrix& x : elems)
    p.elements.push_back(
        HermitianMatrix::hermitian_part(root.matrix() * x.matrix() * root.matrix()));
  p.elements[0] += kernel_projector(eig, cutoff);
  return p;
}

// One fixed-point step: X_i = p_i rho_i E_i p_i rho_i, Gamma = (sum X_i)^{1/2},
// E_i <- Gamma^+ X_i Gamma^+.
inline Povm fixed_point_step(const Ensemble& e, const Povm& current) {
  const std::size_t d = e.dimension;
  std::vector<HermitianMatrix> x;
  x.reserve(e.size());
  HermitianMatrix sum = HermitianMatrix::zero(d);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const ComplexMatrix w = (e.messages[i].prior * e.messages[i].state).matrix();
    x.push_back(HermitianMatrix::hermitian_part(w * current.elements[i].matrix() * w));
    sum += x.back();
  }
  const EigDecomposition eig = eigh(sum);
  const double cutoff = 1e-14 * std::max(1e-300, eig.eigenvalues.front());
  const HermitianMatrix inv_root =
      spectral_map(eig, [cutoff](double l) { return l > cutoff ? 1.0 / std::sqrt(l) : 0.0; });
  std::vector<HermitianMatrix> next;
  next.reserve(e.size());
  for (const HermitianMatrix& xi : x)
    next.push_back(
        HermitianMatrix::hermitian_part(inv_root.matrix() * xi.matrix() * inv_root.matrix()));
  return renormalize(std::move(next));
}

// Tr(Y) + d * max(0, max_i lambda_max(p_i rho_i - Y)) with
// Y = Herm(sum_i p_i rho_i E_i). Y + t I dominates every p_i rho_i, so this is
// a valid upper bound on the optimum for any POVM.
inline double dual_objective(const Ensemble& e, const Povm& p) {
  ComplexMatrix y(e.dimension, e.dimension);
  for (std::size_t i = 0; i < e.size(); ++i)
    y += (e.messages[i].prior * e.messages[i].state).matrix() * p.elements[i].matrix();
  const HermitianMatrix yh = HermitianMatrix::hermitian_part(y);
  double shift = 0.0;
  for (const Message& m : e.messages)
    shift = std::max(shift, max_eigenvalue(m.prior * m.state - yh));
  return yh.trace() + double(e.dimension) * shift;
}

struct Run {
  Povm povm;
  double success = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> history;
};

inline Run iterate_from(const Ensemble& e, Povm start, const SolverConfig& cfg) {
  Run run;
  run.povm = std::move(start);
  run.success = success_probability_povm(e, run.povm);
  if (cfg.record_history) run.history.push_back(run.success);
  while (run.iterations < cfg.max_iters) {
    Povm next = fixed_point_step(e, run.povm);
    const double s = success_probability_povm(e, next);
    ++run.iterations;
    const double gain = s - run.success;
    if (gain < 0.0) {
      // Rounding-level decrease: the iterate has reached a fixed point.
      run.converged = true;
      run.residual = 0.0;
      break;
    }
    run.povm = std::move(next);
    run.success = s;
    run.residual = gain;
    if (cfg.record_history) run.history.push_back(s);
    if (gain < cfg.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace detail

inline Povm pgm(const Ensemble& e) {
  require_valid(e);
  return detail::weighted_pgm(e, e.priors());
}

// Fixed-point ascent on the POVM set, started from the PGM and from
// `restarts` PGMs built with randomly reweighted priors. Every start is
// derived from the ensemble itself, so the search commutes with a change of
// basis. The best start is reported.
inline SolverResult optimize_povm(const Ensemble& e, const SolverConfig& cfg = {}) {
  require_valid(e);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> log_weight(-2.0, 2.0);

  detail::Run best = detail::iterate_from(e, detail::weighted_pgm(e, e.priors()), cfg);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    std::vector<double> w = e.priors();
    for (double& x : w) x *= std::exp(log_weight(rng));
    detail::Run run = detail::iterate_from(e, detail::weighted_pgm(e, w), cfg);
    if (run.success > best.success) best = std::move(run);
  }

  SolverResult out;
  out.success = best.success;
  out.iterations = best.iterations;
  out.converged = best.converged;
  out.residual = best.residual;
  out.dual_bound = detail::dual_objective(e, best.povm);
  out.history = std::move(best.history);
  out.measurement = std::move(best.povm);
  return out;
}

// Best projective qubit measurement {|n><n|, |-n><-n|} over a grid of Bloch
// directions (polar angle in [0, pi], azimuth in [0, 2 pi)) and over every
// assignment of the two outcomes to messages.
inline double brute_force_qubit(const Ensemble& e, std::size_t grid) {
  require_valid(e);
  const Ensemble c = compress(e).ensemble;
  if (c.dimension > 2) {
    throw PreconditionError("brute_force_qubit needs joint support dimension <= 2, got " +
                            std::to_string(c.dimension));
  }
  if (grid < 2) throw PreconditionError("brute_force_qubit needs grid >= 2");
  double best = 0.0;
  for (const Message& m : c.messages) best = std::max(best, m.prior);
  if (c.dimension == 1) return best;

  // p_i <n|rho_i|n> = p_i (1 + r_i . n) / 2 with Bloch vector r_i.
  struct Weighted {
    double p, x, y, z;
  };
  std::vector<Weighted> w;
  for (const Message& m : c.messages) {
    const auto& r = m.state;
    w.push_back({m.prior, 2.0 * r(0, 1).real(), -2.0 * r(0, 1).imag(),
                 (r(0, 0) - r(1, 1)).real()});
  }
  const double pi = std::numbers::pi;
  for (std::size_t a = 0; a < grid; ++a) {
    const double theta = pi * double(a) / double(grid - 1);
    const double st = std::sin(theta), ct = std::cos(theta);
    for (std::size_t b = 0; b < grid; ++b) {
      const double phi = 2.0 * pi * double(b) / double(grid);
      const double nx = st * std::cos(phi), ny = st * std::sin(phi), nz = ct;
      double up = 0.0, down = 0.0;
      for (const Weighted& q : w) {
        const double dot = q.x * nx + q.y * ny + q.z * nz;
        up = std::max(up, 0.5 * q.p * (1.0 + dot));
        down = std::max(down, 0.5 * q.p * (1.0 - dot));
      }
      best = std::max(best, up + down);
    }
  }
  return best;
}

}  // namespace qdisc
