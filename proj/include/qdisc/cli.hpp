#pragma once

// Command-line front end. run_cli() takes explicit streams so the commands
// can be driven in-process by tests.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qdisc/bounds.hpp"
#include "qdisc/constructions.hpp"
#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/io.hpp"
#include "qdisc/measurement.hpp"
#include "qdisc/random.hpp"
#include "qdisc/solvers.hpp"

namespace qdisc::cli {

enum class Format { table, json, csv };

struct SweepConfig {
  std::size_t count = 100;
  std::size_t dim = 2;
  std::size_t messages = 3;
  std::uint64_t seed = 0;
  bool pure = false;
};

struct RunConfig {
  Format format = Format::table;
  bool compress = true;
  std::string input;
  std::string measurement_path;
  std::string output;
  std::string method = "fixed-point";
  std::size_t grid = 400;
  SolverConfig solver;
  SweepConfig sweep;
};

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string sig17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

struct Working {
  Ensemble ensemble;
  ComplexMatrix isometry;  // ambient x working; identity when not compressed
};

inline Working load(const RunConfig& cfg) {
  Ensemble e = io::read_ensemble(cfg.input);
  if (!cfg.compress) {
    const std::size_t d = e.dimension;
    return {std::move(e), ComplexMatrix::identity(d)};
  }
  CompressedEnsemble c = compress(e);
  return {std::move(c.ensemble), std::move(c.isometry)};
}

// Rows of (key, value) rendered in the chosen format.
using Record = std::vector<std::pair<std::string, std::string>>;

inline void render(const Record& table_rows, const Record& machine_rows, const io::Json& json,
                   Format format, std::ostream& out) {
  switch (format) {
    case Format::table: {
      std::size_t width = 0;
      for (const auto& [k, v] : table_rows) width = std::max(width, k.size());
      for (const auto& [k, v] : table_rows)
        out << k << std::string(width - k.size() + 2, ' ') << v << "\n";
      break;
    }
    case Format::json:
      out << json.dump(2) << "\n";
      break;
    case Format::csv: {
      for (std::size_t i = 0; i < machine_rows.size(); ++i)
        out << (i ? "," : "") << machine_rows[i].first;
      out << "\n";
      for (std::size_t i = 0; i < machine_rows.size(); ++i)
        out << (i ? "," : "") << machine_rows[i].second;
      out << "\n";
      break;
    }
  }
}

}  // namespace detail

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const detail::Working w = detail::load(cfg);
  const BoundReport r = compute_bounds(w.ensemble, BoundOptions{false});
  const std::string pure6 = r.pure_bound ? fixed6(*r.pure_bound) : "n/a";
  const std::string pure17 = r.pure_bound ? sig17(*r.pure_bound) : "";
  detail::render({{"effective_dimension", std::to_string(r.effective_dimension)},
                  {"classical_top_d", fixed6(r.classical_top_d)},
                  {"dimension_ceiling", fixed6(r.dimension_ceiling)},
                  {"spectral_bound", fixed6(r.spectral_bound)},
                  {"pure_bound", pure6}},
                 {{"effective_dimension", std::to_string(r.effective_dimension)},
                  {"classical_top_d", sig17(r.classical_top_d)},
                  {"dimension_ceiling", sig17(r.dimension_ceiling)},
                  {"spectral_bound", sig17(r.spectral_bound)},
                  {"pure_bound", pure17}},
                 io::to_json(r), cfg.format, out);
  return 0;
}

// Lift a POVM on the working space back to the ambient space; the orthogonal
// complement of the support is assigned to message 0.
inline Povm lift_povm(const Povm& p, const ComplexMatrix& w) {
  if (w.rows() == w.cols()) {
    Povm same;
    for (const HermitianMatrix& e : p.elements) same.elements.push_back(sandwich(w, e));
    return same;
  }
  Povm lifted;
  HermitianMatrix complement = HermitianMatrix::identity(w.rows());
  complement -= HermitianMatrix::hermitian_part(w * w.adjoint());
  for (const HermitianMatrix& e : p.elements) lifted.elements.push_back(sandwich(w, e));
  lifted.elements[0] += complement;
  return lifted;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const detail::Working w = detail::load(cfg);
  const Ensemble& e = w.ensemble;
  SolverResult result;
  if (cfg.method == "fixed-point") {
    result = optimize_povm(e, cfg.solver);
  } else if (cfg.method == "pgm") {
    result.measurement = pgm(e);
    result.success = success_probability_povm(e, result.measurement);
    result.converged = true;
  } else if (cfg.method == "helstrom") {
    result.success = helstrom(e);
    result.converged = true;
  } else if (cfg.method == "brute") {
    result.success = brute_force_qubit(e, cfg.grid);
    result.converged = true;
    result.iterations = cfg.grid * cfg.grid;
  } else {
    throw PreconditionError("unknown method " + cfg.method);
  }
  const double bound = spectral_bound(e, BoundOptions{false});
  const double gap = bound - result.success;

  if (!cfg.output.empty()) {
    if (result.measurement.elements.empty()) {
      throw PreconditionError("method " + cfg.method + " does not produce a measurement");
    }
    io::write_text(cfg.output, io::dump(io::to_json(lift_povm(result.measurement, w.isometry))));
  }

  io::Json j = {{"method", cfg.method},
                {"success", result.success},
                {"spectral_bound", bound},
                {"gap", gap},
                {"iterations", result.iterations},
                {"converged", result.converged},
                {"residual", result.residual}};
  if (cfg.method == "fixed-point") j["dual_bound"] = result.dual_bound;
  detail::render({{"method", cfg.method},
                  {"success", fixed6(result.success)},
                  {"spectral_bound", fixed6(bound)},
                  {"gap", fixed6(gap)},
                  {"iterations", std::to_string(result.iterations)},
                  {"converged", result.converged ? "yes" : "no"},
                  {"residual", sig17(result.residual)}},
                 {{"method", cfg.method},
                  {"success", sig17(result.success)},
                  {"spectral_bound", sig17(bound)},
                  {"gap", sig17(gap)},
                  {"iterations", std::to_string(result.iterations)},
                  {"converged", result.converged ? "true" : "false"},
                  {"residual", sig17(result.residual)}},
                 j, cfg.format, out);
  return 0;
}

inline int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  const detail::Working w = detail::load(cfg);
  const io::MeasurementFile file = io::read_measurement(cfg.measurement_path);
  ModelMeasurement m = file.model ? *file.model : model_from_povm(*file.povm);
  if (m.dimension() != w.isometry.rows()) {
    throw PreconditionError("dimension mismatch: measurement acts on " +
                            std::to_string(m.dimension()) + " dimensions, ensemble has " +
                            std::to_string(w.isometry.rows()));
  }
  m.isometry = m.isometry * w.isometry;
  const LpCertificate c = extract_certificate(w.ensemble, m);
  const bool pass = c.bounded() && c.within_budget() && c.identity_holds();

  if (cfg.format == Format::json) {
    io::Json j = io::to_json(c);
    j["pass"] = pass;
    out << j.dump(2) << "\n";
    return pass ? 0 : 5;
  }
  if (cfg.format == Format::csv) {
    out << "message,eigen,lambda,weighted_lambda,s\n";
    for (const Budget& b : c.budgets)
      out << b.message + 1 << "," << b.eigen + 1 << "," << sig17(b.lambda) << ","
          << sig17(b.weighted_lambda) << "," << sig17(b.s_value) << "\n";
    return pass ? 0 : 5;
  }
  out << "message  eigen  lambda    weighted  S\n";
  for (const Budget& b : c.budgets) {
    out << b.message + 1 << "        " << b.eigen + 1 << "      " << fixed6(b.lambda) << "  "
        << fixed6(b.weighted_lambda) << "  " << fixed6(b.s_value) << "\n";
  }
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  out << "0 <= S <= 1           " << verdict(c.bounded()) << "  (min " << fixed6(c.worst_lower_slack())
      << ", max excess " << sig17(c.worst_upper_excess()) << ")\n";
  out << "sum S <= d            " << verdict(c.within_budget()) << "  (" << fixed6(c.total)
      << " <= " << c.dimension << ")\n";
  out << "sum lambda' S = P     " << verdict(c.identity_holds()) << "  ("
      << fixed6(c.reproduced_success) << " vs " << fixed6(c.direct_success) << ")\n";
  out << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 5;
}

struct ConstructConfig {
  std::string kind;  // pure | mixed
  std::vector<double> priors;
  std::string spectrum_path;
  std::size_t dim = 0;
  std::string ensemble_out;
  std::string measurement_out;
};

inline int cmd_construct(const RunConfig& cfg, const ConstructConfig& cc, std::ostream& out) {
  TightInstance t;
  if (cc.kind == "pure") {
    t = pure_tight(cc.priors, cc.dim);
  } else {
    t = mixed_tight(io::read_spectrum(cc.spectrum_path), cc.dim);
  }
  const double achieved = success_probability(t.ensemble, t.measurement);
  const double bound = spectral_bound(t.ensemble);
  if (!cc.ensemble_out.empty()) io::write_ensemble(t.ensemble, cc.ensemble_out);
  if (!cc.measurement_out.empty())
    io::write_text(cc.measurement_out, io::dump(io::to_json(t.measurement)));

  io::Json j = {{"claimed_value", t.claimed_value},
                {"achieved", achieved},
                {"spectral_bound", bound}};
  if (cc.ensemble_out.empty()) j["ensemble"] = io::to_json(t.ensemble);
  if (cc.measurement_out.empty()) j["measurement"] = io::to_json(t.measurement);
  detail::render({{"claimed_value", fixed6(t.claimed_value)},
                  {"achieved", fixed6(achieved)},
                  {"spectral_bound", fixed6(bound)}},
                 {{"claimed_value", sig17(t.claimed_value)},
                  {"achieved", sig17(achieved)},
                  {"spectral_bound", sig17(bound)}},
                 j, cfg.format, out);
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const SweepConfig& s = cfg.sweep;
  if (s.count < 1 || s.dim < 1 || s.messages < 1) {
    throw PreconditionError("sweep parameters must be positive");
  }
  std::ostringstream csv;
  csv << "seed,d,m,spectral_bound,ceiling,pgm,fixed_point,gap,top_d_priors,helstrom\n";
  for (std::size_t row = 0; row < s.count; ++row) {
    const std::uint64_t seed = derive_seed(s.seed, row);
    Rng rng(seed);
    Ensemble e = random_ensemble(s.dim, s.messages, s.pure ? StateKind::pure : StateKind::mixed, rng);
    if (cfg.compress) e = compress(e).ensemble;
    const BoundOptions as_is{false};
    const double bound = spectral_bound(e, as_is);
    const double ceiling = dimension_ceiling(e, as_is);
    const double pgm_success = success_probability_povm(e, pgm(e));
    SolverConfig sc = cfg.solver;
    sc.seed = seed;
    const double fixed_point = optimize_povm(e, sc).success;
    const double top = classical_top_d(e.priors(), e.dimension);
    csv << seed << "," << e.dimension << "," << e.size() << "," << sig17(bound) << ","
        << sig17(ceiling) << "," << sig17(pgm_success) << "," << sig17(fixed_point) << ","
        << sig17(bound - fixed_point) << "," << sig17(top) << ","
        << (e.size() == 2 ? sig17(helstrom(e)) : std::string()) << "\n";
  }
  if (cfg.output.empty()) {
    out << csv.str();
  } else {
    io::write_text(cfg.output, csv.str());
  }
  return 0;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Top-d bounds for minimum-error quantum state discrimination", "qdisc"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string format = "table";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  bool no_compress = false;
  app.add_flag("--no-compress", no_compress, "Keep the ambient dimension instead of the joint support");

  auto* bounds = app.add_subcommand("bounds", "Print every closed-form bound for an ensemble");
  bounds->add_option("file", cfg.input, "Ensemble JSON")->required();

  auto* solve = app.add_subcommand("solve", "Estimate the optimal success probability");
  solve->add_option("file", cfg.input, "Ensemble JSON")->required();
  solve->add_option("--method", cfg.method, "fixed-point | pgm | helstrom | brute")
      ->check(CLI::IsMember({"fixed-point", "pgm", "helstrom", "brute"}));
  solve->add_option("--tol", cfg.solver.tol, "Stop when one iteration gains less than this")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", cfg.solver.max_iters)->check(CLI::PositiveNumber);
  solve->add_option("--seed", cfg.solver.seed);
  solve->add_option("--restarts", cfg.solver.restarts);
  solve->add_option("--grid", cfg.grid, "Grid size for --method brute")->check(CLI::PositiveNumber);
  solve->add_option("--emit-measurement", cfg.output, "Write the POVM found as JSON");

  auto* certify = app.add_subcommand("certify", "Extract and check the budget certificate");
  certify->add_option("ensemble", cfg.input, "Ensemble JSON")->required();
  certify->add_option("measurement", cfg.measurement_path, "Measurement JSON")->required();

  ConstructConfig cc;
  auto* construct = app.add_subcommand("construct", "Emit an instance attaining the bound");
  construct->require_subcommand(1);
  auto* cpure = construct->add_subcommand("pure", "Orthogonal encoding of the d most likely messages");
  cpure->add_option("--priors", cc.priors, "Comma separated priors")->delimiter(',')->required();
  auto* cmixed = construct->add_subcommand("mixed", "Diagonal encoding of a weighted spectrum");
  cmixed->add_option("--spectrum", cc.spectrum_path, "Spectrum JSON")->required();
  for (CLI::App* sub : {cpure, cmixed}) {
    sub->add_option("--dim", cc.dim, "Dimension d")->required()->check(CLI::PositiveNumber);
    sub->add_option("--ensemble-out", cc.ensemble_out);
    sub->add_option("--measurement-out", cc.measurement_out);
  }

  auto* sweep = app.add_subcommand("sweep", "Random ensembles to CSV");
  sweep->add_option("--count", cfg.sweep.count)->check(CLI::PositiveNumber);
  sweep->add_option("--dim", cfg.sweep.dim)->check(CLI::PositiveNumber);
  sweep->add_option("--messages", cfg.sweep.messages)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", cfg.sweep.seed);
  sweep->add_flag("--pure", cfg.sweep.pure, "Draw pure states instead of full-rank mixed states");
  sweep->add_option("--out", cfg.output, "CSV path (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  cfg.format = format == "json" ? Format::json : format == "csv" ? Format::csv : Format::table;
  cfg.compress = !no_compress;

  try {
    if (*bounds) return cmd_bounds(cfg, out);
    if (*solve) return cmd_solve(cfg, out);
    if (*certify) return cmd_certify(cfg, out);
    if (*construct) {
      cc.kind = *cpure ? "pure" : "mixed";
      return cmd_construct(cfg, cc, out);
    }
    if (*sweep) return cmd_sweep(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return 0;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace qdisc::cli
