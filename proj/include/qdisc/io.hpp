#pragma once

// JSON forms of ensembles, measurements and spectra. Complex scalars are
// [re, im] pairs and matrices are row-major arrays of rows.

#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdisc/bounds.hpp"
#include "qdisc/ensemble.hpp"
#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/measurement.hpp"

namespace qdisc::io {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw SchemaError(where + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

inline Complex complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(where + ": expected [re, im]");
  return {number(j[0], where), number(j[1], where)};
}

inline std::vector<Complex> vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of [re, im]");
  std::vector<Complex> v;
  v.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k)
    v.push_back(complex(j[k], where + "[" + std::to_string(k) + "]"));
  return v;
}

inline ComplexMatrix matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty matrix");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  std::vector<Complex> entries;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::vector<Complex> row = vector(j[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != cols || cols == 0) throw SchemaError(where + ": ragged matrix rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(j.size(), cols, std::move(entries));
}

inline HermitianMatrix square(const Json& j, std::size_t dim, const std::string& where) {
  ComplexMatrix m = matrix(j, where);
  if (m.rows() != dim || m.cols() != dim) {
    throw SchemaError(where + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                      " matrix");
  }
  return HermitianMatrix(std::move(m));
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(std::span<const Complex> v) {
  Json a = Json::array();
  for (Complex z : v) a.push_back(to_json(z));
  return a;
}

inline Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(to_json(m.row(r)));
  return rows;
}

inline Json parse_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(where + ": malformed JSON: " + e.what());
  }
}

}  // namespace detail

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("error writing " + path);
}

// Numbers are written as the shortest decimal that parses back to the same
// double (at most 17 significant digits), so write after read is a fixpoint.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Schema errors are reported for structural problems; the ensemble
// invariants are checked afterwards and raise ValidationError.
inline Ensemble ensemble_from_json(const Json& j) {
  const std::string where = "ensemble";
  Ensemble e;
  e.dimension = detail::count(detail::field(j, "dimension", where), where + ".dimension");
  const Json& msgs = detail::field(j, "messages", where);
  if (!msgs.is_array() || msgs.empty()) throw SchemaError(where + ".messages: expected a non-empty array");
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const std::string at = where + ".messages[" + std::to_string(i) + "]";
    const double prior = detail::number(detail::field(msgs[i], "prior", at), at + ".prior");
    const Json& state = detail::field(msgs[i], "state", at);
    const Json& kind = detail::field(state, "kind", at + ".state");
    if (kind == "pure") {
      std::vector<Complex> ket = detail::vector(detail::field(state, "vector", at), at + ".vector");
      if (ket.size() != e.dimension) {
        throw SchemaError(at + ".vector: length " + std::to_string(ket.size()) +
                          " does not match dimension " + std::to_string(e.dimension));
      }
      e.add_pure(prior, std::move(ket));
    } else if (kind == "mixed") {
      e.add_mixed(prior, detail::square(detail::field(state, "matrix", at), e.dimension,
                                        at + ".matrix"));
    } else {
      throw SchemaError(at + ".state.kind: expected \"pure\" or \"mixed\"");
    }
  }
  require_valid(e);
  return e;
}

inline Json to_json(const Ensemble& e) {
  Json msgs = Json::array();
  for (const Message& m : e.messages) {
    Json state;
    if (m.ket) {
      state = {{"kind", "pure"}, {"vector", detail::to_json(std::span<const Complex>(*m.ket))}};
    } else {
      state = {{"kind", "mixed"}, {"matrix", detail::to_json(m.state.matrix())}};
    }
    msgs.push_back({{"prior", m.prior}, {"state", std::move(state)}});
  }
  return {{"dimension", e.dimension}, {"messages", std::move(msgs)}};
}

inline Ensemble parse_ensemble(const std::string& text) {
  return ensemble_from_json(detail::parse_text(text, "ensemble"));
}

inline Ensemble read_ensemble(const std::string& path) { return parse_ensemble(read_text(path)); }

inline void write_ensemble(const Ensemble& e, const std::string& path) {
  write_text(path, dump(to_json(e)));
}

// A measurement file holds either an isometry model or a POVM.
struct MeasurementFile {
  std::optional<ModelMeasurement> model;
  std::optional<Povm> povm;
};

inline Json to_json(const ModelMeasurement& m) {
  Json decision = Json::array();
  for (std::size_t g : m.decision) decision.push_back(g + 1);
  return {{"kind", "model"}, {"isometry", detail::to_json(m.isometry)}, {"decision", decision}};
}

inline Json to_json(const Povm& p) {
  Json elems = Json::array();
  for (const HermitianMatrix& e : p.elements) elems.push_back(detail::to_json(e.matrix()));
  return {{"kind", "povm"}, {"elements", std::move(elems)}};
}

inline MeasurementFile measurement_from_json(const Json& j) {
  const std::string where = "measurement";
  const Json& kind = detail::field(j, "kind", where);
  MeasurementFile out;
  if (kind == "model") {
    ModelMeasurement m;
    m.isometry = detail::matrix(detail::field(j, "isometry", where), where + ".isometry");
    const Json& dec = detail::field(j, "decision", where);
    if (!dec.is_array()) throw SchemaError(where + ".decision: expected an array");
    for (std::size_t k = 0; k < dec.size(); ++k) {
      const std::size_t g = detail::count(dec[k], where + ".decision");
      if (g < 1) throw SchemaError(where + ".decision: message indices are 1-based");
      m.decision.push_back(g - 1);
    }
    if (m.decision.size() != m.isometry.rows()) {
      throw SchemaError(where + ".decision: length does not match isometry rows");
    }
    const double defect = orthonormality_defect(m.isometry);
    if (defect > kTolerances.validation) {
      throw ValidationError(where + ": isometry columns are not orthonormal (defect " +
                            std::to_string(defect) + ")");
    }
    out.model = std::move(m);
  } else if (kind == "povm") {
    const Json& elems = detail::field(j, "elements", where);
    if (!elems.is_array() || elems.empty()) throw SchemaError(where + ".elements: expected a non-empty array");
    Povm p;
    const std::size_t d = elems[0].is_array() ? elems[0].size() : 0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      p.elements.push_back(
          detail::square(elems[i], d, where + ".elements[" + std::to_string(i) + "]"));
    const ValidationReport r = validate(p);
    if (!r.ok()) throw ValidationError("invalid POVM: " + r.summary());
    out.povm = std::move(p);
  } else {
    throw SchemaError(where + ".kind: expected \"model\" or \"povm\"");
  }
  return out;
}

inline MeasurementFile read_measurement(const std::string& path) {
  return measurement_from_json(detail::parse_text(read_text(path), "measurement"));
}

// Spectrum file: {"messages": [{"prior": p, "eigenvalues": [l_1, ...]}, ...]}
inline WeightedSpectrum spectrum_from_json(const Json& j) {
  const std::string where = "spectrum";
  const Json& msgs = detail::field(j, "messages", where);
  if (!msgs.is_array() || msgs.empty()) throw SchemaError(where + ".messages: expected a non-empty array");
  WeightedSpectrum s;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const std::string at = where + ".messages[" + std::to_string(i) + "]";
    const double prior = detail::number(detail::field(msgs[i], "prior", at), at + ".prior");
    const Json& eig = detail::field(msgs[i], "eigenvalues", at);
    if (!eig.is_array() || eig.empty()) throw SchemaError(at + ".eigenvalues: expected a non-empty array");
    for (std::size_t k = 0; k < eig.size(); ++k) {
      const double l = detail::number(eig[k], at + ".eigenvalues");
      s.entries.push_back({i, k, l, prior * l});
    }
  }
  return s;
}

inline WeightedSpectrum read_spectrum(const std::string& path) {
  return spectrum_from_json(detail::parse_text(read_text(path), "spectrum"));
}

inline Json to_json(const WeightedSpectrum& s) {
  Json msgs = Json::array();
  std::vector<double> prior(s.message_count(), 0.0);
  for (const SpectralEntry& e : s.entries) prior[e.message] += e.weighted_lambda;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    Json eig = Json::array();
    for (const SpectralEntry& e : s.entries)
      if (e.message == i) eig.push_back(e.lambda);
    msgs.push_back({{"prior", prior[i]}, {"eigenvalues", std::move(eig)}});
  }
  return {{"messages", std::move(msgs)}};
}

inline Json to_json(const BoundReport& r) {
  return {{"classical_top_d", r.classical_top_d},
          {"dimension_ceiling", r.dimension_ceiling},
          {"spectral_bound", r.spectral_bound},
          {"pure_bound", r.pure_bound ? Json(*r.pure_bound) : Json(nullptr)},
          {"effective_dimension", r.effective_dimension}};
}

inline BoundReport bound_report_from_json(const Json& j) {
  const std::string where = "bounds";
  BoundReport r;
  r.classical_top_d = detail::number(detail::field(j, "classical_top_d", where), where);
  r.dimension_ceiling = detail::number(detail::field(j, "dimension_ceiling", where), where);
  r.spectral_bound = detail::number(detail::field(j, "spectral_bound", where), where);
  const Json& pb = detail::field(j, "pure_bound", where);
  if (!pb.is_null()) r.pure_bound = detail::number(pb, where);
  r.effective_dimension = detail::count(detail::field(j, "effective_dimension", where), where);
  return r;
}

inline Json to_json(const LpCertificate& c) {
  Json budgets = Json::array();
  for (const Budget& b : c.budgets) {
    Json proj = Json::array();
    for (const RowProjection& p : b.projections)
      proj.push_back({{"outcome", p.outcome + 1}, {"norm_sq", p.norm_sq}});
    budgets.push_back({{"message", b.message + 1},
                       {"eigen", b.eigen + 1},
                       {"lambda", b.lambda},
                       {"weighted_lambda", b.weighted_lambda},
                       {"s", b.s_value},
                       {"projections", std::move(proj)}});
  }
  return {{"budgets", std::move(budgets)},
          {"dimension", c.dimension},
          {"total", c.total},
          {"reproduced_success", c.reproduced_success},
          {"direct_success", c.direct_success},
          {"bounded", c.bounded()},
          {"within_budget", c.within_budget()},
          {"identity_holds", c.identity_holds()}};
}

}  // namespace qdisc::io
