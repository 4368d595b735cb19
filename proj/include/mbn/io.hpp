#pragma once

#include "mbn/catalog.hpp"
#include "mbn/dynamics.hpp"
#include "mbn/tomography.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>
#include <string>

namespace mbn::io {

/// 12 significant digits, shortest representation.
inline std::string format_number(double v) { return fmt::format("{:.12g}", v); }

struct StateFile {
  DensityMatrix rho;
  Bipartition bip;
};

/// {"dim": d, "bipartition": [N, M], "matrix": [[[re, im], ...], ...]}
inline nlohmann::json state_to_json(const DensityMatrix& rho, const Bipartition& bip) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < rho.matrix().cols(); ++j) {
      const Complex v = rho.matrix()(i, j);
      row.push_back({v.real(), v.imag()});
    }
    rows.push_back(std::move(row));
  }
  return {{"dim", rho.dim()}, {"bipartition", {bip.dim_a(), bip.dim_b()}}, {"matrix", std::move(rows)}};
}

/// Parses a state document. Schema problems raise ErrorCode::parse; physical
/// validation failures keep their own codes.
inline StateFile state_from_json(const nlohmann::json& doc, StateMode mode = StateMode::strict) {
  auto fail = [](const std::string& why) -> Error { return Error(ErrorCode::parse, "state file: " + why); };
  if (!doc.is_object()) throw fail("top level must be an object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw fail("'dim' must be an integer");
  if (!doc.contains("bipartition") || !doc["bipartition"].is_array() || doc["bipartition"].size() != 2 ||
      !doc["bipartition"][0].is_number_integer() || !doc["bipartition"][1].is_number_integer()) {
    throw fail("'bipartition' must be [N, M]");
  }
  if (!doc.contains("matrix") || !doc["matrix"].is_array()) throw fail("'matrix' must be an array of rows");
  const int dim = doc["dim"].get<int>();
  const auto& rows = doc["matrix"];
  if (dim < 1 || rows.size() != static_cast<std::size_t>(dim)) throw fail("'matrix' must have 'dim' rows");
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) throw fail("every row must have 'dim' entries");
    for (int j = 0; j < dim; ++j) {
      const auto& e = row[static_cast<std::size_t>(j)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw fail("entries must be [re, im] number pairs");
      }
      m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  Bipartition bip(doc["bipartition"][0].get<int>(), doc["bipartition"][1].get<int>());
  bip.require_matches(dim);
  return {DensityMatrix(std::move(m), mode), bip};
}

inline StateFile read_state(std::istream& in, StateMode mode = StateMode::strict) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed JSON: ") + e.what());
  }
  return state_from_json(doc, mode);
}

inline void write_state(std::ostream& out, const DensityMatrix& rho, const Bipartition& bip) {
  out << state_to_json(rho, bip).dump(2) << '\n';
}

/// Header `<axis>,<measure1>,...`, one row per sample.
inline void write_csv(std::ostream& out, const TimeSeries& ts) {
  out << ts.axis();
  for (const auto& c : ts.columns()) out << ',' << c.first;
  out << '\n';
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << format_number(ts.times()[i]);
    for (const auto& c : ts.columns()) out << ',' << format_number(c.second[i]);
    out << '\n';
  }
}

/// `trial,measure,E_true,E_expt,delta`.
inline void write_csv(std::ostream& out, const TomoResult& r) {
  out << "trial,measure,E_true,E_expt,delta\n";
  for (const auto& rec : r.records) {
    out << rec.trial << ',' << rec.measure << ',' << format_number(rec.e_true) << ','
        << format_number(rec.e_expt) << ',' << format_number(rec.delta) << '\n';
  }
}

/// `bin_lo,bin_hi,count`.
inline void write_csv(std::ostream& out, std::span<const HistogramBin> bins) {
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << format_number(b.lo) << ',' << format_number(b.hi) << ',' << b.count << '\n';
}

}  // namespace mbn::io
