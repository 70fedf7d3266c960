#include "spherefold/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spherefold::io {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_coords(std::ostream& os, const UnitVector& x) {
  for (int k = 0; k < x.dim(); ++k) os << format_real(x[k]) << ',';
}

void write_coord_header(std::ostream& os, int dim) {
  for (int k = 1; k <= dim; ++k) os << 'x' << k << ',';
}

}  // namespace

Json to_json(const DirectionSet& g) {
  Json rows = Json::array();
  for (const auto& u : g.directions()) {
    Json row = Json::array();
    for (int k = 0; k < u.dim(); ++k) row.push_back(u[k]);
    rows.push_back(std::move(row));
  }
  return rows;
}

DirectionSet direction_set_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw PreconditionError("direction set: expected a non-empty array of arrays");
  std::vector<UnitVector> dirs;
  for (const auto& row : j) {
    if (!row.is_array()) throw PreconditionError("direction set: every row must be an array");
    std::vector<double> c;
    for (const auto& v : row) {
      if (!v.is_number()) throw PreconditionError("direction set: coordinates must be numbers");
      c.push_back(v.get<double>());
    }
    dirs.emplace_back(std::span<const double>(c));
  }
  return DirectionSet(std::move(dirs));
}

Json to_json(const FoldWord& w) {
  Json j;
  j["set_ref"] = w.set_ref;
  j["indices"] = w.indices;
  return j;
}

FoldWord fold_word_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("indices")) throw PreconditionError("fold word: expected {set_ref, indices}");
  FoldWord w;
  if (j.contains("set_ref")) w.set_ref = j.at("set_ref").get<std::string>();
  for (const auto& v : j.at("indices")) {
    if (!v.is_number_unsigned()) throw PreconditionError("fold word: indices must be non-negative integers");
    w.indices.push_back(v.get<std::size_t>());
  }
  return w;
}

Json to_json(const EvennessReport& r) {
  Json j;
  j["is_even"] = r.is_even;
  j["max_deviation"] = r.max_deviation;
  Json v = Json::array();
  for (int k = 0; k < r.argmax.dim(); ++k) v.push_back(r.argmax[k]);
  j["argmax"] = std::move(v);
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["c1"]["satisfied"] = r.c1.satisfied;
  if (r.c1.witness) {
    Json v = Json::array();
    for (int k = 0; k < r.c1.witness->dim(); ++k) v.push_back((*r.c1.witness)[k]);
    j["c1"]["witness"] = std::move(v);
  }
  j["c2"]["spans"] = r.c2.spans;
  j["c2"]["orthogonal_split"] = r.c2.orthogonal_split;
  Json pairs = Json::array();
  for (const auto& p : r.c2.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"angle", p.angle}, {"commensurable", p.commensurable}});
  }
  j["c2"]["pairs"] = std::move(pairs);
  j["c2"]["verdict"] = to_string(r.c2.verdict);
  return j;
}

void write_certificate_header(std::ostream& os) { os << "epsilon,N,worst_gap,grid,pass\n"; }

void write_certificate_row(std::ostream& os, const DensityCertificate& c) {
  os << format_real(c.epsilon.radians) << ',' << c.length << ',' << format_real(c.worst_gap.radians) << ','
     << c.test_grid_size << ',' << (c.pass ? "true" : "false") << '\n';
}

void write_histogram_csv(std::ostream& os, const OccupationHistogram& h, const CellPartition& p) {
  if (h.frequencies.size() != p.size()) throw PreconditionError("histogram csv: size mismatch");
  os << "cell_index,";
  write_coord_header(os, p.dim());
  os << "area,count,frequency\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << i << ',';
    write_coords(os, p[i].center);
    os << format_real(p[i].area) << ',' << (i < h.counts.size() ? h.counts[i] : 0) << ','
       << format_real(h.frequencies[i]) << '\n';
  }
}

void write_grid_function_csv(std::ostream& os, const GridFunction& f) {
  write_coord_header(os, f.dim());
  os << "value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    write_coords(os, f.grid().node(i));
    os << format_real(f[i]) << '\n';
  }
}

void write_particle_measure_csv(std::ostream& os, const ParticleMeasure& nu) {
  write_coord_header(os, nu.dim());
  os << "weight\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    write_coords(os, nu.point(i));
    os << format_real(nu.weights()[i]) << '\n';
  }
}

void write_range_history_csv(std::ostream& os, const std::vector<double>& history) {
  os << "n,range\n";
  for (std::size_t n = 0; n < history.size(); ++n) os << n << ',' << format_real(history[n]) << '\n';
}

void write_coefficients_csv(std::ostream& os, const HarmonicCoefficients& c) {
  os << "degree,order,value\n";
  for (std::size_t l = 0; l < c.coeffs.size(); ++l) {
    const auto& row = c.coeffs[l];
    for (std::size_t j = 0; j < row.size(); ++j) {
      const long order = c.dim == 3 ? static_cast<long>(j) - static_cast<long>(l) : static_cast<long>(j);
      os << l << ',' << order << ',' << format_real(row[j]) << '\n';
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path);
  out << content;
}

}  // namespace spherefold::io
