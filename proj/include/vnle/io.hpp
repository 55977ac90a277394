#pragma once

// CSV and JSON emitters. CSV uses '.' decimals, 17 significant digits and LF
// line endings so that files round-trip and are byte-stable.

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vnle/circle_graph.hpp"
#include "vnle/decimation.hpp"
#include "vnle/eigenbasis.hpp"
#include "vnle/restriction.hpp"

namespace vnle::io {

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return {buf, end};
}

inline nlohmann::json graph_to_json(const LevelGraph& g) {
  nlohmann::json vertices = nlohmann::json::array();
  nlohmann::json adjacency = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    vertices.push_back({g.vertex(i).first, g.vertex(i).second});
    const auto& s = g.neighbors(i);
    adjacency.push_back({s[0], s[1], s[2], s[3]});
  }
  return {{"level", g.level()}, {"vertices", vertices}, {"adjacency", adjacency}};
}

inline void write_laplacian_csv(std::ostream& os, const LaplacianMatrix& L) {
  os << "row,col,value\n";
  for (const auto& e : L.entries) os << e.row << ',' << e.col << ',' << e.value << '\n';
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "index,value,normalized,multiplicity,birth_level,seed,branch_string\n";
  std::size_t index = 1;
  for (const auto& r : s.records) {
    os << index << ',' << format_double(r.value) << ',' << format_double(r.normalized) << ','
       << r.multiplicity << ',' << r.path.birth_level << ',' << r.path.seed << ",\""
       << r.path.branch_string() << "\"\n";
    index += static_cast<std::size_t>(r.multiplicity);
  }
}

inline nlohmann::json spectrum_to_json(const Spectrum& s) {
  nlohmann::json rows = nlohmann::json::array();
  std::size_t index = 1;
  for (const auto& r : s.records) {
    rows.push_back({{"index", index},
                    {"value", r.value},
                    {"normalized", r.normalized},
                    {"multiplicity", r.multiplicity},
                    {"path", r.path.to_string()}});
    index += static_cast<std::size_t>(r.multiplicity);
  }
  return {{"level", s.level}, {"total_multiplicity", s.total_multiplicity()}, {"records", rows}};
}

/// Side-by-side listing of several levels: row k holds the k-th eigenvalue
/// (with repetition) of every level that has one.
inline void write_spectrum_table_csv(std::ostream& os, const std::vector<Spectrum>& levels, bool normalized) {
  os << "k";
  std::vector<std::vector<double>> cols;
  std::size_t rows = 0;
  for (const auto& s : levels) {
    os << ",level_" << s.level;
    cols.push_back(normalized ? s.normalized_values() : s.values());
    rows = std::max(rows, cols.back().size());
  }
  os << '\n';
  for (std::size_t k = 0; k < rows; ++k) {
    os << k + 1;
    for (const auto& c : cols) {
      os << ',';
      if (k < c.size()) os << format_double(c[k]);
    }
    os << '\n';
  }
}

inline void write_weyl_csv(std::ostream& os, const std::vector<WeylSample>& samples) {
  os << "t,N,W\n";
  for (const auto& w : samples) os << format_double(w.t) << ',' << w.count << ',' << format_double(w.ratio) << '\n';
}

/// One row per vertex: canonical numerator, level, value.
inline void write_eigenfunction_csv(std::ostream& os, const NodeFunction& u, const LevelGraph& g) {
  os << "n,m,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.vertex(i).first << ',' << g.level() << ',' << format_double(u[i]) << '\n';
  }
}

/// One row per circle point n / (2 * 5^m), so both members of every pair
/// appear; ready to plot as a graph over the circle.
inline void write_circle_csv(std::ostream& os, const NodeFunction& u, const LevelGraph& g) {
  os << "n,t,value\n";
  const auto np = g.points();
  for (std::int64_t n = 1; n <= np; ++n) {
    os << n << ',' << format_double(static_cast<double>(n) / static_cast<double>(np)) << ','
       << format_double(u[g.index_of(n)]) << '\n';
  }
}

inline void write_restriction_csv(std::ostream& os, const RestrictionFn& f) {
  os << "k,m,t,f\n";
  const auto n = f.intervals();
  for (std::size_t k = 0; k <= n; ++k) {
    os << k << ',' << f.level << ',' << format_double(static_cast<double>(k) / static_cast<double>(n)) << ','
       << format_double(f[k]) << '\n';
  }
}

struct DerivativeSample {
  std::size_t j = 0;
  Level m = 0;
  double midpoint = 0.0;
  OneSidedDerivatives one_sided;
};

inline nlohmann::json diagnostics_to_json(const LipschitzReport& r, const std::vector<DerivativeSample>& samples) {
  nlohmann::json sup = nlohmann::json::array();
  for (std::size_t i = 0; i < r.sup_difference.size(); ++i) {
    sup.push_back({{"m", r.birth + static_cast<Level>(i)}, {"sup_D", r.sup_difference[i]}});
  }
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.a.size(); ++i) {
    coeffs.push_back({{"m", r.birth + 1 + static_cast<Level>(i)}, {"a_m", r.a[i]}, {"b_m", r.b[i]}});
  }
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& s : samples) {
    ds.push_back({{"j", s.j},
                  {"m", s.m},
                  {"midpoint_t", (static_cast<double>(s.j) + 0.5) / static_cast<double>(pow3(s.m))},
                  {"midpoint", s.midpoint},
                  {"t", static_cast<double>(s.j) / static_cast<double>(pow3(s.m))},
                  {"right", s.one_sided.right},
                  {"left", s.one_sided.left},
                  {"right_minus_left", s.one_sided.gap}});
  }
  return {{"path", r.path.to_string()},
          {"sup_D", sup},
          {"lipschitz_bound", r.bound},
          {"coefficients", coeffs},
          {"derivatives", ds}};
}

}  // namespace vnle::io
