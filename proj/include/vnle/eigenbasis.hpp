#pragma once

// Eigenfunctions of -Delta_m: born bases, the sandwich extension rule,
// symmetry classification and miniaturization.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vnle/branch_path.hpp"
#include "vnle/circle_graph.hpp"
#include "vnle/decimation.hpp"

namespace vnle {

/// Values on the vertices of one K_m, indexed by LevelGraph vertex id.
struct NodeFunction {
  struct Tag {
    double eigenvalue = 0.0;
    BranchPath path;
  };

  Level level = 0;
  std::vector<double> values;
  std::optional<Tag> tag;

  NodeFunction() = default;
  NodeFunction(Level m, std::size_t n, double fill = 0.0) : level(m), values(n, fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  double sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
  }
};

/// Graphs K_1 .. K_M built on demand and kept for reuse.
class GraphLadder {
 public:
  const LevelGraph& at(Level m) {
    if (m < 1) throw std::invalid_argument("K_m is only defined for m >= 1");
    if (static_cast<std::size_t>(m) >= graphs_.size()) graphs_.resize(static_cast<std::size_t>(m) + 1);
    auto& slot = graphs_[static_cast<std::size_t>(m)];
    if (!slot) slot = std::make_unique<LevelGraph>(m);
    return *slot;
  }

 private:
  std::vector<std::unique_ptr<LevelGraph>> graphs_;
};

struct SandwichValues {
  double a;
  double b;
};

/// Values at the two new vertices sandwiched between old values A and B that
/// make the lambda' eigen-equation hold at both of them.
inline SandwichValues sandwich_values(double A, double B, double lam_next) {
  if (std::abs(1.0 - lam_next) < 1e-12 || std::abs(3.0 - lam_next) < 1e-12) {
    throw std::domain_error("extension undefined for eigenvalue 1 or 3");
  }
  const double denom = (1.0 - lam_next) * (3.0 - lam_next);
  return {((2.0 - lam_next) * A + B) / denom, (A + (2.0 - lam_next) * B) / denom};
}

/// Extension of u from K_m to K_{m+1} at eigenvalue lam_next. Old values are
/// copied; each arc of K_m gets its sandwiched pair.
inline NodeFunction extend_to(const NodeFunction& u, double lam_next, const LevelGraph& coarse,
                              const LevelGraph& fine) {
  if (fine.level() != coarse.level() + 1 || u.level != coarse.level() || u.size() != coarse.size()) {
    throw std::invalid_argument("extend: function and graph levels do not line up");
  }
  NodeFunction v(fine.level(), fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const Vertex& x = fine.vertex(i);
    if (x.kind == VertexKind::Old) v[i] = u[coarse.index_of(x.first / 5)];
  }
  const std::int64_t arcs = coarse.points();
  for (std::int64_t s = 0; s < arcs; ++s) {
    const double A = u[coarse.index_of(s)];
    const double B = u[coarse.index_of(s + 1)];
    const auto [a, b] = sandwich_values(A, B, lam_next);
    v[fine.index_of(5 * s + 1)] = a;
    v[fine.index_of(5 * s + 3)] = b;
  }
  return v;
}

/// Extension by lambda' = phi_branch(lam); keeps the eigen tag in sync.
inline NodeFunction extend(const NodeFunction& u, double lam, int branch, const LevelGraph& coarse,
                           const LevelGraph& fine) {
  const double lam_next = inverse_branch(branch, lam);
  NodeFunction v = extend_to(u, lam_next, coarse, fine);
  if (u.tag) v.tag = NodeFunction::Tag{lam_next, u.tag->path.then(branch)};
  return v;
}

/// Born eigenfunctions with eigenvalue 3 on K_m: alternating signs along the
/// arc between the two points of every vertex that is new in some K_j, j < m,
/// and two more (upper and lower half circle) for the vertex {1/2, 1}.
inline std::vector<NodeFunction> born_lambda3_basis(const LevelGraph& g) {
  const Level m = g.level();
  const BranchPath path{m, 3, {}};
  std::vector<NodeFunction> out;
  auto alternate = [&](std::int64_t from, std::int64_t to) {
    NodeFunction u(m, g.size());
    double sign = 1.0;
    for (std::int64_t n = from + 1; n < to; ++n) {
      const auto r = n % 5;
      if (r == 1 || r == 3) {
        u[g.index_of(n)] = sign;
        sign = -sign;
      }
    }
    u.tag = NodeFunction::Tag{3.0, path};
    out.push_back(std::move(u));
  };
  for (const Vertex& v : g.vertices()) {
    const int k = v.depth();
    if (k == 0) continue;
    if (k < m) {
      alternate(v.first, v.second);
    } else {
      alternate(0, v.first);
      alternate(v.first, v.second);
    }
  }
  return out;
}

namespace detail {

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(std::vector<std::vector<double>>& a, double rel_tol = 1e-10) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size();
  const std::size_t cols = a[0].size();
  double scale = 0.0;
  for (const auto& r : a)
    for (double x : r) scale = std::max(scale, std::abs(x));
  const double tol = rel_tol * std::max(scale, 1e-300);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (std::abs(a[i][c]) > std::abs(a[best][c])) best = i;
    if (std::abs(a[best][c]) <= tol) continue;
    std::swap(a[r], a[best]);
    const double p = a[r][c];
    for (double& x : a[r]) x /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0.0) continue;
      const double f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t support_size(const std::vector<double>& v) {
  std::size_t n = 0;
  for (double x : v) n += std::abs(x) > 1e-12;
  return n;
}

/// Replaces basis vectors by combinations with strictly smaller support while
/// any pairwise elimination finds one.
inline void minimize_support(std::vector<std::vector<double>>& basis, int max_passes = 4) {
  for (int pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      std::size_t best = support_size(basis[i]);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        if (j == i) continue;
        for (std::size_t c = 0; c < basis[i].size(); ++c) {
          if (std::abs(basis[i][c]) <= 1e-12 || std::abs(basis[j][c]) <= 1e-12) continue;
          const double f = basis[i][c] / basis[j][c];
          std::vector<double> w(basis[i].size());
          for (std::size_t t = 0; t < w.size(); ++t) {
            w[t] = basis[i][t] - f * basis[j][t];
            if (std::abs(w[t]) <= 1e-12) w[t] = 0.0;
          }
          const std::size_t s = support_size(w);
          if (s < best && s > 0) {
            basis[i] = std::move(w);
            best = s;
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }
}

}  // namespace detail

/// Born eigenfunctions with eigenvalue 1 on K_m. The two new vertices of each
/// arc of K_{m-1} share one value; at every old vertex the four incident arc
/// values must sum to zero.
inline std::vector<NodeFunction> born_lambda1_basis(const LevelGraph& g) {
  const Level m = g.level();
  const std::int64_t arcs = circle_size(m - 1);
  const std::size_t n_arcs = static_cast<std::size_t>(arcs);

  std::vector<std::vector<double>> constraints;
  for (const Vertex& v : g.vertices()) {
    if (v.kind != VertexKind::Old) continue;
    std::vector<double> row(n_arcs, 0.0);
    for (std::int64_t p : {v.first, v.second}) {
      const std::int64_t s = (p / 5) % arcs;  // arc leaving p
      row[static_cast<std::size_t>(s)] += 1.0;
      row[static_cast<std::size_t>((s + arcs - 1) % arcs)] += 1.0;  // arc arriving at p
    }
    constraints.push_back(std::move(row));
  }

  const auto pivots = detail::rref(constraints);
  std::vector<bool> is_pivot(n_arcs, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<double>> basis;
  for (std::size_t f = 0; f < n_arcs; ++f) {
    if (is_pivot[f]) continue;
    std::vector<double> x(n_arcs, 0.0);
    x[f] = 1.0;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -constraints[r][f];
    basis.push_back(std::move(x));
  }
  detail::minimize_support(basis);

  const BranchPath path{m, 1, {}};
  std::vector<NodeFunction> out;
  for (const auto& x : basis) {
    NodeFunction u(m, g.size());
    for (std::int64_t s = 0; s < arcs; ++s) {
      u[g.index_of(5 * s + 1)] = x[static_cast<std::size_t>(s)];
      u[g.index_of(5 * s + 3)] = x[static_cast<std::size_t>(s)];
    }
    u.tag = NodeFunction::Tag{1.0, path};
    out.push_back(std::move(u));
  }
  return out;
}

/// Elimination rank of a set of functions, each scaled to unit sup norm, with
/// pivot threshold rel_tol times the largest entry.
inline std::size_t function_rank(const std::vector<std::vector<double>>& rows, double rel_tol = 1e-10) {
  std::vector<std::vector<double>> a;
  a.reserve(rows.size());
  for (const auto& r : rows) {
    double s = 0.0;
    for (double x : r) s = std::max(s, std::abs(x));
    if (s == 0.0) continue;
    std::vector<double> scaled(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) scaled[i] = r[i] / s;
    a.push_back(std::move(scaled));
  }
  return detail::rref(a, rel_tol).size();
}

inline std::size_t function_rank(const std::vector<NodeFunction>& fns, double rel_tol = 1e-10) {
  std::vector<std::vector<double>> rows;
  for (const auto& f : fns) rows.push_back(f.values);
  return function_rank(rows, rel_tol);
}

/// The eigenfunction a level-1 seed stands for; `index` selects within the
/// born eigenspaces of 1 and 3.
inline NodeFunction seed_function(const BranchPath& path, GraphLadder& ladder, std::size_t index = 0) {
  const LevelGraph& g = ladder.at(path.birth_level);
  NodeFunction u;
  switch (path.seed) {
    case 0:
      u = NodeFunction(g.level(), g.size(), 1.0);
      break;
    case 5: {
      // phi_3 image of the constant on the single vertex of K_0.
      u = NodeFunction(g.level(), g.size(), 1.0);
      const auto [a, b] = sandwich_values(1.0, 1.0, 5.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.vertex(i).kind == VertexKind::New) u[i] = (g.vertex(i).first % 5 == 1) ? a : b;
      }
      break;
    }
    case 1:
    case 3: {
      auto basis = path.seed == 1 ? born_lambda1_basis(g) : born_lambda3_basis(g);
      if (index >= basis.size()) throw std::out_of_range("born basis index out of range");
      u = std::move(basis[index]);
      break;
    }
    default:
      throw std::invalid_argument("unknown seed");
  }
  u.tag = NodeFunction::Tag{static_cast<double>(path.seed), BranchPath{path.birth_level, path.seed, {}}};
  return u;
}

/// Follows `path` (then phi_1) from its seed function up to level M.
inline NodeFunction limit_eigenfunction(const BranchPath& path, Level M, GraphLadder& ladder,
                                        std::size_t basis_index = 0) {
  path.validate();
  if (M < path.level()) throw std::invalid_argument("resolution below the path's final level");
  NodeFunction u = seed_function(path, ladder, basis_index);
  const BranchPath full = path.continued_to(M);
  for (std::size_t i = 0; i < full.branches.size(); ++i) {
    const Level m = u.level;
    u = extend(u, u.tag->eigenvalue, full.branches[i], ladder.at(m), ladder.at(m + 1));
  }
  return u;
}

/// max |a - (2A + B)/3|, |b - (A + 2B)/3| over all sandwiches of K_m, m >= 2:
/// the distance of the last extension step from linear interpolation.
inline double linear_interpolation_deviation(const NodeFunction& u, const LevelGraph& g) {
  double dev = 0.0;
  const std::int64_t arcs = circle_size(g.level() - 1);
  for (std::int64_t s = 0; s < arcs; ++s) {
    const double A = u[g.index_of(5 * s)];
    const double B = u[g.index_of(5 * s + 5)];
    const double a = u[g.index_of(5 * s + 1)];
    const double b = u[g.index_of(5 * s + 3)];
    dev = std::max({dev, std::abs(a - (2 * A + B) / 3), std::abs(b - (A + 2 * B) / 3)});
  }
  return dev;
}

/// Path of u(5t) when u has `path`: one level later, same branches.
inline BranchPath miniaturized_path(const BranchPath& path) {
  if (path.birth_level > 1 || path.seed == 1 || path.seed == 3) {
    return {path.birth_level + 1, path.seed, path.branches};
  }
  BranchPath p{1, 0, {path.seed == 5 ? 3 : 1}};
  p.branches.insert(p.branches.end(), path.branches.begin(), path.branches.end());
  return p;
}

/// v(t) = u(5t mod 1) on K_{m+1}; same graph eigenvalue.
inline NodeFunction miniaturize(const NodeFunction& u, const LevelGraph& coarse, const LevelGraph& fine) {
  if (fine.level() != coarse.level() + 1 || u.size() != coarse.size()) {
    throw std::invalid_argument("miniaturize: graph levels do not line up");
  }
  NodeFunction v(fine.level(), fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) v[i] = u[coarse.index_of(fine.vertex(i).first)];
  if (u.tag) v.tag = NodeFunction::Tag{u.tag->eigenvalue, miniaturized_path(u.tag->path)};
  return v;
}

struct EigenPair {
  NodeFunction function;
  EigenvalueRecord record;
};

inline constexpr Level kDefaultEigenbasisCap = 4;

/// All 5^M eigenfunctions of -Delta_M, built level by level from the level-1
/// seeds through every admissible extension plus the born bases.
inline std::vector<EigenPair> full_eigenbasis(Level M, GraphLadder& ladder, Level cap = kDefaultEigenbasisCap) {
  if (M < 1) throw std::invalid_argument("full_eigenbasis requires M >= 1");
  if (M > cap) {
    throw std::invalid_argument("full_eigenbasis: level " + std::to_string(M) + " exceeds cap " +
                                std::to_string(cap));
  }
  std::vector<NodeFunction> cur;
  {
    const LevelGraph& g1 = ladder.at(1);
    cur.push_back(seed_function({1, 0, {}}, ladder));
    cur.push_back(seed_function({1, 5, {}}, ladder));
    for (auto& f : born_lambda1_basis(g1)) cur.push_back(std::move(f));
    for (auto& f : born_lambda3_basis(g1)) cur.push_back(std::move(f));
  }
  for (Level m = 1; m < M; ++m) {
    const LevelGraph& coarse = ladder.at(m);
    const LevelGraph& fine = ladder.at(m + 1);
    std::vector<NodeFunction> next;
    next.reserve(static_cast<std::size_t>(pow5(m + 1)));
    for (const auto& u : cur) {
      const bool zero = u.tag->path.is_constant();
      for (int b = 1; b <= 3; ++b) {
        if (zero && b == 2) continue;
        next.push_back(extend(u, u.tag->eigenvalue, b, coarse, fine));
      }
    }
    for (auto& f : born_lambda1_basis(fine)) next.push_back(std::move(f));
    for (auto& f : born_lambda3_basis(fine)) next.push_back(std::move(f));
    cur = std::move(next);
  }

  const double scale = level_scale(M);
  std::vector<EigenPair> out;
  out.reserve(cur.size());
  for (auto& f : cur) {
    EigenvalueRecord r;
    r.path = f.tag->path;
    r.value = f.tag->eigenvalue;
    r.normalized = scale * r.value;
    r.multiplicity = born_multiplicity(r.path.birth_level, r.path.seed);
    out.push_back({std::move(f), std::move(r)});
  }
  std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.record.value != b.record.value) return a.record.value < b.record.value;
    return a.record.path < b.record.path;
  });
  return out;
}

enum class Parity { Even, Odd, Mixed };

/// Signs under the vertical reflection t -> 1 - t and the horizontal
/// reflection t -> 1/2 - t.
struct SymmetryType {
  Parity vertical = Parity::Mixed;
  Parity horizontal = Parity::Mixed;

  bool pure() const { return vertical != Parity::Mixed && horizontal != Parity::Mixed; }

  std::string label() const {
    auto sym = [](Parity p) { return p == Parity::Even ? "+" : (p == Parity::Odd ? "-" : "?"); };
    return std::string("(") + sym(vertical) + " " + sym(horizontal) + ")";
  }

  friend bool operator==(const SymmetryType&, const SymmetryType&) = default;
};

inline NodeFunction compose(const NodeFunction& u, const std::vector<std::size_t>& perm) {
  NodeFunction v = u;
  for (std::size_t i = 0; i < perm.size(); ++i) v[i] = u[perm[i]];
  return v;
}

inline Parity parity_under(const NodeFunction& u, const std::vector<std::size_t>& perm, double tol) {
  const double scale = std::max(u.sup_norm(), 1e-300);
  bool even = true, odd = true;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const double w = u[perm[i]];
    if (std::abs(w - u[i]) > tol * scale) even = false;
    if (std::abs(w + u[i]) > tol * scale) odd = false;
  }
  if (even) return Parity::Even;
  if (odd) return Parity::Odd;
  return Parity::Mixed;
}

inline SymmetryType symmetry_type(const NodeFunction& u, const LevelGraph& g, double tol = 1e-10) {
  return {parity_under(u, g.vertical_reflection(), tol), parity_under(u, g.horizontal_reflection(), tol)};
}

/// Projection of u onto the symmetry type with signs (sv, sh).
inline NodeFunction symmetrize(const NodeFunction& u, const LevelGraph& g, int sv, int sh) {
  const auto V = g.vertical_reflection();
  const auto H = g.horizontal_reflection();
  NodeFunction out = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = 0.25 * (u[i] + sv * u[V[i]] + sh * u[H[i]] + sv * sh * u[V[H[i]]]);
  }
  return out;
}

/// Dimensions of the four symmetry types, in the order (+ +), (+ -), (- +),
/// (- -), summed over eigenspaces. Eigenspaces are grouped by value within
/// `cluster_tol`; each one is projected onto every type and the ranks added.
inline std::array<std::size_t, 4> symmetry_dimensions(const std::vector<EigenPair>& basis, const LevelGraph& g,
                                                      double cluster_tol = 1e-9) {
  static constexpr std::array<std::array<int, 2>, 4> kSigns = {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  std::array<std::size_t, 4> dims{};
  std::size_t start = 0;
  while (start < basis.size()) {
    std::size_t end = start + 1;
    while (end < basis.size() && basis[end].record.value - basis[end - 1].record.value <= cluster_tol) ++end;
    for (std::size_t t = 0; t < 4; ++t) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = start; i < end; ++i) {
        rows.push_back(symmetrize(basis[i].function, g, kSigns[t][0], kSigns[t][1]).values);
      }
      // Projections can be numerically tiny rather than zero; compare against
      // the unprojected scale.
      double scale = 0.0;
      for (std::size_t i = start; i < end; ++i) scale = std::max(scale, basis[i].function.sup_norm());
      for (auto& r : rows) {
        double s = 0.0;
        for (double x : r) s = std::max(s, std::abs(x));
        if (s <= 1e-9 * scale) std::fill(r.begin(), r.end(), 0.0);
      }
      dims[t] += function_rank(rows, 1e-8);
    }
    start = end;
  }
  return dims;
}

}  // namespace vnle
