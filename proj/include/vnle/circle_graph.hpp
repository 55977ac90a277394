#pragma once

// Graph approximations K_m of the Vicsek set with no loose ends.
//
// The parameter circle at level m is sampled at n / (2 * 5^m), 1 <= n <= 2 * 5^m,
// with n = 2 * 5^m standing for both 0 and 1. Points are glued in pairs; each
// pair is a vertex, and consecutive circle points are joined by an arc. Every
// vertex therefore owns four arc slots, two of which point back to itself when
// the pair is adjacent on the circle.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace vnle {

using Level = int;

/// 5^e for small non-negative e.
constexpr std::int64_t pow5(int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 5;
  return r;
}

constexpr std::int64_t pow3(int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

/// Number of circle samples at level m (2 * 5^m).
constexpr std::int64_t circle_size(Level m) { return 2 * pow5(m); }

/// Exact point n / (2 * 5^m) on the parameter circle.
struct CirclePoint {
  std::int64_t numerator = 0;
  Level level = 0;

  /// Same point expressed at a finer level.
  CirclePoint refined(Level finer) const {
    return {numerator * pow5(finer - level), finer};
  }

  friend bool operator==(const CirclePoint& a, const CirclePoint& b) {
    if (a.level == b.level) return a.numerator == b.numerator;
    const Level fine = std::max(a.level, b.level);
    return a.refined(fine).numerator == b.refined(fine).numerator;
  }
};

enum class VertexKind { Old, New };

/// An identified pair of circle points; `first` is the canonical (smaller)
/// numerator.
struct Vertex {
  std::int64_t first = 0;
  std::int64_t second = 0;
  Level level = 0;
  VertexKind kind = VertexKind::New;

  /// Exponent k of the largest power of 5 dividing both numerators.
  int depth() const {
    int k = 0;
    for (std::int64_t n = first; n % 5 == 0; n /= 5) ++k;
    return k;
  }

  friend bool operator==(const Vertex& a, const Vertex& b) {
    return a.level == b.level && a.first == b.first && a.second == b.second;
  }
};

/// Identification partner of n at level m, by n = 5^k (a + 5j):
/// a = 1 <-> 2 and a = 3 <-> 4.
inline std::int64_t partner_numerator(std::int64_t n, Level m) {
  if (m < 0 || n < 1 || n > circle_size(m)) {
    throw std::out_of_range("circle numerator " + std::to_string(n) +
                            " outside [1, 2*5^" + std::to_string(m) + "]");
  }
  std::int64_t scale = 1;
  std::int64_t rest = n;
  while (rest % 5 == 0) {
    rest /= 5;
    scale *= 5;
  }
  switch (rest % 5) {
    case 1:
    case 3:
      return n + scale;
    default:
      return n - scale;
  }
}

inline Vertex canonical_vertex(std::int64_t n, Level m) {
  const std::int64_t p = partner_numerator(n, m);
  Vertex v;
  v.first = std::min(n, p);
  v.second = std::max(n, p);
  v.level = m;
  v.kind = (n % 5 == 0) ? VertexKind::Old : VertexKind::New;
  return v;
}

/// The graph K_m. Immutable after construction.
class LevelGraph {
 public:
  using Slots = std::array<std::size_t, 4>;

  explicit LevelGraph(Level m) : level_(m) {
    if (m < 1) throw std::invalid_argument("K_m is only defined for m >= 1");
    if (m > 12) throw std::invalid_argument("level too large for K_m");
    const std::int64_t n_points = circle_size(m);
    point_index_.assign(static_cast<std::size_t>(n_points + 1), -1);
    vertices_.reserve(static_cast<std::size_t>(pow5(m)));
    // Canonical numerators visited in ascending order give ascending ids.
    for (std::int64_t n = 1; n <= n_points; ++n) {
      if (point_index_[static_cast<std::size_t>(n)] >= 0) continue;
      Vertex v = canonical_vertex(n, m);
      const auto id = static_cast<std::int64_t>(vertices_.size());
      point_index_[v.first] = id;
      point_index_[v.second] = id;
      vertices_.push_back(v);
    }
    adjacency_.resize(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const Vertex& v = vertices_[i];
      adjacency_[i] = {index_of(v.first - 1), index_of(v.first + 1),
                       index_of(v.second - 1), index_of(v.second + 1)};
    }
  }

  Level level() const { return level_; }
  std::size_t size() const { return vertices_.size(); }
  std::int64_t points() const { return circle_size(level_); }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t i) const { return vertices_[i]; }
  const Slots& neighbors(std::size_t i) const { return adjacency_[i]; }

  /// Vertex id of circle point n; wraps modulo 2 * 5^m, with 0 meaning the
  /// point 1.
  std::size_t index_of(std::int64_t n) const {
    const std::int64_t np = points();
    n %= np;
    if (n <= 0) n += np;
    return static_cast<std::size_t>(point_index_[static_cast<std::size_t>(n)]);
  }

  std::size_t index_of(const CirclePoint& p) const {
    if (p.level > level_) {
      throw std::invalid_argument("circle point finer than the graph level");
    }
    return index_of(p.refined(level_).numerator);
  }

  std::size_t old_count() const {
    std::size_t c = 0;
    for (const auto& v : vertices_) c += v.kind == VertexKind::Old;
    return c;
  }

  /// Vertex permutation induced by a map on circle numerators.
  template <class PointMap>
  std::vector<std::size_t> induced_permutation(PointMap&& map) const {
    std::vector<std::size_t> perm(size());
    for (std::size_t i = 0; i < size(); ++i) perm[i] = index_of(map(vertices_[i].first));
    return perm;
  }

  /// t -> 1 - t. Swaps the two halves of the circle.
  std::vector<std::size_t> vertical_reflection() const {
    const std::int64_t np = points();
    return induced_permutation([np](std::int64_t n) { return np - n; });
  }

  /// t -> (1/2 - t) mod 1. Maps each half of the circle to itself.
  std::vector<std::size_t> horizontal_reflection() const {
    const std::int64_t np = points();
    return induced_permutation([np](std::int64_t n) { return np / 2 - n; });
  }

  /// t -> t + 1/2.
  std::vector<std::size_t> half_turn() const {
    const std::int64_t np = points();
    return induced_permutation([np](std::int64_t n) { return n + np / 2; });
  }

 private:
  Level level_;
  std::vector<Vertex> vertices_;
  std::vector<Slots> adjacency_;
  std::vector<std::int64_t> point_index_;
};

inline LevelGraph build_level(Level m) { return LevelGraph(m); }

/// Sparse symmetric matrix of -Delta_m. Entries are exact small integers.
struct LaplacianMatrix {
  struct Entry {
    std::size_t row;
    std::size_t col;
    int value;
  };

  Level level = 0;
  std::size_t dimension = 0;
  std::vector<Entry> entries;  // row-major, columns ascending within a row

  int at(std::size_t r, std::size_t c) const {
    for (const auto& e : entries) {
      if (e.row == r && e.col == c) return e.value;
    }
    return 0;
  }

  std::vector<int> dense() const {
    std::vector<int> out(dimension * dimension, 0);
    for (const auto& e : entries) out[e.row * dimension + e.col] = e.value;
    return out;
  }
};

inline LaplacianMatrix laplacian_matrix(const LevelGraph& g) {
  LaplacianMatrix L;
  L.level = g.level();
  L.dimension = g.size();
  std::vector<std::pair<std::size_t, int>> row;
  for (std::size_t i = 0; i < g.size(); ++i) {
    row.clear();
    int diag = 0;
    for (std::size_t z : g.neighbors(i)) {
      if (z == i) continue;  // self slot: u(x) - u(x) = 0
      ++diag;
      auto it = std::find_if(row.begin(), row.end(), [z](const auto& p) { return p.first == z; });
      if (it == row.end()) {
        row.emplace_back(z, -1);
      } else {
        it->second -= 1;
      }
    }
    row.emplace_back(i, diag);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) L.entries.push_back({i, c, v});
  }
  return L;
}

/// (-Delta_m u)(x) = sum over the four slots of u(x) - u(z).
template <class Values>
std::vector<double> apply_laplacian(const LevelGraph& g, const Values& u) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (std::size_t z : g.neighbors(i)) s += u[i] - u[z];
    out[i] = s;
  }
  return out;
}

}  // namespace vnle
