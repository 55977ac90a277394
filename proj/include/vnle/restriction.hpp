#pragma once

// Restrictions of eigenfunctions to the central circle C.
//
// C meets the parameter circle in a Cantor set inside [0, 1/2]: keep
// [0, 1/10], [2/10, 3/10], [4/10, 5/10] and repeat inside each piece. The
// vertices of K_m on C are listed in order by t = k / 3^m, where the base-3
// digits of k choose the kept piece at every stage.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vnle/branch_path.hpp"
#include "vnle/circle_graph.hpp"
#include "vnle/decimation.hpp"
#include "vnle/eigenbasis.hpp"

namespace vnle {

/// t = k / 3^m with 0 <= k <= 3^m; k = 0 and k = 3^m name the same vertex.
struct TriadicPoint {
  std::int64_t numerator = 0;
  Level level = 0;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(pow3(level)); }
};

/// Circle point x = sum_i d_i 5^-i where d_1 .. d_m are the base-3 digits of
/// k / 3^m. t = 1 goes to x = 1/2 and t = 0 to x = 0 (numerator 2 * 5^m).
inline CirclePoint t_to_circle(const TriadicPoint& t) {
  const Level m = t.level;
  if (m < 0 || t.numerator < 0 || t.numerator > pow3(m)) {
    throw std::out_of_range("triadic numerator outside [0, 3^m]");
  }
  if (t.numerator == pow3(m)) return {pow5(m), m};
  std::int64_t n = 0;
  std::int64_t k = t.numerator;
  std::int64_t place = 2;  // 2 * 5^(m - i) for the i-th digit from the right end
  for (Level i = 0; i < m; ++i) {
    n += (k % 3) * place;
    k /= 3;
    place *= 5;
  }
  if (n == 0) n = circle_size(m);
  return {n, m};
}

/// f(k / 3^m) for k = 0 .. 3^m, with f(0) = f(1).
struct RestrictionFn {
  Level level = 0;
  std::vector<double> values;
  std::optional<BranchPath> path;

  std::size_t intervals() const { return values.size() - 1; }
  double operator[](std::size_t k) const { return values[k]; }
};

inline RestrictionFn restrict(const NodeFunction& u, const LevelGraph& g) {
  if (u.level != g.level() || u.size() != g.size()) throw std::invalid_argument("restrict: level mismatch");
  const Level m = g.level();
  const std::int64_t n = pow3(m);
  RestrictionFn f;
  f.level = m;
  f.values.resize(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 0; k <= n; ++k) {
    f.values[static_cast<std::size_t>(k)] = u[g.index_of(t_to_circle({k, m}))];
  }
  if (u.tag) f.path = u.tag->path;
  return f;
}

/// The sandwich extension rule written on C: old points keep their value at
/// k = 3j, and 3j + 1, 3j + 2 receive the pair between f(j) and f(j + 1).
inline RestrictionFn extend_restriction(const RestrictionFn& f, double lam_next) {
  const std::size_t n = f.intervals();
  RestrictionFn g;
  g.level = f.level + 1;
  g.values.resize(3 * n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const auto [a, b] = sandwich_values(f[j], f[j + 1], lam_next);
    g.values[3 * j] = f[j];
    g.values[3 * j + 1] = a;
    g.values[3 * j + 2] = b;
  }
  g.values[3 * n] = f[n];
  return g;
}

/// D_m f(j / 3^m) = 3^m (f((j + 1) / 3^m) - f(j / 3^m)), j = 0 .. 3^m - 1, read
/// from f at any level >= m.
inline std::vector<double> difference(const RestrictionFn& f, Level m) {
  if (m > f.level || m < 0) throw std::invalid_argument("difference: level above the restriction's level");
  const std::size_t stride = static_cast<std::size_t>(pow3(f.level - m));
  const std::size_t n = static_cast<std::size_t>(pow3(m));
  const double scale = static_cast<double>(pow3(m));
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = scale * (f[(j + 1) * stride] - f[j * stride]);
  return d;
}

/// D_{m+1} from D_m and f at level m, for an extension at lam_next.
inline std::vector<double> difference_recurrence(const std::vector<double>& d, const RestrictionFn& f,
                                                 double lam_next) {
  const Level m = f.level;
  const double outer = 1.0 / ((1.0 - lam_next) * (1.0 - lam_next / 3.0));
  const double middle = 1.0 / (1.0 - lam_next / 3.0);
  const double shift = static_cast<double>(pow3(m + 1)) * lam_next / (1.0 - lam_next);
  std::vector<double> out(3 * d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    out[3 * j] = d[j] * outer + shift * f[j];
    out[3 * j + 1] = d[j] * middle;
    out[3 * j + 2] = d[j] * outer - shift * f[j + 1];
  }
  return out;
}

/// lambda_k, k >= birth level, for a path continued by phi_1 forever.
class LambdaSequence {
 public:
  explicit LambdaSequence(BranchPath path) : path_(std::move(path)) {
    path_.validate();
    double v = path_.seed;
    values_.push_back(v);
    for (int b : path_.branches) {
      v = inverse_branch(b, v);
      values_.push_back(v);
    }
  }

  const BranchPath& path() const { return path_; }
  Level birth() const { return path_.birth_level; }

  double operator()(Level k) {
    if (k < birth()) throw std::out_of_range("lambda requested below the birth level");
    const auto idx = static_cast<std::size_t>(k - birth());
    while (values_.size() <= idx) values_.push_back(phi1(values_.back()));
    return values_[idx];
  }

  /// First level from which only phi_1 is applied.
  Level tail_start() const { return path_.level(); }

 private:
  BranchPath path_;
  std::vector<double> values_;
};

namespace detail {

inline void require_regular(double lam) {
  if (std::abs(lam - 1.0) < 1e-15 || std::abs(lam - 3.0) < 1e-15) {
    throw std::domain_error("product factor undefined for eigenvalue 1 or 3");
  }
}

inline constexpr int kMaxProductTerms = 400;

template <class Factor>
double tail_product(Level m, LambdaSequence& seq, Factor factor, std::optional<int> terms) {
  double p = 1.0;
  for (int i = 0; i < (terms ? *terms : kMaxProductTerms); ++i) {
    const Level k = m + i;
    const double lam = seq(k);
    require_regular(lam);
    const double term = factor(lam);
    p *= term;
    if (!terms && k >= seq.tail_start() && std::abs(std::log(term)) < 1e-16) break;
  }
  return p;
}

}  // namespace detail

/// a_m = prod_{k >= m} 1 / (1 - lambda_k / 3). `terms` forces a fixed
/// truncation; otherwise the product stops once a factor is 1 to 1e-16.
inline double a_coeff(Level m, LambdaSequence& seq, std::optional<int> terms = std::nullopt) {
  return detail::tail_product(m, seq, [](double l) { return 1.0 / (1.0 - l / 3.0); }, terms);
}

/// b_m = prod_{k >= m} 1 / ((1 - lambda_k)(1 - lambda_k / 3)).
inline double b_coeff(Level m, LambdaSequence& seq, std::optional<int> terms = std::nullopt) {
  return detail::tail_product(m, seq, [](double l) { return 1.0 / ((1.0 - l) * (1.0 - l / 3.0)); }, terms);
}

/// Candidate f' at (j + 1/2) / 3^m: a_{m+1} D_m f(j / 3^m).
inline double midpoint_derivative(const RestrictionFn& f, std::size_t j, Level m, LambdaSequence& seq) {
  const auto d = difference(f, m);
  return a_coeff(m + 1, seq) * d.at(j);
}

struct OneSidedDerivatives {
  double right = 0.0;
  double left = 0.0;
  double gap = 0.0;        // right - left
  double tail_sum = 0.0;   // sum_{k >= 1} 3^{m+k} lambda_{m+k} / (1 - lambda_{m+k}) b_{m+k+1}
  int terms = 0;
};

/// Right and left derivative candidates at j / 3^m:
///   right = b_{m+1} D_m f(j)     + S f(j),
///   left  = b_{m+1} D_m f(j - 1) - S f(j),
/// S = sum_{k >= 1} 3^{m+k} lambda_{m+k} / (1 - lambda_{m+k}) * b_{m+k+1}.
/// Indices wrap around the circle.
inline OneSidedDerivatives one_sided_derivatives(const RestrictionFn& f, std::size_t j, Level m,
                                                 LambdaSequence& seq) {
  const auto d = difference(f, m);
  const std::size_t n = d.size();
  const std::size_t stride = static_cast<std::size_t>(pow3(f.level - m));
  const std::size_t jr = j % n;
  const std::size_t jl = (j + n - 1) % n;
  const double fj = f[jr * stride];

  // lambda_{m+1} .. lambda_{m+K} until both the shift and the product factor
  // are negligible.
  std::vector<double> shift, factor;
  for (int k = 1; k <= detail::kMaxProductTerms; ++k) {
    const Level l = m + k;
    const double lam = seq(l);
    detail::require_regular(lam);
    shift.push_back(std::pow(3.0, l) * lam / (1.0 - lam));
    factor.push_back(1.0 / ((1.0 - lam) * (1.0 - lam / 3.0)));
    if (l >= seq.tail_start() && std::abs(std::log(factor.back())) < 1e-16 && std::abs(shift.back()) < 1e-16) break;
  }
  const std::size_t K = shift.size();
  // b_{m+k} by suffix products; b beyond the truncation is 1.
  std::vector<double> b(K + 2, 1.0);
  for (std::size_t k = K; k >= 1; --k) b[k] = factor[k - 1] * b[k + 1];
  double S = 0.0;
  for (std::size_t k = 1; k <= K; ++k) S += shift[k - 1] * b[k + 1];

  OneSidedDerivatives out;
  out.tail_sum = S;
  out.terms = static_cast<int>(K);
  out.right = b[1] * d[jr] + S * fj;
  out.left = b[1] * d[jl] - S * fj;
  out.gap = out.right - out.left;
  return out;
}

/// D_{m+k} at the index reached from j by k steps of the chosen identity of
/// the difference recurrence, with f held at the old points:
///   Right:  j -> 3j,      D <- c D + e f(j)
///   Middle: j -> 3j + 1,  D <- D / (1 - lambda / 3)
///   Left:   j -> 3j - 1,  D <- c D - e f(j), starting from D_m(j - 1)
enum class DifferenceChain { Right, Middle, Left };

inline double iterate_difference_chain(const RestrictionFn& f, std::size_t j, Level m, int depth,
                                       DifferenceChain chain, LambdaSequence& seq) {
  const auto d = difference(f, m);
  const std::size_t n = d.size();
  const std::size_t stride = static_cast<std::size_t>(pow3(f.level - m));
  const double fj = f[(j % n) * stride];
  double D = chain == DifferenceChain::Left ? d[(j + n - 1) % n] : d[j % n];
  for (int k = 1; k <= depth; ++k) {
    const Level l = m + k;
    const double lam = seq(l);
    const double c = 1.0 / ((1.0 - lam) * (1.0 - lam / 3.0));
    const double e = static_cast<double>(pow3(l)) * lam / (1.0 - lam);
    switch (chain) {
      case DifferenceChain::Right: D = c * D + e * fj; break;
      case DifferenceChain::Middle: D = D / (1.0 - lam / 3.0); break;
      case DifferenceChain::Left: D = c * D - e * fj; break;
    }
  }
  return D;
}

/// Index at level m + depth that the chain ends on.
inline std::size_t chain_index(std::size_t j, Level m, int depth, DifferenceChain chain) {
  const std::size_t n = static_cast<std::size_t>(pow3(m + depth));
  std::size_t idx = j;
  for (int k = 0; k < depth; ++k) {
    switch (chain) {
      case DifferenceChain::Right: idx = 3 * idx; break;
      case DifferenceChain::Middle: idx = 3 * idx + 1; break;
      case DifferenceChain::Left: idx = 3 * idx; break;
    }
  }
  if (chain == DifferenceChain::Left) idx = (idx + n - 1) % n;
  return idx % n;
}

/// Restriction of the eigenfunction named by `path`, carried to level `depth`
/// by the restricted extension rule.
inline RestrictionFn path_restriction(const BranchPath& path, Level depth, GraphLadder& ladder,
                                      std::size_t basis_index = 0) {
  path.validate();
  if (depth < path.level()) throw std::invalid_argument("depth below the path's final level");
  const NodeFunction seed = seed_function(path, ladder, basis_index);
  RestrictionFn f = restrict(seed, ladder.at(path.birth_level));
  LambdaSequence seq(path);
  for (Level m = path.birth_level; m < depth; ++m) f = extend_restriction(f, seq(m + 1));
  f.path = path.continued_to(depth);
  return f;
}

struct LipschitzReport {
  BranchPath path;
  Level birth = 0;
  std::vector<double> sup_difference;  // sup_j |D_m f|, m = birth .. depth
  std::vector<double> increments;      // |sup_{m+1} - sup_m|
  double bound = 0.0;                  // max over all levels
  std::vector<double> a;               // a_m, m = birth+1 .. depth
  std::vector<double> b;               // b_m, m = birth+1 .. depth
};

inline LipschitzReport lipschitz_diagnostic(const BranchPath& path, Level depth, GraphLadder& ladder,
                                            std::size_t basis_index = 0) {
  const RestrictionFn f = path_restriction(path, depth, ladder, basis_index);
  LambdaSequence seq(path);
  LipschitzReport r;
  r.path = path;
  r.birth = path.birth_level;
  for (Level m = path.birth_level; m <= depth; ++m) {
    double sup = 0.0;
    for (double x : difference(f, m)) sup = std::max(sup, std::abs(x));
    r.sup_difference.push_back(sup);
    r.bound = std::max(r.bound, sup);
  }
  for (std::size_t i = 1; i < r.sup_difference.size(); ++i) {
    r.increments.push_back(std::abs(r.sup_difference[i] - r.sup_difference[i - 1]));
  }
  for (Level m = path.birth_level + 1; m <= depth; ++m) {
    r.a.push_back(a_coeff(m, seq));
    r.b.push_back(b_coeff(m, seq));
  }
  return r;
}

}  // namespace vnle
