#pragma once

// Spectral decimation for -Delta_m on K_m.
//
// Every eigenvalue of -Delta_{m+1} is either born (1 or 3) or an inverse image
// phi_i(lambda) of an eigenvalue lambda of -Delta_m under the renormalization
// polynomial R(x) = x (3 - x) (5 - x). Records carry the full branch history so
// that multiplicities never depend on comparing floats.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "vnle/branch_path.hpp"
#include "vnle/circle_graph.hpp"

namespace vnle {

inline double renorm_poly(double x) { return x * (3.0 - x) * (5.0 - x); }

inline double renorm_poly_derivative(double x) { return 15.0 + x * (-16.0 + 3.0 * x); }

/// Critical points of R, (16 -+ sqrt(76)) / 6.
inline const double kCriticalLow = (16.0 - std::sqrt(76.0)) / 6.0;
inline const double kCriticalHigh = (16.0 + std::sqrt(76.0)) / 6.0;
/// Local maximum of R; above it R(x) = lambda has a single real root.
inline const double kRenormMax = renorm_poly(kCriticalLow);
/// Fixed point 4 + sqrt(2) of phi_3, the supremum of every spectrum.
inline const double kSpectrumSup = 4.0 + std::numbers::sqrt2;

/// Exponent used by the Weyl ratio, log 15 / log 5.
inline const double kWeylAlpha = std::log(15.0) / std::log(5.0);

/// Scale factor between consecutive levels.
inline constexpr double kLevelScale = 15.0;

inline double level_scale(int m) {
  double s = 1.0;
  for (int i = 0; i < m; ++i) s *= kLevelScale;
  return s;
}

inline double phi1_derivative_at_zero() { return 1.0 / 15.0; }

namespace detail {

struct Bracket {
  double lo;
  double hi;
};

inline Bracket branch_bracket(int i) {
  switch (i) {
    case 1: return {0.0, kCriticalLow};
    case 2: return {kCriticalLow, 3.0};
    default: return {5.0, 6.0};
  }
}

inline double bisect_branch(int i, double lam) {
  auto [lo, hi] = branch_bracket(i);
  // phi_2 lives on the decreasing piece of R.
  const double orient = (i == 2) ? -1.0 : 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (orient * (renorm_poly(mid) - lam) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rl = std::abs(renorm_poly(lo) - lam);
  const double rh = std::abs(renorm_poly(hi) - lam);
  return rl <= rh ? lo : hi;
}

/// Three real roots of x^3 - 8x^2 + 15x - lam, ascending, by the
/// trigonometric form of the depressed cubic.
inline std::array<double, 3> trig_roots(double lam) {
  const double q = 19.0 / 9.0;
  const double r = (56.0 - 27.0 * lam) / 54.0;
  const double c = std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0);
  const double theta = std::acos(c);
  const double amp = -2.0 * std::sqrt(q);
  const double shift = 8.0 / 3.0;
  std::array<double, 3> x = {
      amp * std::cos(theta / 3.0) + shift,
      amp * std::cos((theta + 2.0 * std::numbers::pi) / 3.0) + shift,
      amp * std::cos((theta - 2.0 * std::numbers::pi) / 3.0) + shift,
  };
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace detail

/// i-th smallest real solution of R(x) = lam, for 0 <= lam <= max R on [0, 3].
inline double inverse_branch(int i, double lam) {
  if (i < 1 || i > 3) throw std::invalid_argument("inverse branch index must be 1, 2 or 3");
  constexpr double slack = 1e-12;
  if (!(lam >= -slack && lam <= kRenormMax + slack)) {
    throw std::domain_error("inverse_branch: " + std::to_string(lam) +
                            " has fewer than three real preimages under R");
  }
  lam = std::clamp(lam, 0.0, kRenormMax);
  if (lam == 0.0) return i == 1 ? 0.0 : (i == 2 ? 3.0 : 5.0);

  const auto [lo, hi] = detail::branch_bracket(i);
  double x = std::clamp(detail::trig_roots(lam)[static_cast<std::size_t>(i - 1)], lo, hi);
  double res = std::abs(renorm_poly(x) - lam);
  // Newton polish restores relative accuracy when phi_1(lam) is tiny.
  for (int it = 0; it < 6 && res > 0.0; ++it) {
    const double d = renorm_poly_derivative(x);
    if (d == 0.0) break;
    const double next = x - (renorm_poly(x) - lam) / d;
    if (!(next >= lo && next <= hi)) break;
    const double next_res = std::abs(renorm_poly(next) - lam);
    if (next_res > res) break;
    if (next == x) break;
    x = next;
    res = next_res;
  }
  if (res <= 1e-12) return x;
  return detail::bisect_branch(i, lam);
}

inline double phi1(double lam) { return inverse_branch(1, lam); }

/// Value at the path's final level, obtained by applying its branches to the
/// seed in order.
inline double path_value(const BranchPath& path) {
  double v = path.seed;
  for (int b : path.branches) v = inverse_branch(b, v);
  return v;
}

struct EigenvalueRecord {
  BranchPath path;
  double value = 0.0;       // eigenvalue of -Delta_M
  double normalized = 0.0;  // 15^M * value
  std::int64_t multiplicity = 0;
};

/// Multiplicity of an eigenvalue born at `birth_level` with `seed`.
inline std::int64_t born_multiplicity(int birth_level, int seed) {
  if (birth_level == 1) return seed == 3 ? 2 : 1;
  const std::int64_t base = pow5(birth_level - 1);
  return seed == 3 ? base + 1 : base;
}

struct ValueCluster {
  double value = 0.0;
  std::int64_t multiplicity = 0;
};

struct Spectrum {
  int level = 0;
  std::vector<EigenvalueRecord> records;  // ascending by value

  std::int64_t total_multiplicity() const {
    std::int64_t n = 0;
    for (const auto& r : records) n += r.multiplicity;
    return n;
  }

  /// Eigenvalues of -Delta_M with repetition, ascending.
  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total_multiplicity()));
    for (const auto& r : records) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.value);
    return out;
  }

  std::vector<double> normalized_values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total_multiplicity()));
    for (const auto& r : records) {
      out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.normalized);
    }
    return out;
  }

  /// Records merged by value within `tol`, for comparison with a dense solver.
  std::vector<ValueCluster> aggregated(double tol = 1e-9) const {
    std::vector<ValueCluster> out;
    for (const auto& r : records) {
      if (!out.empty() && r.value - out.back().value <= tol) {
        out.back().multiplicity += r.multiplicity;
      } else {
        out.push_back({r.value, r.multiplicity});
      }
    }
    return out;
  }

  std::int64_t multiplicity_of(double value, double tol = 1e-9) const {
    std::int64_t n = 0;
    for (const auto& r : records) {
      if (std::abs(r.value - value) <= tol) n += r.multiplicity;
    }
    return n;
  }
};

inline constexpr int kMaxSpectrumLevel = 16;

inline Spectrum level_spectrum(int M) {
  if (M < 1) throw std::invalid_argument("level_spectrum requires M >= 1");
  if (M > kMaxSpectrumLevel) throw std::invalid_argument("level_spectrum: level too large");

  std::vector<EigenvalueRecord> cur;
  for (int seed : {0, 1, 3, 5}) {
    EigenvalueRecord r;
    r.path = {1, seed, {}};
    r.value = seed;
    r.multiplicity = born_multiplicity(1, seed);
    cur.push_back(std::move(r));
  }
  for (int m = 1; m < M; ++m) {
    std::vector<EigenvalueRecord> next;
    next.reserve(3 * cur.size() + 2);
    for (const auto& r : cur) {
      const bool zero = r.path.is_constant();
      for (int b = 1; b <= 3; ++b) {
        if (zero && b == 2) continue;
        EigenvalueRecord e;
        e.path = r.path.then(b);
        e.value = inverse_branch(b, r.value);
        e.multiplicity = r.multiplicity;
        next.push_back(std::move(e));
      }
    }
    for (int seed : {1, 3}) {
      EigenvalueRecord e;
      e.path = {m + 1, seed, {}};
      e.value = seed;
      e.multiplicity = born_multiplicity(m + 1, seed);
      next.push_back(std::move(e));
    }
    cur = std::move(next);
  }

  const double scale = level_scale(M);
  for (auto& r : cur) r.normalized = scale * r.value;
  std::sort(cur.begin(), cur.end(), [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.path < b.path;
  });
  return {M, std::move(cur)};
}

/// The block structure of the spectrum at level M >= 2: every phi_1 image is
/// at most 1, every phi_2 image lies in [1, 3], every phi_3 image is at least 5.
inline bool ordering_invariant_holds(const Spectrum& s) {
  double max1 = -1.0, min2 = 10.0, max2 = -1.0, min3 = 10.0;
  for (const auto& r : s.records) {
    if (r.path.branches.empty()) continue;
    switch (r.path.branches.back()) {
      case 1: max1 = std::max(max1, r.value); break;
      case 2:
        min2 = std::min(min2, r.value);
        max2 = std::max(max2, r.value);
        break;
      default: min3 = std::min(min3, r.value); break;
    }
  }
  const bool has2 = max2 >= 0.0;
  return max1 <= 1.0 && (!has2 || (1.0 <= min2 && max2 <= 3.0)) && 5.0 <= min3;
}

/// lim 15^m lambda_m along `path` followed by phi_1 forever.
inline double limit_eigenvalue(const BranchPath& path) {
  path.validate();
  double lam = path_value(path);
  if (lam == 0.0) return 0.0;
  int m = path.level();
  double normalized = level_scale(m) * lam;
  for (int it = 0; it < 400; ++it) {
    lam = phi1(lam);
    ++m;
    const double next = level_scale(m) * lam;
    const double update = std::abs(next / normalized - 1.0);
    normalized = next;
    if (update < 1e-14) break;
  }
  return normalized;
}

/// Normalized values 15^m lambda_m for m = path.level() .. last_level along the
/// phi_1 continuation.
inline std::vector<double> normalized_trajectory(const BranchPath& path, int last_level) {
  double lam = path_value(path);
  std::vector<double> out;
  for (int m = path.level(); m <= last_level; ++m) {
    if (m > path.level()) lam = phi1(lam);
    out.push_back(level_scale(m) * lam);
  }
  return out;
}

/// N(t): eigenvalues of 15^M (-Delta_M) not exceeding t, with multiplicity.
inline std::int64_t counting_function(const Spectrum& s, double t) {
  if (t < 0.0) throw std::invalid_argument("counting_function requires t >= 0");
  std::int64_t n = 0;
  for (const auto& r : s.records) {
    if (r.normalized > t) break;
    n += r.multiplicity;
  }
  return n;
}

inline double weyl_ratio(const Spectrum& s, double t, double exponent) {
  if (!(t > 0.0)) throw std::invalid_argument("weyl_ratio requires t > 0");
  return static_cast<double>(counting_function(s, t)) / std::pow(t, exponent);
}

/// W(t) = N(t) / t^alpha with alpha = log 15 / log 5.
inline double weyl_ratio(const Spectrum& s, double t) { return weyl_ratio(s, t, kWeylAlpha); }

struct WeylSample {
  double t = 0.0;
  std::int64_t count = 0;
  double ratio = 0.0;
};

inline std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("geometric grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

/// Weyl samples on [lo, hi]: both one-sided limits at every jump of N plus a
/// geometric grid, sorted by t (left limit first at a jump).
inline std::vector<WeylSample> weyl_samples(const Spectrum& s, double lo, double hi, int grid_points,
                                            double exponent = kWeylAlpha) {
  std::vector<WeylSample> out;
  std::int64_t below = 0;
  for (const auto& r : s.records) {
    if (r.normalized >= lo && r.normalized <= hi && r.normalized > 0.0) {
      const double w = std::pow(r.normalized, exponent);
      if (!out.empty() && out.back().t == r.normalized) {
        out.back().count += r.multiplicity;
        out.back().ratio = out.back().count / w;
      } else {
        out.push_back({r.normalized, below, below / w});
        out.push_back({r.normalized, below + r.multiplicity, (below + r.multiplicity) / w});
      }
    }
    below += r.multiplicity;
  }
  for (double t : geometric_grid(lo, hi, grid_points)) {
    const auto n = counting_function(s, t);
    out.push_back({t, n, n / std::pow(t, exponent)});
  }
  std::stable_sort(out.begin(), out.end(), [](const WeylSample& a, const WeylSample& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.count < b.count;
  });
  return out;
}

/// Smallest and largest positive normalized eigenvalues.
inline std::pair<double, double> positive_range(const Spectrum& s) {
  double lo = 0.0;
  for (const auto& r : s.records) {
    if (r.normalized > 0.0) {
      lo = r.normalized;
      break;
    }
  }
  return {lo, s.records.back().normalized};
}

/// The decade [c / sqrt 10, c sqrt 10] around the log-midpoint c of the
/// positive normalized spectrum.
inline std::pair<double, double> central_decade(const Spectrum& s) {
  const auto [lo, hi] = positive_range(s);
  const double c = std::sqrt(lo * hi);
  const double half = std::sqrt(10.0);
  return {c / half, c * half};
}

/// Least-squares slope of log N(t) against log t on a geometric grid.
inline double loglog_slope(const Spectrum& s, double lo, double hi, int points = 400) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double t : geometric_grid(lo, hi, points)) {
    const auto c = counting_function(s, t);
    if (c <= 0) continue;
    const double x = std::log(t);
    const double y = std::log(static_cast<double>(c));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("loglog_slope: not enough positive samples");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace vnle
