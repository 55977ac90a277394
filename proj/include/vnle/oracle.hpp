#pragma once

// Brute-force verification: dense symmetric eigen-decomposition of -Delta_m.
// Nothing here touches the decimation code; the matrix comes straight from
// the graph.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vnle/circle_graph.hpp"

namespace vnle {

/// Row-major dense square matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  bool symmetric(double tol = 0.0) const {
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = r + 1; c < n_; ++c)
        if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix dense_laplacian(const LevelGraph& g) {
  const auto L = laplacian_matrix(g);
  DenseMatrix A(L.dimension);
  for (const auto& e : L.entries) A(e.row, e.col) = e.value;
  return A;
}

struct Eigensystem {
  std::vector<double> values;        // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]; empty if not requested
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// `off_tol` times the matrix norm.
inline Eigensystem jacobi_eigensystem(DenseMatrix a, bool want_vectors, double off_tol = 1e-12,
                                      int max_sweeps = 100) {
  if (!a.symmetric(1e-14)) throw std::invalid_argument("jacobi_eigensystem: matrix is not symmetric");
  const std::size_t n = a.size();
  DenseMatrix v;
  if (want_vectors) {
    v = DenseMatrix(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) total += a(r, c) * a(r, c);
  const double norm = std::sqrt(total);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) s += a(r, c) * a(r, c);
    return std::sqrt(2.0 * s);
  };

  Eigensystem out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    if (off_norm() <= off_tol * norm) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  if (off_norm() > off_tol * norm) throw std::runtime_error("jacobi_eigensystem: no convergence");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  for (std::size_t k : order) {
    out.values.push_back(a(k, k));
    if (want_vectors) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
      out.vectors.push_back(std::move(col));
    }
  }
  return out;
}

struct DenseSpectrum {
  Level level = 0;
  std::vector<double> eigenvalues;  // ascending, length 5^m
  std::vector<std::vector<double>> eigenvectors;
  double reconstruction_error = 0.0;  // ||Q diag Q^T - L||_inf when vectors were requested
};

inline constexpr Level kDenseLevelCap = 4;

inline DenseSpectrum dense_spectrum(Level m, bool want_vectors, Level cap = kDenseLevelCap) {
  if (m < 1) throw std::invalid_argument("dense_spectrum requires m >= 1");
  if (m > cap) {
    throw std::invalid_argument("dense_spectrum: level " + std::to_string(m) + " exceeds cap " +
                                std::to_string(cap));
  }
  const LevelGraph g(m);
  const DenseMatrix L = dense_laplacian(g);
  Eigensystem es = jacobi_eigensystem(L, want_vectors);
  DenseSpectrum out;
  out.level = m;
  out.eigenvalues = std::move(es.values);
  if (want_vectors) {
    const std::size_t n = L.size();
    double err = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += es.vectors[k][r] * out.eigenvalues[k] * es.vectors[k][c];
        row += std::abs(s - L(r, c));
      }
      err = std::max(err, row);
    }
    out.reconstruction_error = err;
    out.eigenvectors = std::move(es.vectors);
  }
  return out;
}

/// ||(-Delta_m) u - lam u||_inf / max(1, ||u||_inf).
template <class Values>
double residual(const LevelGraph& g, const Values& u, double lam) {
  double worst = 0.0;
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (std::size_t z : g.neighbors(i)) s += u[i] - u[z];
    worst = std::max(worst, std::abs(s - lam * u[i]));
    sup = std::max(sup, std::abs(static_cast<double>(u[i])));
  }
  return worst / std::max(1.0, sup);
}

/// Same residual scaled by ||u||_inf alone.
template <class Values>
double relative_residual(const LevelGraph& g, const Values& u, double lam) {
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, std::abs(static_cast<double>(u[i])));
  if (sup == 0.0) return 0.0;
  return residual(g, u, lam) * std::max(1.0, sup) / sup;
}

struct SpectrumComparison {
  double max_deviation = 0.0;
  std::size_t worst_index = 0;
  double tolerance = 0.0;
  bool pass = false;
};

inline SpectrumComparison compare_spectra(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("compare_spectra: lengths differ (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  SpectrumComparison r;
  r.tolerance = tol;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > r.max_deviation) {
      r.max_deviation = d;
      r.worst_index = i;
    }
  }
  r.pass = r.max_deviation <= tol;
  return r;
}

struct EigenCluster {
  double value = 0.0;  // mean of the members
  std::size_t multiplicity = 0;
};

/// Groups sorted eigenvalues whose consecutive gaps are below `gap`.
inline std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& sorted, double gap = 1e-7) {
  std::vector<EigenCluster> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] - sorted[i - 1] > gap) {
      if (!out.empty()) out.back().value = sum / static_cast<double>(out.back().multiplicity);
      out.push_back({0.0, 0});
      sum = 0.0;
    }
    sum += sorted[i];
    ++out.back().multiplicity;
  }
  if (!out.empty()) out.back().value = sum / static_cast<double>(out.back().multiplicity);
  return out;
}

inline std::size_t cluster_multiplicity(const std::vector<EigenCluster>& clusters, double value, double tol = 1e-7) {
  for (const auto& c : clusters)
    if (std::abs(c.value - value) <= tol) return c.multiplicity;
  return 0;
}

}  // namespace vnle
