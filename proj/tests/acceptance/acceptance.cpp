// Acceptance suite. Prints one PASS/FAIL line per criterion; with arguments,
// runs only the listed criteria. Exit status is nonzero if any ran criterion
// failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vnle/circle_graph.hpp"
#include "vnle/decimation.hpp"
#include "vnle/eigenbasis.hpp"
#include "vnle/io.hpp"
#include "vnle/oracle.hpp"
#include "vnle/restriction.hpp"

using namespace vnle;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) { return io::format_double(v); }

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<BranchPath>& families() {
  static const std::vector<BranchPath> v = [] {
    std::vector<BranchPath> out;
    for (int seed : {1, 3, 5})
      for (int b : {1, 2, 3}) out.push_back({1, seed, {b}});
    return out;
  }();
  return v;
}

Outcome c01_matrix() {
  const auto t0 = Clock::now();
  const LevelGraph g(1);
  const auto L = laplacian_matrix(g);
  const double ms = ms_since(t0);
  const std::array<std::size_t, 5> perm{0, 1, 3, 4, 2};
  const int expected[5][5] = {{2, -1, 0, 0, -1},
                              {-1, 2, 0, 0, -1},
                              {0, 0, 2, -1, -1},
                              {0, 0, -1, 2, -1},
                              {-1, -1, -1, -1, 4}};
  int mismatches = 0;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) mismatches += L.at(perm[r], perm[c]) != expected[r][c];
  Outcome o;
  o.pass = mismatches == 0 && ms < 1.0;
  o.detail = "permutation {1,2},{3,4},{6,7},{8,9},{5,10}; mismatches=" + std::to_string(mismatches) +
             " build=" + g6(ms) + "ms";
  return o;
}

Outcome c02_oracle() {
  Outcome o;
  std::ostringstream d;
  for (Level m = 1; m <= 4; ++m) {
    const double tol = m <= 3 ? 1e-9 : 1e-8;
    const auto t0 = Clock::now();
    const auto dense = dense_spectrum(m, false);
    const auto cmp = compare_spectra(dense.eigenvalues, level_spectrum(m).values(), tol);
    o.pass = o.pass && cmp.pass;
    d << " m=" << m << ":dev=" << g6(cmp.max_deviation) << "(" << g6(ms_since(t0) / 1000.0) << "s)";
  }
  o.detail = d.str().substr(1);
  return o;
}

Outcome c03_level_one() {
  const auto v = level_spectrum(1).values();
  const std::vector<double> expected{0, 1, 3, 3, 5};
  double dev = v.size() == 5 ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, v.size()); ++i) dev = std::max(dev, std::abs(v[i] - expected[i]));
  const auto dense = dense_spectrum(1, false).eigenvalues;
  double ddev = 0.0;
  for (std::size_t i = 0; i < 5; ++i) ddev = std::max(ddev, std::abs(dense[i] - expected[i]));
  return {dev <= 1e-12 && ddev <= 1e-12, "decimation dev=" + g6(dev) + " dense dev=" + g6(ddev)};
}

Outcome c04_multiplicities() {
  Outcome o;
  std::ostringstream d;
  for (Level m = 1; m <= 4; ++m) {
    const auto s = level_spectrum(m);
    const auto clusters = cluster_eigenvalues(dense_spectrum(m, false).eigenvalues);
    const std::int64_t want1 = pow5(m - 1), want3 = pow5(m - 1) + 1;
    const auto d1 = s.multiplicity_of(1.0), d3 = s.multiplicity_of(3.0);
    const auto o1 = static_cast<std::int64_t>(cluster_multiplicity(clusters, 1.0));
    const auto o3 = static_cast<std::int64_t>(cluster_multiplicity(clusters, 3.0));
    o.pass = o.pass && d1 == want1 && d3 == want3 && o1 == want1 && o3 == want3;
    d << " m=" << m << ":mult(1)=" << d1 << "/" << o1 << " mult(3)=" << d3 << "/" << o3;
  }
  o.detail = d.str().substr(1) + " (decimation/oracle)";
  return o;
}

Outcome c05_completeness() {
  Outcome o;
  std::ostringstream d;
  GraphLadder ladder;
  for (Level m = 1; m <= 4; ++m) {
    const auto basis = full_eigenbasis(m, ladder);
    std::vector<NodeFunction> fns;
    double worst = 0.0;
    for (const auto& p : basis) {
      fns.push_back(p.function);
      worst = std::max(worst, relative_residual(ladder.at(m), p.function, p.record.value));
    }
    const auto rank = function_rank(fns);
    const auto want = static_cast<std::size_t>(pow5(m));
    o.pass = o.pass && basis.size() == want && rank == want && worst <= 1e-9;
    d << " m=" << m << ":size=" << basis.size() << " rank=" << rank << " residual=" << g6(worst);
  }
  o.detail = d.str().substr(1);
  return o;
}

Outcome c06_symmetry() {
  Outcome o;
  std::ostringstream d;
  GraphLadder ladder;
  for (Level m = 1; m <= 3; ++m) {
    const auto dims = symmetry_dimensions(full_eigenbasis(m, ladder), ladder.at(m));
    const auto q = static_cast<std::size_t>((pow5(m) - 1) / 4);
    o.pass = o.pass && dims == std::array<std::size_t, 4>{q + 1, q, q, q};
    d << " m=" << m << ":(++)=" << dims[0] << " (+-)=" << dims[1] << " (-+)=" << dims[2] << " (--)=" << dims[3];
  }
  o.detail = d.str().substr(1);
  return o;
}

Outcome c07_ordering() {
  Outcome o;
  std::ostringstream d;
  for (Level m = 1; m <= 6; ++m) {
    const bool ok = ordering_invariant_holds(level_spectrum(m));
    o.pass = o.pass && ok;
    d << " m=" << m << ":" << (ok ? "ok" : "violated");
  }
  o.detail = d.str().substr(1);
  return o;
}

Outcome c08_convergence() {
  Outcome o;
  std::vector<std::vector<double>> by_level;
  for (Level m = 3; m <= 7; ++m) by_level.push_back(level_spectrum(m).normalized_values());
  const auto s7 = level_spectrum(7);
  int non_monotone = 0;
  double worst_inc = 0.0, worst_limit = 0.0;
  // k-th eigenvalue (1-based) of level 7 and its path.
  std::vector<const EigenvalueRecord*> rec7;
  for (const auto& r : s7.records)
    for (std::int64_t i = 0; i < r.multiplicity && rec7.size() < 25; ++i) rec7.push_back(&r);
  for (std::size_t k = 0; k < 25; ++k) {
    for (std::size_t i = 1; i < by_level.size(); ++i) non_monotone += by_level[i][k] < by_level[i - 1][k];
    const double v6 = by_level[3][k], v7 = by_level[4][k];
    if (v7 > 0.0) worst_inc = std::max(worst_inc, (v7 - v6) / v7);
    const double lim = limit_eigenvalue(rec7[k]->path);
    const double rel = v7 > 0.0 ? std::abs(lim - v7) / v7 : std::abs(lim - v7);
    worst_limit = std::max(worst_limit, rel);
  }
  o.pass = non_monotone == 0 && worst_inc < 1e-3 && worst_limit <= 1e-6;
  o.detail = "non-monotone=" + std::to_string(non_monotone) + " max rel increment at m=7: " + g6(worst_inc) +
             " max rel |limit - level 7|=" + g6(worst_limit);
  return o;
}

Outcome c09_weyl_slope() {
  const auto s = level_spectrum(6);
  const auto [lo, hi] = central_decade(s);
  const double slope = loglog_slope(s, lo, hi);
  const double beta = std::log(5.0) / std::log(15.0);
  Outcome o;
  o.pass = std::abs(slope - kWeylAlpha) <= 0.05;
  o.detail = "decade [" + g6(lo) + ", " + g6(hi) + "] slope=" + g6(slope) + " target alpha=" + g6(kWeylAlpha) +
             " +-0.05; log5/log15=" + g6(beta) + " (|slope-log5/log15|=" + g6(std::abs(slope - beta)) + ")";
  return o;
}

// Mean |W(15 lam) - W(lam)| over eigenvalues lam in the upper log-half of the
// positive spectrum whose 15-fold image stays inside it.
double periodicity_residual(const Spectrum& s, double exponent, std::size_t* matched) {
  const auto [lo, hi] = positive_range(s);
  const double mid = std::sqrt(lo * hi);
  double sum = 0.0;
  std::size_t n = 0;
  double prev = -1.0;
  for (const auto& r : s.records) {
    const double t = r.normalized;
    if (t == prev || t < mid || 15.0 * t > hi) continue;
    prev = t;
    sum += std::abs(weyl_ratio(s, 15.0 * t, exponent) - weyl_ratio(s, t, exponent));
    ++n;
  }
  *matched = n;
  return n ? sum / static_cast<double>(n) : 0.0;
}

Outcome c10_weyl_bounded() {
  const auto s = level_spectrum(6);
  const auto [lo, hi] = central_decade(s);
  auto spread = [&](double exponent) {
    double wmin = 1e300, wmax = 0.0;
    for (const auto& w : weyl_samples(s, lo, hi, 400, exponent)) {
      wmin = std::min(wmin, w.ratio);
      wmax = std::max(wmax, w.ratio);
    }
    return std::pair{wmax / wmin, wmax};
  };
  const auto [ratio, wmax] = spread(kWeylAlpha);
  std::size_t matched = 0;
  const double res = periodicity_residual(s, kWeylAlpha, &matched);
  const double beta = std::log(5.0) / std::log(15.0);
  const auto [ratio_b, wmax_b] = spread(beta);
  std::size_t matched_b = 0;
  const double res_b = periodicity_residual(s, beta, &matched_b);
  Outcome o;
  o.pass = ratio < 10.0 && res < 0.1;
  o.detail = "alpha=" + g6(kWeylAlpha) + ": max/min W=" + g6(ratio) + " (max W=" + g6(wmax) + "), periodicity residual=" +
             g6(res) + " over " + std::to_string(matched) + " points; with exponent log5/log15: max/min W=" +
             g6(ratio_b) + ", residual=" + g6(res_b) + " (relative " + g6(res_b / wmax_b) + ")";
  return o;
}

Outcome c11_miniaturization() {
  GraphLadder ladder;
  const auto basis = full_eigenbasis(2, ladder);
  double worst = 0.0;
  bool exact = true;
  std::ostringstream d;
  for (std::size_t i = 1; i <= 5; ++i) {
    const auto& p = basis[i];
    const auto v = miniaturize(p.function, ladder.at(2), ladder.at(3));
    worst = std::max(worst, relative_residual(ladder.at(3), v, p.record.value));
    const double lam = path_value(p.record.path);
    const double lam_mini = path_value(v.tag->path);
    const double ratio = (level_scale(3) * lam_mini) / (level_scale(2) * lam);
    exact = exact && lam_mini == lam && level_scale(3) == 15.0 * level_scale(2) && std::abs(ratio - 15.0) <= 1e-14;
    d << " " << p.record.path.to_string() << "->" << v.tag->path.to_string();
  }
  // u_21 = u_5(5t): position 21 at level 2 carries the value at
  // position 5 of level 1.
  const bool u21 = level_spectrum(2).values()[20] == level_spectrum(1).values()[4];
  Outcome o;
  o.pass = worst <= 1e-10 && exact && u21;
  o.detail = "max residual=" + g6(worst) + " ratio 15 exact=" + (exact ? "yes" : "no") +
             " lambda_21(2)=lambda_5(1): " + (u21 ? "yes" : "no") + ";" + d.str();
  return o;
}

Outcome c12_commutation() {
  GraphLadder ladder;
  double worst = 0.0;
  std::size_t checks = 0;
  for (Level m = 1; m <= 4; ++m) {
    const auto& coarse = ladder.at(m);
    const auto& fine = ladder.at(m + 1);
    for (const auto& p : full_eigenbasis(m, ladder)) {
      const bool zero = p.record.path.is_constant();
      const auto fu = restrict(p.function, coarse);
      for (int b = 1; b <= 3; ++b) {
        if (zero && b == 2) continue;
        const auto v = extend(p.function, p.record.value, b, coarse, fine);
        const auto lhs = extend_restriction(fu, v.tag->eigenvalue);
        const auto rhs = restrict(v, fine);
        for (std::size_t k = 0; k < lhs.values.size(); ++k) worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
        ++checks;
      }
    }
  }
  return {worst <= 1e-12, "extensions checked=" + std::to_string(checks) + " max deviation=" + g6(worst)};
}

Outcome c13_lipschitz() {
  GraphLadder ladder;
  Outcome o;
  std::ostringstream d;
  for (const auto& p : families()) {
    const auto r = lipschitz_diagnostic(p, 12, ladder);
    bool finite = r.sup_difference.size() == 12;
    for (double s : r.sup_difference) finite = finite && std::isfinite(s);
    // increments[i] = |sup_{b+i+1} - sup_{b+i}|; per-level ratios from
    // level b+2 on, ignoring increments already at rounding level.
    double worst = 0.0;
    std::size_t last = 2;
    for (std::size_t i = 3; i < r.increments.size(); ++i) {
      if (r.increments[i - 1] <= 1e-13 * r.bound) break;
      worst = std::max(worst, r.increments[i] / r.increments[i - 1]);
      last = i;
    }
    const double mean_rate = std::pow(r.increments[last] / r.increments[2], 1.0 / static_cast<double>(last - 2));
    const bool ok = finite && worst <= 0.2;
    o.pass = o.pass && ok;
    d << " " << p.to_string() << ":sup=" << g6(r.bound) << ",max ratio=" << g6(worst) << ",mean=" << g6(mean_rate)
      << (ok ? "" : "!");
  }
  o.detail = d.str().substr(1);
  return o;
}

Outcome c14_derivatives() {
  GraphLadder ladder;
  constexpr Level m = 2;
  constexpr int depth = 12;
  double worst_chain = 0.0, worst_trunc = 0.0, max_gap = 0.0, worst_limit = 0.0;
  for (const auto& p : families()) {
    LambdaSequence seq(p);
    const auto deep = path_restriction(p, m + depth, ladder);
    const auto D = difference(deep, m + depth);
    for (std::size_t j = 0; j < static_cast<std::size_t>(pow3(m)); ++j) {
      const double mid = midpoint_derivative(deep, j, m, seq);
      const double mid_direct = D[chain_index(j, m, depth, DifferenceChain::Middle)];
      worst_chain = std::max(worst_chain, std::abs(mid - mid_direct) / std::max(1.0, std::abs(mid_direct)));
      for (auto chain : {DifferenceChain::Right, DifferenceChain::Middle, DifferenceChain::Left}) {
        const double direct = D[chain_index(j, m, depth, chain)];
        const double iterated = iterate_difference_chain(deep, j, m, depth, chain, seq);
        worst_chain = std::max(worst_chain, std::abs(iterated - direct) / std::max(1.0, std::abs(direct)));
      }
      const auto os = one_sided_derivatives(deep, j, m, seq);
      for (auto [limit, chain] : {std::pair{os.right, DifferenceChain::Right}, std::pair{os.left, DifferenceChain::Left}}) {
        const double direct = D[chain_index(j, m, depth, chain)];
        worst_limit = std::max(worst_limit, std::abs(limit - direct) / std::max(1.0, std::abs(direct)));
      }
      max_gap = std::max(max_gap, std::abs(os.gap));
    }
    for (Level k = m + 1; k <= 12; ++k) {
      constexpr int K = 20;
      const double a = a_coeff(k, seq, K), a5 = a_coeff(k, seq, K + 5);
      const double b = b_coeff(k, seq, K), b5 = b_coeff(k, seq, K + 5);
      worst_trunc = std::max({worst_trunc, std::abs(a5 - a) / std::abs(a), std::abs(b5 - b) / std::abs(b)});
    }
  }
  Outcome o;
  o.pass = worst_chain <= 1e-8 && worst_trunc <= 1e-12;
  o.detail = "max rel deviation (midpoint identity, iterated chains)=" + g6(worst_chain) +
             " truncation change=" + g6(worst_trunc) + "; reported only: one-sided limits vs depth-12 chain=" +
             g6(worst_limit) + ", max |right - left| at level-2 points=" + g6(max_gap);
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> c = {
      {1, {"exact level-1 matrix", c01_matrix}},
      {2, {"decimation matches dense oracle, m<=4", c02_oracle}},
      {3, {"level-1 spectrum {0,1,3,3,5}", c03_level_one}},
      {4, {"multiplicities of 1 and 3", c04_multiplicities}},
      {5, {"eigenbasis completeness, m<=4", c05_completeness}},
      {6, {"symmetry type dimensions", c06_symmetry}},
      {7, {"branch ordering invariant, m<=6", c07_ordering}},
      {8, {"monotone normalized convergence", c08_convergence}},
      {9, {"Weyl log-log slope", c09_weyl_slope}},
      {10, {"Weyl ratio bounded and periodic", c10_weyl_bounded}},
      {11, {"miniaturization", c11_miniaturization}},
      {12, {"restriction commutes with extension", c12_commutation}},
      {13, {"Lipschitz diagnostics", c13_lipschitz}},
      {14, {"derivative formula consistency", c14_derivatives}},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [k, _] : criteria()) which.push_back(k);

  int failed = 0;
  for (int k : which) {
    const auto it = criteria().find(k);
    if (it == criteria().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = it->second.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s C%02d %s | %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k, it->second.title, o.detail.c_str(),
                ms_since(t0) / 1000.0);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
