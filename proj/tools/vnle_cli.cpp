// vnle: spectra, eigenfunctions and restrictions for the Vicsek set with no
// loose ends. See README.md for usage.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vnle/branch_path.hpp"
#include "vnle/circle_graph.hpp"
#include "vnle/decimation.hpp"
#include "vnle/eigenbasis.hpp"
#include "vnle/io.hpp"
#include "vnle/oracle.hpp"
#include "vnle/restriction.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int level = 1;
  bool normalized = false;
  std::vector<int> levels;
  std::string path;
  std::optional<std::int64_t> index;
  std::size_t basis_index = 0;
  std::string layout = "circle";
  std::string out;
  std::string format = "csv";
  double tol = -1.0;  // per-command default when negative
  int depth = 8;
  int sample_level = 2;
  double lo = 0.0, hi = 0.0;
  int points = 400;
  double exponent = vnle::kWeylAlpha;
  double perturb = 0.0;
};

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j{{"command", c.command}, {"level", c.level}, {"format", c.format}};
  if (c.command == "spectrum") {
    j["normalized"] = c.normalized;
    if (!c.levels.empty()) j["levels"] = c.levels;
  } else if (c.command == "weyl") {
    j["lo"] = c.lo;
    j["hi"] = c.hi;
    j["points"] = c.points;
    j["exponent"] = c.exponent;
  } else if (c.command == "eigen") {
    if (c.index) j["index"] = *c.index;
    if (!c.path.empty()) j["path"] = c.path;
    j["basis_index"] = c.basis_index;
    j["layout"] = c.layout;
  } else if (c.command == "restrict") {
    j["path"] = c.path;
    j["depth"] = c.depth;
    j["sample_level"] = c.sample_level;
    j["basis_index"] = c.basis_index;
  } else if (c.command == "verify") {
    j["perturb"] = c.perturb;
  }
  return j;
}

// Writes `body` to --out (plus a .meta.json sidecar) or to stdout.
void emit(const RunConfig& cfg, const std::string& body, const nlohmann::json& tolerances,
          const nlohmann::json& extra = nlohmann::json::object()) {
  if (cfg.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw BadInput("cannot open output file " + cfg.out);
  f << body;
  nlohmann::json meta{{"tool", "vnle"}, {"version", kVersion}, {"config", config_json(cfg)},
                      {"tolerances", tolerances}};
  if (!extra.empty()) meta["summary"] = extra;
  std::ofstream m(cfg.out + ".meta.json", std::ios::binary);
  m << meta.dump(2) << '\n';
}

void require_level(int m, int lo, int hi, const char* what) {
  if (m < lo || m > hi) {
    throw BadInput(std::string(what) + ": level must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

void require_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw BadInput("format must be csv or json");
}

int cmd_spectrum(const RunConfig& cfg) {
  require_format(cfg);
  std::ostringstream os;
  if (!cfg.levels.empty()) {
    std::vector<vnle::Spectrum> ss;
    for (int m : cfg.levels) {
      require_level(m, 1, 9, "spectrum table");
      ss.push_back(vnle::level_spectrum(m));
    }
    if (cfg.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& s : ss) j.push_back({{"level", s.level}, {"values", cfg.normalized ? s.normalized_values() : s.values()}});
      os << j.dump(2) << '\n';
    } else {
      vnle::io::write_spectrum_table_csv(os, ss, cfg.normalized);
    }
  } else {
    require_level(cfg.level, 1, vnle::kMaxSpectrumLevel, "spectrum");
    const auto s = vnle::level_spectrum(cfg.level);
    if (cfg.format == "json") {
      os << vnle::io::spectrum_to_json(s).dump(2) << '\n';
    } else if (cfg.normalized) {
      vnle::io::write_spectrum_csv(os, s);
    } else {
      // Plain listing with repetition, one eigenvalue per row.
      os << "k,value\n";
      std::size_t k = 1;
      for (double v : s.values()) os << k++ << ',' << vnle::io::format_double(v) << '\n';
    }
  }
  emit(cfg, os.str(), {{"inverse_branch_residual", 1e-12}, {"cluster", 1e-9}});
  return 0;
}

int cmd_weyl(const RunConfig& cfg) {
  require_level(cfg.level, 1, vnle::kMaxSpectrumLevel, "weyl");
  const auto s = vnle::level_spectrum(cfg.level);
  auto [lo, hi] = vnle::positive_range(s);
  if (cfg.lo > 0.0) lo = cfg.lo;
  if (cfg.hi > 0.0) hi = cfg.hi;
  if (!(lo > 0.0) || !(hi > lo)) throw BadInput("weyl: need 0 < lo < hi");
  if (cfg.points < 2) throw BadInput("weyl: need at least 2 grid points");
  const auto samples = vnle::weyl_samples(s, lo, hi, cfg.points, cfg.exponent);
  const double slope = vnle::loglog_slope(s, lo, hi, cfg.points);
  std::ostringstream os;
  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : samples) rows.push_back({{"t", w.t}, {"N", w.count}, {"W", w.ratio}});
    os << nlohmann::json{{"level", cfg.level}, {"exponent", cfg.exponent}, {"slope", slope}, {"samples", rows}}.dump(2)
       << '\n';
  } else {
    require_format(cfg);
    vnle::io::write_weyl_csv(os, samples);
  }
  emit(cfg, os.str(), nlohmann::json::object(), {{"loglog_slope", slope}, {"lo", lo}, {"hi", hi}});
  return 0;
}

// Path and position inside its eigenspace for a 1-based spectral index.
std::pair<vnle::BranchPath, std::size_t> path_for_index(int level, std::int64_t index) {
  const auto s = vnle::level_spectrum(level);
  if (index < 1 || index > s.total_multiplicity()) {
    throw BadInput("index must be in [1, " + std::to_string(s.total_multiplicity()) + "] at level " +
                   std::to_string(level));
  }
  std::int64_t first = 1;
  for (const auto& r : s.records) {
    if (index < first + r.multiplicity) return {r.path, static_cast<std::size_t>(index - first)};
    first += r.multiplicity;
  }
  throw BadInput("index not found");
}

vnle::BranchPath parse_path(const std::string& text) {
  try {
    return vnle::parse_branch_path(text);
  } catch (const std::invalid_argument& e) {
    throw BadInput(e.what());
  }
}

int cmd_eigen(const RunConfig& cfg) {
  require_level(cfg.level, 1, 8, "eigen");
  if (cfg.index.has_value() == !cfg.path.empty()) throw BadInput("eigen: give exactly one of --index or --path");
  vnle::BranchPath path;
  std::size_t basis_index = cfg.basis_index;
  if (cfg.index) {
    std::tie(path, basis_index) = path_for_index(cfg.level, *cfg.index);
  } else {
    path = parse_path(cfg.path);
  }
  if (path.level() > cfg.level) throw BadInput("eigen: path ends above --level");
  vnle::GraphLadder ladder;
  const auto u = vnle::limit_eigenfunction(path, cfg.level, ladder, basis_index);
  const auto& g = ladder.at(cfg.level);
  const double res = vnle::relative_residual(g, u, u.tag->eigenvalue);
  std::ostringstream os;
  if (cfg.format == "json") {
    os << nlohmann::json{{"level", cfg.level},
                         {"path", u.tag->path.to_string()},
                         {"eigenvalue", u.tag->eigenvalue},
                         {"normalized", vnle::level_scale(cfg.level) * u.tag->eigenvalue},
                         {"residual", res},
                         {"symmetry", vnle::symmetry_type(u, g).label()},
                         {"values", u.values}}
              .dump(2)
       << '\n';
  } else if (cfg.layout == "circle") {
    require_format(cfg);
    vnle::io::write_circle_csv(os, u, g);
  } else if (cfg.layout == "vertices") {
    require_format(cfg);
    vnle::io::write_eigenfunction_csv(os, u, g);
  } else {
    throw BadInput("layout must be circle or vertices");
  }
  emit(cfg, os.str(), {{"residual", res}},
       {{"path", u.tag->path.to_string()}, {"basis_index", basis_index}, {"eigenvalue", u.tag->eigenvalue}});
  return 0;
}

int cmd_restrict(const RunConfig& cfg) {
  if (cfg.path.empty()) throw BadInput("restrict: --path is required");
  require_format(cfg);
  const auto path = parse_path(cfg.path);
  require_level(cfg.depth, path.level(), 13, "restrict depth");
  vnle::GraphLadder ladder;
  std::ostringstream os;
  if (cfg.format == "csv") {
    vnle::io::write_restriction_csv(os, vnle::path_restriction(path, cfg.depth, ladder, cfg.basis_index));
    emit(cfg, os.str(), {{"sandwich_singularity", 1e-12}});
    return 0;
  }
  const auto report = vnle::lipschitz_diagnostic(path, cfg.depth, ladder, cfg.basis_index);
  const auto f = vnle::path_restriction(path, cfg.depth, ladder, cfg.basis_index);
  const int sl = cfg.sample_level;
  require_level(sl, path.birth_level, cfg.depth, "restrict sample level");
  vnle::LambdaSequence seq(path);
  std::vector<vnle::io::DerivativeSample> samples;
  try {
    for (std::size_t j = 0; j < static_cast<std::size_t>(vnle::pow3(sl)); ++j) {
      samples.push_back({j, sl, vnle::midpoint_derivative(f, j, sl, seq), vnle::one_sided_derivatives(f, j, sl, seq)});
    }
  } catch (const std::domain_error&) {
    samples.clear();  // eigenvalue 1 or 3 still in the product range
  }
  os << vnle::io::diagnostics_to_json(report, samples).dump(2) << '\n';
  emit(cfg, os.str(), {{"product_factor", 1e-16}, {"max_product_terms", vnle::detail::kMaxProductTerms}});
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.level < 1) throw BadInput("verify: level must be >= 1");
  if (cfg.level > vnle::kDenseLevelCap) {
    throw BadInput("verify: level " + std::to_string(cfg.level) + " exceeds the dense oracle cap " +
                   std::to_string(vnle::kDenseLevelCap));
  }
  bool ok = true;
  std::ostringstream os;
  os << "level,dimension,max_deviation,tolerance,mult_1,mult_3,result\n";
  for (int m = 1; m <= cfg.level; ++m) {
    const double tol = cfg.tol > 0 ? cfg.tol : (m <= 3 ? 1e-9 : 1e-8);
    const auto dense = vnle::dense_spectrum(m, false);
    auto dec = vnle::level_spectrum(m).values();
    if (cfg.perturb != 0.0) dec.back() += cfg.perturb;
    const auto cmp = vnle::compare_spectra(dense.eigenvalues, dec, tol);
    const auto clusters = vnle::cluster_eigenvalues(dense.eigenvalues);
    const auto m1 = vnle::cluster_multiplicity(clusters, 1.0);
    const auto m3 = vnle::cluster_multiplicity(clusters, 3.0);
    const bool pass = cmp.pass && static_cast<std::int64_t>(m1) == vnle::pow5(m - 1) &&
                      static_cast<std::int64_t>(m3) == vnle::pow5(m - 1) + 1;
    ok = ok && pass;
    os << m << ',' << dense.eigenvalues.size() << ',' << vnle::io::format_double(cmp.max_deviation) << ','
       << vnle::io::format_double(tol) << ',' << m1 << ',' << m3 << ',' << (pass ? "PASS" : "FAIL") << '\n';
  }
  emit(cfg, os.str(), {{"spectrum", cfg.tol > 0 ? nlohmann::json(cfg.tol) : nlohmann::json("1e-9 (m<=3), 1e-8 (m=4)")},
                       {"cluster_gap", 1e-7}},
       {{"pass", ok}});
  if (!cfg.out.empty()) std::cout << os.str();
  return ok ? 0 : 1;
}

int cmd_graph(const RunConfig& cfg) {
  require_level(cfg.level, 1, 8, "graph");
  require_format(cfg);
  const vnle::LevelGraph g(cfg.level);
  std::ostringstream os;
  if (cfg.format == "json") {
    os << vnle::io::graph_to_json(g).dump(2) << '\n';
  } else {
    vnle::io::write_laplacian_csv(os, vnle::laplacian_matrix(g));
  }
  emit(cfg, os.str(), nlohmann::json::object());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis on the Vicsek set with no loose ends"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-m,--level", cfg.level, "Graph level m");
    sub->add_option("--out", cfg.out, "Output file (stdout if omitted); writes <out>.meta.json alongside");
    sub->add_option("--format", cfg.format, "csv or json");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of -Delta_m with multiplicity and branch paths");
  spectrum->add_flag("--normalized", cfg.normalized, "Scale by 15^m and list records with paths");
  spectrum->add_option("--levels", cfg.levels, "Side-by-side table of several levels")->delimiter(',');

  auto* weyl = app.add_subcommand("weyl", "Counting function and Weyl ratio samples");
  weyl->add_option("--lo", cfg.lo, "Lower end of the t range");
  weyl->add_option("--hi", cfg.hi, "Upper end of the t range");
  weyl->add_option("--points", cfg.points, "Geometric grid size");
  weyl->add_option("--exponent", cfg.exponent, "Exponent in W(t) = N(t) / t^exponent");

  auto* eigen = app.add_subcommand("eigen", "Eigenfunction values on the circle");
  eigen->add_option("--index", cfg.index, "1-based position in the sorted spectrum");
  eigen->add_option("--path", cfg.path, "Branch path seed@birth:i,i,...");
  eigen->add_option("--basis-index", cfg.basis_index, "Member of a born eigenspace (with --path)");
  eigen->add_option("--layout", cfg.layout, "circle (every circle point) or vertices");

  auto* restrict = app.add_subcommand("restrict", "Restriction to the central circle and derivative diagnostics");
  restrict->add_option("--path", cfg.path, "Branch path seed@birth:i,i,...");
  restrict->add_option("--depth", cfg.depth, "Level carried to");
  restrict->add_option("--sample-level", cfg.sample_level, "Level of derivative samples (json)");
  restrict->add_option("--basis-index", cfg.basis_index, "Member of a born eigenspace");

  auto* verify = app.add_subcommand("verify", "Compare decimation against the dense oracle");
  verify->add_option("--tol", cfg.tol, "Spectrum tolerance override");
  verify->add_option("--perturb", cfg.perturb, "Shift added to the largest decimation eigenvalue");

  auto* graph = app.add_subcommand("graph", "Vertices and adjacency (json) or Laplacian entries (csv)");

  common(spectrum);
  common(weyl);
  common(eigen);
  common(restrict);
  common(verify);
  common(graph);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Defaults differ per subcommand; options write into the shared config, so
  // fall back when the user did not set --level.
  auto* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (sub->count("--level") == 0) {
    cfg.level = cfg.command == "weyl" ? 6 : cfg.command == "eigen" ? 2 : cfg.command == "verify" ? 3 : 1;
  }
  if (cfg.command == "restrict" && restrict->count("--depth") == 0) cfg.depth = 8;

  try {
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "weyl") return cmd_weyl(cfg);
    if (cfg.command == "eigen") return cmd_eigen(cfg);
    if (cfg.command == "restrict") return cmd_restrict(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    return cmd_graph(cfg);
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
