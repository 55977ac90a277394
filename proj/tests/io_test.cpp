#include <gtest/gtest.h>

#include <sstream>

#include "vnle/io.hpp"

using namespace vnle;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.0, 1.0, -0.25, 0.1, 1.0 / 3.0, 6.17e7, 1e-300}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(15.0), "15");
}

TEST(SpectrumCsv, LevelOne) {
  std::ostringstream os;
  io::write_spectrum_csv(os, level_spectrum(1));
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "index,value,normalized,multiplicity,birth_level,seed,branch_string");
  EXPECT_EQ(l[1], "1,0,0,1,1,0,\"\"");
  EXPECT_EQ(l[3], "3,3,45,2,1,3,\"\"");
  EXPECT_EQ(l[4], "5,5,75,1,1,5,\"\"");
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

TEST(SpectrumCsv, BranchStringsAreQuoted) {
  std::ostringstream os;
  io::write_spectrum_csv(os, level_spectrum(3));
  EXPECT_NE(os.str().find(",\"1,3\"\n"), std::string::npos);
}

TEST(SpectrumJson, Shape) {
  const auto j = io::spectrum_to_json(level_spectrum(2));
  EXPECT_EQ(j["level"], 2);
  EXPECT_EQ(j["total_multiplicity"], 25);
  EXPECT_EQ(j["records"].size(), 13u);
  EXPECT_EQ(j["records"][0]["path"], "0@1:1");
}

TEST(SpectrumTable, PadsShortLevels) {
  std::ostringstream os;
  io::write_spectrum_table_csv(os, {level_spectrum(1), level_spectrum(2)}, false);
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 26u);
  EXPECT_EQ(l[0], "k,level_1,level_2");
  EXPECT_EQ(l[6], "6,,1");
}

TEST(LaplacianCsv, Entries) {
  std::ostringstream os;
  io::write_laplacian_csv(os, laplacian_matrix(LevelGraph(1)));
  const auto l = lines(os.str());
  EXPECT_EQ(l[0], "row,col,value");
  EXPECT_EQ(l.size(), 1u + 17u);
  EXPECT_EQ(l[1], "0,0,2");
}

TEST(FunctionCsv, VerticesAndCircle) {
  GraphLadder ladder;
  const auto u = seed_function({1, 5, {}}, ladder);
  std::ostringstream a, b;
  io::write_eigenfunction_csv(a, u, ladder.at(1));
  io::write_circle_csv(b, u, ladder.at(1));
  const auto la = lines(a.str()), lb = lines(b.str());
  EXPECT_EQ(la.size(), 6u);
  EXPECT_EQ(la[3], "5,1,1");
  EXPECT_EQ(la[1], "1,1,-0.25");
  EXPECT_EQ(lb.size(), 11u);
  EXPECT_EQ(lb[0], "n,t,value");
  EXPECT_EQ(lb[10], "10,1,1");
}

TEST(RestrictionCsv, Rows) {
  GraphLadder ladder;
  std::ostringstream os;
  io::write_restriction_csv(os, path_restriction({1, 5, {}}, 1, ladder));
  EXPECT_EQ(os.str(), "k,m,t,f\n0,1,0,1\n1,1,0.33333333333333331,-0.25\n2,1,0.66666666666666663,-0.25\n3,1,1,1\n");
}

TEST(Diagnostics, Json) {
  GraphLadder ladder;
  const BranchPath p{1, 1, {2}};
  const auto r = lipschitz_diagnostic(p, 5, ladder);
  const auto f = path_restriction(p, 5, ladder);
  LambdaSequence seq(p);
  std::vector<io::DerivativeSample> samples{{1, 2, midpoint_derivative(f, 1, 2, seq), one_sided_derivatives(f, 1, 2, seq)}};
  const auto j = io::diagnostics_to_json(r, samples);
  EXPECT_EQ(j["path"], "1@1:2");
  EXPECT_EQ(j["sup_D"].size(), 5u);
  EXPECT_EQ(j["coefficients"].size(), 4u);
  EXPECT_EQ(j["derivatives"][0]["j"], 1);
  EXPECT_DOUBLE_EQ(j["derivatives"][0]["midpoint_t"].get<double>(), 1.5 / 9.0);
}
