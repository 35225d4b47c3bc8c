#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tubewha/builtins.hpp"
#include "tubewha/decompose.hpp"
#include "tubewha/report.hpp"
#include "tubewha/tube.hpp"

using namespace tubewha;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tubewha_report_" + name)).string();
}

}  // namespace

TEST(Report, DumpRoundTrip) {
  auto W = build_tube_algebra(fibonacci_category());
  W.haar_dual = solve_dual_haar(W).lambda;
  Manifest m;
  m.command = "build";
  m.args = {"build", "--category", "builtin:fibonacci"};
  m.category = "fibonacci";
  m.seed = 17;
  m.results["dim"] = W.dim;
  std::string p = tmp_path("fib.dump");
  write_dump(W, m, p);
  auto [R, rm] = read_dump(p);
  std::filesystem::remove(p);
  EXPECT_EQ(R.dim, W.dim);
  EXPECT_LT(R.mult.max_abs_diff(W.mult), 1e-15);
  EXPECT_LT(R.comult.max_abs_diff(W.comult), 1e-15);
  EXPECT_LT((R.unit - W.unit).norm(), 1e-15);
  EXPECT_LT((R.counit - W.counit).norm(), 1e-15);
  EXPECT_LT((MatC(R.antipode) - MatC(W.antipode)).norm(), 1e-15);
  EXPECT_LT((R.haar - W.haar).norm(), 1e-15);
  EXPECT_LT((R.haar_dual - W.haar_dual).norm(), 1e-15);
  EXPECT_EQ(R.basis_names, W.basis_names);
  EXPECT_EQ(algebra_fingerprint(R), algebra_fingerprint(W));
  EXPECT_EQ(rm.args, m.args);
  EXPECT_EQ(rm.seed, 17u);
  EXPECT_EQ(rm.results["dim"], 13);
}

TEST(Report, DumpParseErrors) {
  std::string p = tmp_path("bad.dump");
  std::ofstream(p) << "mult 0 0 0 1 0\n";
  EXPECT_THROW(read_dump(p), ParseError);
  std::ofstream(p) << "dim 2\nmult 0 5 0 1 0\n";
  EXPECT_THROW(read_dump(p), ParseError);
  std::ofstream(p) << "dim 2\nbogus 1\n";
  EXPECT_THROW(read_dump(p), ParseError);
  std::filesystem::remove(p);
  EXPECT_THROW(read_dump(p), ParseError);
}

TEST(Report, DiffResults) {
  nlohmann::json a = {{"x", 1.0}, {"n", 3}, {"s", "ok"}, {"v", {1, 2}}};
  nlohmann::json b = nlohmann::json::parse(a.dump());
  std::vector<std::string> out;
  diff_results(a, b, 1e-12, "", out);
  EXPECT_TRUE(out.empty());
  b["x"] = 1.0 + 1e-9;
  b["n"] = 4;
  b["v"] = {1};
  b["extra"] = true;
  diff_results(a, b, 1e-12, "", out);
  EXPECT_EQ(out.size(), 4u);
  out.clear();
  diff_results(a, b, 1e-6, "", out);
  EXPECT_EQ(out.size(), 3u);
}

TEST(Report, ManifestJsonRoundTrip) {
  Manifest m;
  m.command = "lattice";
  m.args = {"lattice", "--n", "2"};
  m.seed = 5;
  m.pass = true;
  m.tolerances["projector"] = 1e-8;
  Manifest r = Manifest::from_json(m.to_json());
  EXPECT_EQ(r.command, m.command);
  EXPECT_EQ(r.args, m.args);
  EXPECT_EQ(r.seed, m.seed);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.tolerances, m.tolerances);
  EXPECT_THROW(Manifest::from_json(nlohmann::json::object()), ParseError);
}
