#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "cvscramble/types.hpp"
#include "record.hpp"

using namespace cvscramble::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, TableCsvIsExact) {
  Table t({"a", "b"});
  t.add_row({0.1, 1.0 / 3.0});
  EXPECT_EQ(t.to_csv(), "a,b\n0.10000000000000001,0.33333333333333331\n");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

TEST(Cli, NanBecomesJsonNull) {
  Table t({"x"});
  t.add_row({std::numeric_limits<double>::quiet_NaN()});
  EXPECT_TRUE(t.to_json()["rows"][0][0].is_null());
}

TEST(Cli, GateCheckPasses) {
  GateCheckParams p;
  p.trials = 30;
  const auto rec = run_gate_check(p);
  EXPECT_TRUE(rec.reports["all_pass"].get<bool>());
}

TEST(Cli, SameSeedSameBytes) {
  SingleWalkParams p;
  p.T = 100;
  p.samples = 200;
  const auto a = run_single_walk(p);
  const auto b = run_single_walk(p);
  EXPECT_EQ(a.digest(), b.digest());
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t k = 0; k < a.tables.size(); ++k)
    EXPECT_EQ(a.table_csv(a.tables[k].second), b.table_csv(b.tables[k].second));
  p.seed = 2;
  EXPECT_NE(run_single_walk(p).digest(), a.digest());
}

TEST(Cli, BrickworkDeterministic) {
  BrickworkParams p;
  p.L = 30;
  p.T = 20;
  p.samples = 20;
  p.entanglement = true;
  p.eval_every = 5;
  EXPECT_EQ(run_brickwork(p).digest(), run_brickwork(p).digest());
}

TEST(Cli, ProvenanceColumns) {
  SingleWalkParams p;
  p.T = 10;
  p.samples = 10;
  p.seed = 77;
  const auto rec = run_single_walk(p);
  const auto csv = rec.table_csv(rec.tables.front().second);
  const auto header = csv.substr(0, csv.find('\n'));
  EXPECT_NE(header.find(",seed,samples"), std::string::npos) << header;
  const auto first = csv.substr(csv.find('\n') + 1);
  EXPECT_NE(first.find(",77,10\n"), std::string::npos);

  OtocCubicParams c;
  c.dcut = 60;
  c.steps = 2;
  const auto rc = run_otoc_cubic(c);
  const auto h = rc.table_csv(rc.tables.front().second);
  EXPECT_NE(h.substr(0, h.find('\n')).find("d_cut,max_tail"), std::string::npos);
}

TEST(Cli, WriteRecord) {
  const auto dir = std::filesystem::temp_directory_path() / "cvscramble_cli_test";
  std::filesystem::remove_all(dir);
  SingleWalkParams p;
  p.T = 10;
  p.samples = 10;
  const auto rec = run_single_walk(p);
  write_record(rec, dir.string());
  const auto json = nlohmann::json::parse(slurp(dir / "single-walk.json"));
  EXPECT_EQ(json["command"], "single-walk");
  EXPECT_EQ(json["digest"], hex64(rec.digest()));
  for (const auto& [name, t] : rec.tables) EXPECT_EQ(slurp(dir / ("single-walk_" + name + ".csv")), rec.table_csv(t));
  std::filesystem::remove_all(dir);
}

TEST(Cli, ParameterErrors) {
  TeleportParams t;
  t.m = 1.0;
  EXPECT_THROW(run_teleport(t), cvscramble::ParameterError);
  SingleWalkParams s;
  s.T = -1;
  EXPECT_THROW(run_single_walk(s), cvscramble::ParameterError);
}

TEST(Cli, CubicFockAgreesWithClosedForm) {
  OtocCubicParams p;
  p.dcut = 100;
  const auto rec = run_otoc_cubic(p);
  const auto* t = rec.find("curve");
  ASSERT_NE(t, nullptr);
  for (const auto& r : t->rows()) EXPECT_NEAR(r[6], r[3], 0.02 * r[3]);
}
