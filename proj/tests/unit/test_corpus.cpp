#include <gtest/gtest.h>

#include <fstream>

#include "surrogate/corpus.hpp"
#include "test_support.hpp"

using namespace surrogate;
using surrogate::testing::TempDir;
using surrogate::testing::thrown_code;

namespace {

ParameterSchema schema() {
  return ParameterSchema({ParameterDecl::continuous("tax", 0.0, 2.0), ParameterDecl::boolean("fpm")}, {"POA", "RIO"});
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

const char* kAverages =
    "month,qli,gdp_index,unemployment,gini\n"
    "0,0.5,1.0,0.5,0.5\n"
    "1,0.6,1.1,0.4,0.45\n";

void write_config(const std::filesystem::path& dir, double tax, bool fpm, const std::string& acp,
                  const std::string& averages = kAverages) {
  write(dir / "config.json", nlohmann::json{{"tax", tax}, {"fpm", fpm}, {"acp", acp}}.dump());
  write(dir / "averages.csv", averages);
}

}  // namespace

TEST(Averages, FinalMonthPicksLargestMonth) {
  std::string text = "month,qli,gdp_index,unemployment,gini\n";
  for (int m = 0; m <= 239; ++m) {
    text += std::to_string(m) + "," + std::to_string(m / 300.0) + ",1,0.5,0.25\n";
  }
  const auto out = final_month(parse_averages(text));
  EXPECT_EQ(out.month, 239);
  EXPECT_DOUBLE_EQ(out.qli, std::stod(std::to_string(239 / 300.0)));
}

TEST(Averages, ShuffledMonths) {
  const auto t = parse_averages(
      "month,qli,gdp_index,unemployment,gini\n"
      "5,0.1,1,0.1,0.1\n"
      "9,0.9,1,0.2,0.3\n"
      "2,0.2,1,0.3,0.3\n");
  const auto out = final_month(t);
  EXPECT_EQ(out.month, 9);
  EXPECT_EQ(out.qli, 0.9);
  EXPECT_EQ(out.unemployment, 0.2);
}

TEST(Averages, SingleRow) {
  const auto out = final_month(parse_averages("month,unemployment,qli,gini,gdp_index\n3,0.1,0.2,0.3,1.5\n"));
  EXPECT_EQ(out, (OutcomeMetrics{0.2, 1.5, 0.1, 0.3, 3}));
}

TEST(Averages, MalformedInput) {
  EXPECT_EQ(thrown_code([] { parse_averages("month,qli\n1,2,3\n"); }), ErrorCode::MalformedAverages);
  EXPECT_EQ(thrown_code([] { parse_averages("month,qli\n1,abc\n"); }), ErrorCode::MalformedAverages);
  EXPECT_EQ(thrown_code([] { final_month(parse_averages("month,qli,gdp_index,unemployment,gini\n")); }),
            ErrorCode::EmptyTable);
  EXPECT_EQ(thrown_code([] { final_month(parse_averages("month,gdp_index,unemployment,gini\n1,1,0.1,0.1\n")); }),
            ErrorCode::MissingColumn);
}

TEST(Averages, ToleratesBomAndCrlf) {
  const auto out = final_month(parse_averages("\xEF\xBB\xBFmonth,qli,gdp_index,unemployment,gini\r\n4,0.5,1,0.5,0.5\r\n"));
  EXPECT_EQ(out.month, 4);
}

TEST(Ingest, ThreeDirectoriesInLexicographicOrder) {
  TempDir root("corpus");
  write_config(root / "run_b", 0.5, true, "RIO");
  write_config(root / "run_a", 1.5, false, "POA");
  write_config(root / "run_c", 0.0, true, "POA");
  write(root / "run_a" / "0" / "averages.csv", "garbage");
  write(root / "loose_file.txt", "x");

  const auto ds = ingest(root.path(), schema());
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.records[0].config_id, "run_a");
  EXPECT_EQ(ds.records[1].config_id, "run_b");
  EXPECT_EQ(ds.records[2].config_id, "run_c");
  const RunRecord expected{"run_a", {{{"tax", 1.5}, {"fpm", 0.0}}, "POA"}, {0.6, 1.1, 0.4, 0.45, 1}};
  EXPECT_EQ(ds.records[0], expected);
  EXPECT_EQ(ds.X.rows(), 3u);
  EXPECT_EQ(ds.X.cols(), 4u);
  EXPECT_EQ(ds.metrics(0, 0), 0.6);
}

TEST(Ingest, EmptyRoot) {
  TempDir root("empty");
  EXPECT_EQ(ingest(root.path(), schema()).size(), 0u);
}

TEST(Ingest, MissingRoot) {
  EXPECT_EQ(thrown_code([] { ingest("/nonexistent/surrogate/root", schema()); }), ErrorCode::RootNotFound);
}

TEST(Ingest, MissingQliColumnNamesTheColumn) {
  TempDir root("noqli");
  write_config(root / "c0", 0.5, true, "RIO", "month,gdp_index,unemployment,gini\n0,1,0.5,0.5\n");
  try {
    ingest(root.path(), schema());
    FAIL() << "expected MalformedAverages";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedAverages);
    EXPECT_NE(std::string(e.what()).find("qli"), std::string::npos);
  }
}

TEST(Ingest, IncompleteDirectoriesAreSkipped) {
  TempDir root("skip");
  write_config(root / "c0", 0.5, true, "RIO");
  write(root / "c1" / "config.json", R"({"tax":0.5,"fpm":true,"acp":"RIO"})");
  const auto ds = ingest(root.path(), schema());
  EXPECT_EQ(ds.size(), 1u);
  ASSERT_EQ(ds.skipped.size(), 1u);
  EXPECT_NE(ds.skipped[0].find("c1"), std::string::npos);
}

TEST(Ingest, InvalidConfigFails) {
  TempDir root("bad");
  write_config(root / "c0", 5.0, true, "RIO");
  EXPECT_EQ(thrown_code([&] { ingest(root.path(), schema()); }), ErrorCode::ValidationFailed);
  TempDir root2("bad2");
  write(root2 / "c0" / "config.json", "{not json");
  write(root2 / "c0" / "averages.csv", kAverages);
  EXPECT_EQ(thrown_code([&] { ingest(root2.path(), schema()); }), ErrorCode::MalformedConfig);
}

TEST(Ingest, OutOfRangeOutcomeFails) {
  TempDir root("range");
  write_config(root / "c0", 0.5, true, "RIO", "month,qli,gdp_index,unemployment,gini\n0,1.5,1,0.5,0.5\n");
  EXPECT_EQ(thrown_code([&] { ingest(root.path(), schema()); }), ErrorCode::ValidationFailed);
}

TEST(Dataset, JsonRoundTripPreservesMatrices) {
  TempDir root("rt");
  write_config(root / "c0", 0.5, true, "RIO");
  write_config(root / "c1", 1.25, false, "POA");
  const auto ds = ingest(root.path(), schema());
  const auto back = Dataset::from_json(ds.to_json());
  EXPECT_EQ(back.records, ds.records);
  EXPECT_EQ(back.X, ds.X);
  EXPECT_EQ(back.metrics, ds.metrics);
}

TEST(Metrics, NameLookup) {
  for (auto m : kAllMetrics) EXPECT_EQ(metric_from_name(metric_name(m)), m);
  EXPECT_EQ(thrown_code([] { metric_from_name("happiness"); }), ErrorCode::InvalidRule);
}
