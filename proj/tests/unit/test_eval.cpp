#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "turnid/error.hpp"
#include "turnid/eval.hpp"
#include "turnid/rng.hpp"

using namespace turnid;
using namespace turnid::testing;

namespace {

AlignedSegment seg(const std::string& driver, double start, double level = 0.0, std::size_t rows = 16) {
  return make_aligned(2, driver, driver + "@" + std::to_string(static_cast<int>(start)), start, rows,
                      [=](std::size_t r, Sensor s) { return level * (1.0 + 0.01 * r) + 0.001 * index(s); });
}

// n drivers with s sessions each; driver d's signal level is d plus small noise.
std::vector<AlignedSegment> fleet(std::size_t n, std::size_t s, double spread, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::vector<AlignedSegment> out;
  for (std::size_t d = 0; d < n; ++d) {
    const std::string id = "d" + std::to_string(d);
    for (std::size_t k = 0; k < s; ++k) {
      out.push_back(make_aligned(2, id, id + "_" + std::to_string(k), static_cast<double>(k * 10 + d), 16,
                                 [&](std::size_t r, Sensor sn) {
                                   return spread * static_cast<double>(d) * std::sin(0.3 * r + index(sn)) + z(rng);
                                 }));
    }
  }
  return out;
}

}  // namespace

TEST(SelectTopDrivers, MostSessionsThenIdOrder) {
  const std::map<std::string, std::size_t> counts = {{"carol", 5}, {"alice", 3}, {"bob", 5}, {"dave", 3}};
  EXPECT_EQ(select_top_drivers(counts, 2), (std::vector<std::string>{"bob", "carol"}));
  EXPECT_EQ(select_top_drivers(counts, 3), (std::vector<std::string>{"bob", "carol", "alice"}));
  EXPECT_THROW(select_top_drivers(counts, 5), PreconditionError);
}

TEST(BalanceSessions, DropsSurplusByOrder) {
  std::map<std::string, std::vector<AlignedSegment>> per;
  per["a"] = {seg("a", 30), seg("a", 10), seg("a", 20), seg("a", 40)};
  per["b"] = {seg("b", 5), seg("b", 1)};
  const auto earliest = balance_sessions(per, DropOrder::Earliest);
  EXPECT_EQ(earliest.drivers, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(earliest.sessions_per_driver(), 2u);
  EXPECT_EQ(earliest.sessions[0][0].session_start, 30.0);
  EXPECT_EQ(earliest.sessions[0][1].session_start, 40.0);
  EXPECT_EQ(earliest.sessions[1][0].session_start, 1.0);
  const auto latest = balance_sessions(per, DropOrder::Latest);
  EXPECT_EQ(latest.sessions[0][0].session_start, 10.0);
  EXPECT_EQ(latest.sessions[0][1].session_start, 20.0);
  per["c"] = {};
  EXPECT_THROW(balance_sessions(per), PreconditionError);
}

TEST(StratifiedKfold, OneSessionPerDriverPerFold) {
  std::map<std::string, std::vector<AlignedSegment>> per;
  for (std::string d : {"x", "y", "z"}) {
    for (int k = 0; k < 6; ++k) per[d].push_back(seg(d, k));
  }
  const auto ds = balance_sessions(per);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto folds = stratified_kfold(ds, seed);
    ASSERT_EQ(folds.size(), 6u);
    std::set<std::pair<std::size_t, std::size_t>> tested;
    for (const auto& f : folds) {
      ASSERT_EQ(f.test.size(), 3u);
      EXPECT_EQ(f.train.size(), 15u);
      std::set<std::size_t> drivers;
      for (const auto& r : f.test) {
        drivers.insert(r.driver);
        EXPECT_TRUE(tested.insert({r.driver, r.session}).second);
        EXPECT_EQ(std::count(f.train.begin(), f.train.end(), r), 0);
      }
      EXPECT_EQ(drivers.size(), 3u);
    }
    EXPECT_EQ(tested.size(), 18u);
  }
  EXPECT_NE(stratified_kfold(ds, 1)[0].test, stratified_kfold(ds, 2)[0].test);
}

TEST(StratifiedKfold, NeedsTwoSessions) {
  std::map<std::string, std::vector<AlignedSegment>> per;
  per["a"] = {seg("a", 0)};
  per["b"] = {seg("b", 0)};
  EXPECT_THROW(stratified_kfold(balance_sessions(per), 1), PreconditionError);
}

TEST(PercentRow, LargestRemainder) {
  EXPECT_EQ(percent_row(std::vector<std::size_t>{1, 1, 1}), (std::vector<int>{34, 33, 33}));
  EXPECT_EQ(percent_row(std::vector<std::size_t>{2, 1}), (std::vector<int>{67, 33}));
  EXPECT_EQ(percent_row(std::vector<std::size_t>{5, 0}), (std::vector<int>{100, 0}));
  EXPECT_EQ(percent_row(std::vector<std::size_t>{0, 0}), (std::vector<int>{0, 0}));
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> u(0, 50);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::size_t> c(1 + t % 9);
    for (auto& v : c) v = u(rng);
    const auto p = percent_row(c);
    const std::size_t total = std::accumulate(c.begin(), c.end(), std::size_t{0});
    if (total == 0) continue;
    EXPECT_EQ(std::accumulate(p.begin(), p.end(), 0), 100);
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(std::abs(p[i] - 100.0 * c[i] / total), 1.0);
    }
  }
}

TEST(EvaluateSite, RefusesDegenerateSetups) {
  const auto segs = fleet(3, 4, 1.0, 1);
  EvalParams p;
  p.drivers = 1;
  EXPECT_THROW(evaluate_site(segs, p), PreconditionError);
  p.drivers = 4;
  EXPECT_THROW(evaluate_site(segs, p), PreconditionError);
  p.drivers = 2;
  p.repetitions = 0;
  EXPECT_THROW(evaluate_site(segs, p), PreconditionError);
  EXPECT_THROW(evaluate_site(std::vector<AlignedSegment>{}, EvalParams{}), PreconditionError);
}

TEST(EvaluateSite, SeparatedDriversAndReportShape) {
  const auto segs = fleet(3, 5, 3.0, 2);
  EvalParams p;
  p.drivers = 3;
  p.repetitions = 2;
  p.forest.tree_count = 40;
  const auto r = evaluate_site(segs, p);
  EXPECT_EQ(r.site_id, 2);
  EXPECT_EQ(r.drivers, 3u);
  EXPECT_EQ(r.sessions_per_driver, 5u);
  EXPECT_EQ(r.fold_accuracies.size(), 10u);
  EXPECT_GE(r.accuracy, 0.9);
  ASSERT_EQ(r.confusion_counts.size(), 3u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = std::accumulate(r.confusion_counts[i].begin(), r.confusion_counts[i].end(), std::size_t{0});
    EXPECT_EQ(row, 10u);  // 5 sessions x 2 repetitions
    total += row;
    EXPECT_EQ(std::accumulate(r.confusion_percent[i].begin(), r.confusion_percent[i].end(), 0), 100);
  }
  EXPECT_EQ(total, 30u);
  EXPECT_EQ(r.sensor_importance.size(), kSensorCount);
  const double mean =
      std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / static_cast<double>(r.fold_accuracies.size());
  EXPECT_NEAR(r.accuracy, mean, 1e-12);
}

TEST(EvaluateSite, IndistinguishableDriversNearChance) {
  const auto segs = fleet(2, 12, 0.0, 3);
  EvalParams p;
  p.repetitions = 3;
  p.forest.tree_count = 30;
  const auto r = evaluate_site(segs, p);
  EXPECT_LE(r.accuracy, 0.8);
}

TEST(EvalReport, JsonRoundTrip) {
  const auto segs = fleet(2, 3, 2.0, 4);
  EvalParams p;
  p.repetitions = 1;
  p.forest.tree_count = 10;
  const auto r = evaluate_site(segs, p);
  const auto text = report_to_json(r);
  const auto back = report_from_json(text);
  EXPECT_EQ(report_to_json(back), text);
  EXPECT_EQ(back.confusion_counts, r.confusion_counts);
  EXPECT_EQ(back.accuracy, r.accuracy);
  EXPECT_THROW(report_from_json("[1,2"), ParseError);
}

TEST(RenderTable, LayoutAndAverages) {
  EvalReport a;
  a.site_id = 1;
  a.drivers = 2;
  a.sessions_per_driver = 16;
  a.accuracy = 0.875;
  EvalReport b = a;
  b.site_id = 2;
  b.accuracy = 0.625;
  EvalReport c = a;
  c.drivers = 5;
  c.sessions_per_driver = 8;
  c.accuracy = 0.5;
  const std::vector<EvalReport> reports = {a, b, c};
  const std::vector<SkippedSite> skipped = {{2, 5, "fewer than 5 drivers"}};
  const auto table = render_table(reports, {{1, "right turn"}, {2, "left turn"}}, skipped);
  EXPECT_NE(table.find("n = 2"), std::string::npos);
  EXPECT_NE(table.find("n = 5"), std::string::npos);
  EXPECT_NE(table.find("87.5% (16)"), std::string::npos);
  EXPECT_NE(table.find("50.0% (8)"), std::string::npos);
  EXPECT_NE(table.find("right turn average"), std::string::npos);
  EXPECT_NE(table.find("75.0%"), std::string::npos);  // (87.5 + 62.5) / 2
  EXPECT_NE(table.find("skipped: site 2 (n = 5)"), std::string::npos);
  const auto single = render_table(std::vector<EvalReport>{a}, {});
  EXPECT_EQ(single.find("average\n"), std::string::npos);
  EXPECT_NE(single.find("unlabeled"), std::string::npos);
  EXPECT_NE(single.find("Average across all sites"), std::string::npos);
}
