#include <stdexcept>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qsep/io.hpp"
#include "qsep/separating.hpp"

namespace qsep::io {
namespace {

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.0, 0.1, 0.8, 1.0 / 3.0, 2.3e-10, 0.7500000001746230}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.8), "0.8");
}

TEST(CorrelationJson, RoundTrip) {
  const Correlation p = separating::exact_pstar(0.3);
  const Json j = to_json(p);
  EXPECT_EQ(j.at("m"), 4);
  EXPECT_EQ(j.at("n"), 5);
  const Correlation q = correlation_from_json(Json::parse(j.dump()));
  EXPECT_EQ(q.raw(), p.raw());
}

TEST(CorrelationJson, RejectsMalformedInput) {
  Json j = to_json(separating::exact_pstar(0.5));
  j["m"] = 3;
  EXPECT_THROW(correlation_from_json(j), std::invalid_argument);
  Json k = to_json(separating::exact_pstar(0.5));
  k["table"][0][0][0][0] = 0.5;
  EXPECT_THROW(correlation_from_json(k), std::invalid_argument);
  EXPECT_THROW(correlation_from_json(Json::object()), Json::exception);
}

TEST(CorrelationCsv, HeaderAndRows) {
  const Correlation p(1, 1, 2, 2, {0.8, 0.0, 0.0, 0.2});
  EXPECT_EQ(to_csv(p), "x,y,a,b,value\n0,0,0,0,0.8\n0,0,0,1,0\n0,0,1,0,0\n0,0,1,1,0.2\n");
}

TEST(StrategyJson, RoundTrip) {
  Rng rng(3);
  const Strategy s = fixture::random_strategy(2, 3, 2, 2, 3, 2, rng);
  const Strategy t = strategy_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(t.dA, s.dA);
  EXPECT_EQ(t.dB, s.dB);
  EXPECT_EQ(t.state, s.state);
  ASSERT_EQ(t.alice.size(), s.alice.size());
  for (std::size_t x = 0; x < s.alice.size(); ++x) {
    for (std::size_t a = 0; a < s.alice[x].size(); ++a) EXPECT_EQ(t.alice[x][a], s.alice[x][a]);
  }
  EXPECT_EQ(induce(t).raw(), induce(s).raw());
}

TEST(StrategyJson, RejectsWrongDimensions) {
  Json j = to_json(separating::ideal_truncated_strategy({0.5, 2}));
  j["dA"] = 3;
  EXPECT_THROW(strategy_from_json(j), std::invalid_argument);
  Json k = to_json(separating::ideal_truncated_strategy({0.5, 2}));
  k["state"][0] = Json::array({1.0});
  EXPECT_THROW(strategy_from_json(k), std::invalid_argument);
}

TEST(TraceCsv, OneRowPerRecordedObjective) {
  seesaw::SeesawResult r;
  r.traces.resize(2);
  r.traces[0].objective = {1.0, 0.5};
  r.traces[1].objective = {2.0};
  EXPECT_EQ(trace_csv(r), "restart,iter,objective\n0,0,1\n0,1,0.5\n1,0,2\n");
}

TEST(Files, WriteThenRead) {
  const std::string path = testing::TempDir() + "qsep_io_test.txt";
  write_file(path, "abc\n");
  EXPECT_EQ(read_file(path), "abc\n");
  EXPECT_THROW(read_file(path + ".missing"), std::runtime_error);
}

}  // namespace
}  // namespace qsep::io
