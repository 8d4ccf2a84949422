#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "turnid/error.hpp"
#include "turnid/ingest.hpp"
#include "turnid/rng.hpp"

using namespace turnid;

namespace {

std::vector<Session> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_log(in);
}

std::string minimal_session(const std::string& id, const std::string& driver) {
  return R"({"t":0.0,"session":")" + id + R"(","driver":")" + driver + R"(","signal":"gps","lat":48.0,"lon":11.0})" +
         "\n" + R"({"t":1.0,"session":")" + id + R"(","driver":")" + driver +
         R"(","signal":"gps","lat":48.0001,"lon":11.0001})" + "\n" + R"({"t":0.0,"session":")" + id +
         R"(","driver":")" + driver + R"(","signal":"heading","value":90.0})" + "\n" + R"({"t":0.0,"session":")" + id +
         R"(","driver":")" + driver + R"(","signal":"velocity","value":10.0})" + "\n";
}

}  // namespace

TEST(ParseLog, GroupsRecordsBySession) {
  const auto sessions = parse(
      R"({"t":0.5,"session":"a","driver":"d1","signal":"velocity","value":3.0})"
      "\n"
      R"({"t":0.1,"session":"a","driver":"d1","signal":"velocity","value":2.0})"
      "\n");
  ASSERT_EQ(sessions.size(), 1u);
  const auto& ev = sessions[0].events(Sensor::Velocity);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_DOUBLE_EQ(ev[0].t, 0.1);
  EXPECT_DOUBLE_EQ(ev[1].value, 3.0);
  EXPECT_EQ(sessions[0].driver_id, "d1");
}

TEST(ParseLog, EmptyStreamGivesNoSessions) { EXPECT_TRUE(parse("").empty()); }

TEST(ParseLog, SessionsKeepOrderOfFirstAppearance) {
  const auto sessions = parse(minimal_session("zeta", "d1") + minimal_session("alpha", "d2"));
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].session_id, "zeta");
  EXPECT_EQ(sessions[1].session_id, "alpha");
}

TEST(ParseLog, UnknownSignalNamesTheLine) {
  try {
    parse(minimal_session("a", "d") + R"({"t":0.0,"session":"a","driver":"d","signal":"unknown_sensor","value":1})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
  }
}

TEST(ParseLog, InconsistentDriverIsRejected) {
  EXPECT_THROW(parse(R"({"t":0,"session":"a","driver":"d1","signal":"velocity","value":1})"
                     "\n"
                     R"({"t":1,"session":"a","driver":"d2","signal":"velocity","value":1})"),
               ParseError);
}

TEST(ParseLog, MalformedRecordsAreRejected) {
  EXPECT_THROW(parse("{not json"), ParseError);
  EXPECT_THROW(parse(R"({"t":0,"session":"a","driver":"d","signal":"velocity"})"), ParseError);
  EXPECT_THROW(parse(R"({"t":0,"session":"a","driver":"d","signal":"gps","lat":48})"), ParseError);
  EXPECT_THROW(parse(R"({"t":"x","session":"a","driver":"d","signal":"velocity","value":1})"), ParseError);
}

TEST(ParseLog, UnitsHeaderConvertsToInternalUnits) {
  const auto sessions = parse(
      R"({"units":{"velocity":"km/h","steering_angle":"rad","brake_pedal":"percent"}})"
      "\n"
      R"({"t":0,"session":"a","driver":"d","signal":"velocity","value":36})"
      "\n"
      R"({"t":0,"session":"a","driver":"d","signal":"steering_angle","value":3.141592653589793})"
      "\n"
      R"({"t":0,"session":"a","driver":"d","signal":"brake_pedal","value":40})");
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_NEAR(sessions[0].events(Sensor::Velocity)[0].value, 10.0, 1e-12);
  EXPECT_NEAR(sessions[0].events(Sensor::SteeringAngle)[0].value, 180.0, 1e-12);
  EXPECT_NEAR(sessions[0].events(Sensor::BrakePedal)[0].value, 0.4, 1e-12);
}

TEST(ParseLog, UnitsHeaderOnlyOnFirstLine) {
  EXPECT_THROW(parse(minimal_session("a", "d") + R"({"units":{"velocity":"km/h"}})"), ParseError);
  EXPECT_THROW(parse(R"({"units":{"velocity":"furlongs"}})"), ParseError);
}

TEST(ParseLog, RoundTripsThroughWriter) {
  std::ostringstream out;
  write_event(out, {0.25, "s1", "d1", Sensor::EngineRpm, 1234.5, {}});
  write_event(out, {0.5, "s1", "d1", std::nullopt, 0.0, {48.123456789, 11.987654321}});
  const auto sessions = parse(out.str());
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].events(Sensor::EngineRpm)[0].value, 1234.5);
  EXPECT_EQ(sessions[0].gps[0].pos.lat, 48.123456789);
  EXPECT_EQ(sessions[0].gps[0].pos.lon, 11.987654321);
}

TEST(StepHold, CarriesLastObservationForward) {
  const std::vector<ScalarEvent> ev = {{0.0, 10.0}, {0.25, 12.0}};
  const std::vector<double> grid = {0.0, 0.1, 0.2, 0.3};
  EXPECT_EQ(step_hold(ev, grid), (std::vector<double>{10, 10, 10, 12}));
}

TEST(StepHold, SingleEventIsConstant) {
  const std::vector<ScalarEvent> ev = {{0.0, 5.0}};
  const std::vector<double> grid = {-1.0, 0.0, 0.7, 3.0};
  EXPECT_EQ(step_hold(ev, grid), (std::vector<double>(4, 5.0)));
}

TEST(StepHold, EventsOnGridTimesAreReproduced) {
  const std::vector<ScalarEvent> ev = {{0.0, 1.0}, {0.1, 2.0}, {0.2, 3.0}};
  const std::vector<double> grid = {0.0, 0.1, 0.2};
  EXPECT_EQ(step_hold(ev, grid), (std::vector<double>{1, 2, 3}));
}

TEST(StepHold, IntroducesNoNewValues) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScalarEvent> ev;
    double t = u(rng);
    for (int i = 0; i < 20; ++i) {
      ev.push_back({t, std::round(u(rng) * 100.0)});
      t += u(rng) * 0.1;
    }
    const auto grid = make_grid(0.0, t + 1.0, 0.1);
    std::set<double> allowed;
    for (const auto& e : ev) allowed.insert(e.value);
    for (double v : step_hold(ev, grid)) EXPECT_TRUE(allowed.contains(v));
  }
}

TEST(MakeGrid, CoversTheInterval) {
  const auto g = make_grid(2.0, 2.95, 0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.front(), 2.0);
  EXPECT_GE(g.back(), 2.95);
  EXPECT_EQ(make_grid(1.0, 1.0, 0.1).size(), 1u);
  EXPECT_EQ(make_grid(0.0, 1.0, 0.1).size(), 11u);
}

TEST(InterpolateGps, LinearBetweenFixes) {
  const std::vector<GpsFix> fixes = {{0.0, {48.0, 11.0}}, {1.0, {48.0001, 11.0001}}};
  const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
  const auto p = interpolate_gps(fixes, grid);
  EXPECT_EQ(p[0], fixes[0].pos);
  EXPECT_NEAR(p[1].lat, 48.000025, 1e-12);
  EXPECT_NEAR(p[1].lon, 11.000025, 1e-12);
  EXPECT_NEAR(p[2].lat, 48.00005, 1e-12);
  EXPECT_NEAR(p[2].lon, 11.00005, 1e-12);
  EXPECT_EQ(p[3], fixes[1].pos);
}

TEST(InterpolateGps, ClampsOutsideTheFixes) {
  const std::vector<GpsFix> fixes = {{1.0, {48.0, 11.0}}, {2.0, {48.1, 11.1}}};
  const std::vector<double> grid = {0.0, 3.0};
  const auto p = interpolate_gps(fixes, grid);
  EXPECT_EQ(p[0], fixes[0].pos);
  EXPECT_EQ(p[1], fixes[1].pos);
}

TEST(InterpolateGps, NeedsTwoFixes) {
  const std::vector<GpsFix> one = {{0.0, {48.0, 11.0}}};
  const std::vector<double> grid = {0.0};
  EXPECT_THROW(interpolate_gps(one, grid), PreconditionError);
}

TEST(InterpolateGps, StaysBetweenBracketingFixes) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  std::vector<GpsFix> fixes;
  for (int i = 0; i < 30; ++i) fixes.push_back({static_cast<double>(i), {48.0 + u(rng), 11.0 + u(rng)}});
  const auto grid = make_grid(0.0, 29.0, 0.1);
  const auto p = interpolate_gps(fixes, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = std::min<std::size_t>(28, static_cast<std::size_t>(grid[i]));
    const auto& a = fixes[k].pos;
    const auto& b = fixes[k + 1].pos;
    EXPECT_GE(p[i].lat, std::min(a.lat, b.lat) - 1e-15);
    EXPECT_LE(p[i].lat, std::max(a.lat, b.lat) + 1e-15);
    EXPECT_GE(p[i].lon, std::min(a.lon, b.lon) - 1e-15);
    EXPECT_LE(p[i].lon, std::max(a.lon, b.lon) + 1e-15);
  }
}

TEST(Densify, RequiresGpsHeadingAndVelocity) {
  auto s = parse(minimal_session("a", "d")).front();
  EXPECT_NO_THROW(densify(s));
  auto no_heading = s;
  no_heading.events(Sensor::Heading).clear();
  EXPECT_THROW(densify(no_heading), PreconditionError);
  auto one_fix = s;
  one_fix.gps.pop_back();
  EXPECT_THROW(densify(one_fix), PreconditionError);
}

TEST(Densify, SharedGridAndZeroFill) {
  const auto d = densify(parse(minimal_session("a", "d")).front());
  EXPECT_EQ(d.size(), 11u);
  EXPECT_DOUBLE_EQ(d.period, 0.1);
  for (Sensor s : kAllSensors) EXPECT_EQ(d.column(s).size(), d.size());
  EXPECT_EQ(d.column(Sensor::Torque), std::vector<double>(11, 0.0));
  EXPECT_EQ(d.column(Sensor::Heading), std::vector<double>(11, 90.0));
}

TEST(Densify, IsIdempotent) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Session s;
  s.session_id = "x";
  s.driver_id = "d";
  for (Sensor sensor : kAllSensors) {
    double t = 0.0;
    while (t < 5.0) {
      s.events(sensor).push_back({t, std::round(u(rng) * 1000.0) / 10.0});
      t += 0.05 + u(rng) * 0.5;
    }
  }
  for (int i = 0; i <= 5; ++i) s.gps.push_back({static_cast<double>(i), {48.0 + 1e-4 * u(rng), 11.0 + 1e-4 * u(rng)}});
  s.start_time = 0.0;
  s.end_time = 5.0;
  const DenseTrace d = densify(s);
  const DenseTrace again = densify(to_session(d));
  ASSERT_EQ(again.size(), d.size());
  EXPECT_EQ(again.values, d.values);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(again.positions[i], d.positions[i]);
}

TEST(ParseLogFile, MissingFileIsAnIoError) {
  EXPECT_THROW(parse_log_file("/nonexistent/dir/log.jsonl"), IoError);
}
