#include "fixtures.hpp"

#include <cmath>
#include <numbers>

namespace turnid::testing {

std::vector<double> heading_ramp(double hold_s, double change_deg, double ramp_s, double tail_s, double start_deg,
                                 double period) {
  const auto hold = static_cast<std::size_t>(std::lround(hold_s / period));
  const auto ramp = static_cast<std::size_t>(std::lround(ramp_s / period));
  const auto tail = static_cast<std::size_t>(std::lround(tail_s / period));
  std::vector<double> h;
  for (std::size_t i = 0; i < hold; ++i) h.push_back(start_deg);
  for (std::size_t i = 0; i < ramp; ++i) {
    h.push_back(start_deg + change_deg * static_cast<double>(i) / static_cast<double>(ramp));
  }
  for (std::size_t i = 0; i <= tail; ++i) h.push_back(start_deg + change_deg);
  return h;
}

DenseTrace trace_from_heading(std::span<const double> heading_deg, double speed_mps, LatLon start,
                              double start_time, std::string session, std::string driver) {
  DenseTrace t;
  t.session_id = std::move(session);
  t.driver_id = std::move(driver);
  t.start_time = start_time;
  const std::size_t n = heading_deg.size();
  for (auto& c : t.values) c.assign(n, 0.0);
  const LocalFrame frame(start);
  Vec2 p{};
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double h = 0.5 * (heading_deg[i - 1] + heading_deg[i]) * std::numbers::pi / 180.0;
      p.x += std::sin(h) * speed_mps * t.period;
      p.y += std::cos(h) * speed_mps * t.period;
    }
    t.positions.push_back(frame.to_geo(p));
    t.column(Sensor::Heading)[i] = wrap360(heading_deg[i]);
    t.column(Sensor::Velocity)[i] = speed_mps;
  }
  return t;
}

AlignedSegment make_aligned(int site, const std::string& driver, const std::string& session, double start,
                            std::size_t rows, const std::function<double(std::size_t, Sensor)>& fn) {
  AlignedSegment a;
  a.site_id = site;
  a.driver_id = driver;
  a.session_id = session;
  a.session_start = start;
  for (std::size_t r = 0; r < rows; ++r) a.locations.push_back({48.0 + 1e-5 * static_cast<double>(r), 11.0});
  for (Sensor s : kAllSensors) {
    auto& col = a.values[index(s)];
    for (std::size_t r = 0; r < rows; ++r) col.push_back(fn(r, s));
  }
  return a;
}

}  // namespace turnid::testing
