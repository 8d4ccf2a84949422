#include "turnid/geo.hpp"

#include <cmath>
#include <numbers>

namespace turnid {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMetersPerDeg = kEarthRadiusM * kDegToRad;
}  // namespace

double distance_m(const LatLon& a, const LatLon& b) noexcept {
  const double mean_lat = 0.5 * (a.lat + b.lat) * kDegToRad;
  const double dx = (b.lon - a.lon) * std::cos(mean_lat) * kMetersPerDeg;
  const double dy = (b.lat - a.lat) * kMetersPerDeg;
  return std::hypot(dx, dy);
}

LocalFrame::LocalFrame(const LatLon& origin) noexcept
    : origin_(origin),
      meters_per_deg_lat_(kMetersPerDeg),
      meters_per_deg_lon_(kMetersPerDeg * std::cos(origin.lat * kDegToRad)) {}

Vec2 LocalFrame::to_local(const LatLon& p) const noexcept {
  return {(p.lon - origin_.lon) * meters_per_deg_lon_, (p.lat - origin_.lat) * meters_per_deg_lat_};
}

LatLon LocalFrame::to_geo(const Vec2& v) const noexcept {
  return {origin_.lat + v.y / meters_per_deg_lat_, origin_.lon + v.x / meters_per_deg_lon_};
}

double wrap360(double deg) noexcept {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round to exactly 360
  if (r >= 360.0) r -= 360.0;
  return r;
}

double wrap180(double deg) noexcept {
  double r = wrap360(deg + 180.0) - 180.0;
  return r;
}

std::vector<double> unwrap_degrees(std::span<const double> headings) {
  std::vector<double> out;
  out.reserve(headings.size());
  for (std::size_t i = 0; i < headings.size(); ++i) {
    if (i == 0) {
      out.push_back(headings[0]);
    } else {
      out.push_back(out.back() + wrap180(headings[i] - headings[i - 1]));
    }
  }
  return out;
}

}  // namespace turnid
