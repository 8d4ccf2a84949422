#pragma once

#include <span>
#include <vector>

namespace turnid {

/// 150 ft in meters; radius of the analysis window around a site and of site clustering.
inline constexpr double kAnalysisRadiusM = 45.72;

/// Mean Earth radius (IUGG), meters.
inline constexpr double kEarthRadiusM = 6371008.8;

/// WGS84 position in degrees.
struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Planar east/north offset in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Equirectangular distance in meters, longitude scaled by cos of the mean latitude.
double distance_m(const LatLon& a, const LatLon& b) noexcept;

/// Tangent-plane projection around a fixed origin (equirectangular, cos(origin latitude)).
class LocalFrame {
 public:
  explicit LocalFrame(const LatLon& origin) noexcept;

  Vec2 to_local(const LatLon& p) const noexcept;
  LatLon to_geo(const Vec2& v) const noexcept;
  const LatLon& origin() const noexcept { return origin_; }

 private:
  LatLon origin_;
  double meters_per_deg_lat_;
  double meters_per_deg_lon_;
};

/// Wraps an angle in degrees to [0, 360).
double wrap360(double deg) noexcept;

/// Wraps an angle difference in degrees to [-180, 180).
double wrap180(double deg) noexcept;

/// Continuous heading: each step takes the shortest signed difference, the first
/// value is kept as given.
std::vector<double> unwrap_degrees(std::span<const double> headings);

}  // namespace turnid
