#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "turnid/geo.hpp"
#include "turnid/ingest.hpp"

namespace turnid {

/// Behavioral parameters of one synthetic driver.
struct DriverStyle {
  /// Braking starts this far (path length) before the turn apex.
  double brake_onset_m = 50.0;
  /// Steering-wheel angle this driver reaches on a 12 m reference turn; scales
  /// the curvature the driver takes through every turn.
  double peak_steering_deg = 190.0;
  /// Steering-wheel rate while winding in and out.
  double steering_rate_deg_s = 250.0;
  /// Delay between the apex and the start of re-acceleration.
  double gas_onset_lag_s = 1.0;
  double cruise_speed_mps = 13.0;
  double accel_rate_mps2 = 1.8;
  /// Multiplies the route's apex speed.
  double apex_speed_factor = 1.0;
  /// Per-sensor multipliers of the base noise levels.
  std::array<double, kSensorCount> noise_multipliers = [] {
    std::array<double, kSensorCount> a{};
    a.fill(1.0);
    return a;
  }();
  double gps_noise_multiplier = 1.0;
  /// Relative standard deviation of the per-session jitter on every behavioral parameter.
  double variability = 0.06;
  std::uint64_t seed = 0;
};

/// One element of a route: a straight leg, or a turn when `angle_deg` != 0.
struct RouteElement {
  double length_m = 0.0;
  /// Signed heading change; positive turns clockwise (right). |angle| in (0, 180).
  double angle_deg = 0.0;
  double radius_m = 0.0;
  /// Apex speed; 0 means sqrt(2.5 m/s^2 * radius).
  double speed_mps = 0.0;
  /// Ground-truth marker: this turn must be detected.
  bool planted = false;

  bool is_turn() const noexcept { return angle_deg != 0.0; }
  static RouteElement straight(double length_m) { return {length_m, 0.0, 0.0, 0.0, false}; }
  static RouteElement turn(double angle_deg, double radius_m, double speed_mps = 0.0, bool planted = true) {
    return {0.0, angle_deg, radius_m, speed_mps, planted};
  }
};

struct RouteSpec {
  LatLon start{48.7665, 11.4258};
  double start_heading_deg = 10.0;
  std::vector<RouteElement> elements;
};

/// Ground truth for one simulated turn traversal.
struct SimulatedTurn {
  double start_time = 0.0;
  double end_time = 0.0;
  double angle_deg = 0.0;
  bool planted = false;
  LatLon apex;
};

struct SimulatedSession {
  Session session;
  std::vector<SimulatedTurn> turns;
};

/// Identity and timing of a generated session.
struct SessionMeta {
  std::string session_id = "s0";
  std::string driver_id = "d0";
  double start_time = 0.0;
};

/// Base noise standard deviation of each sensor at multiplier 1 (internal units).
const std::array<double, kSensorCount>& base_noise_std();
/// Base GPS position noise, meters.
inline constexpr double kBaseGpsNoiseM = 0.3;
/// Change-detection resolution of each sensor (internal units).
const std::array<double, kSensorCount>& quantization_steps();
/// Simulation and sensor logging step, seconds.
inline constexpr double kSimStepS = 0.05;
/// GPS fix interval, seconds.
inline constexpr double kGpsIntervalS = 1.0;

/// Simulates one traversal of `route`. Noise and per-session jitter are the only
/// seed-dependent terms. Throws PreconditionError on an invalid or infeasible route.
SimulatedSession simulate_session(const DriverStyle& style, const RouteSpec& route, std::uint64_t session_seed,
                                  const SessionMeta& meta = {});

/// Style axes that gen_fleet can spread across drivers.
enum class StyleAxis {
  BrakeOnset,
  PeakSteering,
  SteeringRate,
  GasOnsetLag,
  CruiseSpeed,
  AccelRate,
  ApexSpeed,
};

inline constexpr std::array<StyleAxis, 7> kAllStyleAxes = {
    StyleAxis::BrakeOnset,  StyleAxis::PeakSteering, StyleAxis::SteeringRate, StyleAxis::GasOnsetLag,
    StyleAxis::CruiseSpeed, StyleAxis::AccelRate,    StyleAxis::ApexSpeed,
};

std::string axis_name(StyleAxis a);
StyleAxis axis_from_name(const std::string& name);

/// A route with a single planted turn between two straight legs.
RouteSpec single_turn_route(double angle_deg = 90.0, double radius_m = 12.0, double approach_m = 180.0,
                            double exit_m = 250.0);

struct FleetConfig {
  std::size_t drivers = 2;
  std::size_t sessions_per_driver = 16;
  /// 0: identical styles; 1: each axis spread over its full documented range.
  double separation = 1.0;
  /// Scales sensor noise and per-session jitter; 0 gives noiseless, repeatable sessions.
  double noise = 1.0;
  std::uint64_t seed = 1;
  std::vector<StyleAxis> varied_axes{kAllStyleAxes.begin(), kAllStyleAxes.end()};
  RouteSpec route = single_turn_route();
};

/// Styles for `config.drivers` drivers: each varied axis takes evenly spaced
/// levels center + separation * (q - 0.5) * width, q = (i + 0.5) / n, assigned
/// to drivers through a seeded permutation per axis.
std::vector<DriverStyle> fleet_styles(const FleetConfig& config);

/// Sessions ordered driver-major. Session k of driver d starts at
/// (k * drivers + d) * 3600 s so drivers interleave chronologically.
std::vector<SimulatedSession> gen_fleet(const FleetConfig& config);

/// Writes sessions in the ingest log format, events sorted by time per session.
void write_log(std::ostream& out, const std::vector<SimulatedSession>& sessions);

/// Fleet config JSON (see README). Missing fields take FleetConfig defaults.
FleetConfig fleet_config_from_json(const std::string& text);
std::string fleet_config_to_json(const FleetConfig& config);


}  // namespace turnid
