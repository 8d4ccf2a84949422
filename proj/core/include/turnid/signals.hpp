#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace turnid {

/// The twelve driver-influenced vehicle sensors. The enumerator order is the
/// column order of every aligned matrix and the block order of feature vectors.
///
/// Internal units: steering angle deg, steering velocity deg/s, steering
/// acceleration deg/s^2, velocity m/s, heading deg in [0, 360), engine speed
/// rpm, gas/brake/throttle as fractions in [0, 1], accelerations m/s^2,
/// torque N*m.
enum class Sensor : std::size_t {
  SteeringAngle = 0,
  SteeringVelocity,
  SteeringAcceleration,
  Velocity,
  Heading,
  EngineRpm,
  GasPedal,
  BrakePedal,
  ForwardAcceleration,
  LateralAcceleration,
  Torque,
  Throttle,
};

inline constexpr std::size_t kSensorCount = 12;

inline constexpr std::array<Sensor, kSensorCount> kAllSensors = {
    Sensor::SteeringAngle,       Sensor::SteeringVelocity,    Sensor::SteeringAcceleration,
    Sensor::Velocity,            Sensor::Heading,             Sensor::EngineRpm,
    Sensor::GasPedal,            Sensor::BrakePedal,          Sensor::ForwardAcceleration,
    Sensor::LateralAcceleration, Sensor::Torque,              Sensor::Throttle,
};

constexpr std::size_t index(Sensor s) noexcept { return static_cast<std::size_t>(s); }

/// Name used in log files and feature headers, e.g. "steering_angle".
std::string_view log_name(Sensor s) noexcept;

/// Short display label used in importance tables, e.g. "SW Angle".
std::string_view display_name(Sensor s) noexcept;

/// Canonical unit string of the internal representation.
std::string_view internal_unit(Sensor s) noexcept;

/// Reverse lookup of log_name(). Returns nullopt for anything else, including "gps".
std::optional<Sensor> sensor_from_log_name(std::string_view name) noexcept;

inline constexpr std::string_view kGpsSignalName = "gps";

/// Steering wheel angle, velocity and acceleration.
bool is_steering_family(Sensor s) noexcept;

/// Affine conversion from a declared input unit to the sensor's internal unit:
/// internal = value * scale + offset.
struct UnitConversion {
  double scale = 1.0;
  double offset = 0.0;
  double apply(double v) const noexcept { return v * scale + offset; }
};

/// Resolves a declared unit for a sensor. Returns nullopt when the unit is
/// unknown or dimensionally incompatible with the sensor.
std::optional<UnitConversion> unit_conversion(Sensor s, std::string_view unit) noexcept;

}  // namespace turnid
