#include "turnid/signals.hpp"

#include <numbers>

namespace turnid {

namespace {

struct SensorInfo {
  std::string_view log;
  std::string_view display;
  std::string_view unit;
};

constexpr std::array<SensorInfo, kSensorCount> kInfo = {{
    {"steering_angle", "SW Angle", "deg"},
    {"steering_velocity", "SW Vel", "deg/s"},
    {"steering_acceleration", "SW Acc", "deg/s^2"},
    {"velocity", "Speed", "m/s"},
    {"heading", "Heading", "deg"},
    {"engine_rpm", "RPM", "rpm"},
    {"gas_pedal", "Gas", "fraction"},
    {"brake_pedal", "Brake", "fraction"},
    {"forward_acceleration", "X-Acc", "m/s^2"},
    {"lateral_acceleration", "Lat Acc", "m/s^2"},
    {"torque", "Torque", "N*m"},
    {"throttle", "Throttle", "fraction"},
}};

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

std::string_view log_name(Sensor s) noexcept { return kInfo[index(s)].log; }
std::string_view display_name(Sensor s) noexcept { return kInfo[index(s)].display; }
std::string_view internal_unit(Sensor s) noexcept { return kInfo[index(s)].unit; }

std::optional<Sensor> sensor_from_log_name(std::string_view name) noexcept {
  for (Sensor s : kAllSensors) {
    if (kInfo[index(s)].log == name) return s;
  }
  return std::nullopt;
}

bool is_steering_family(Sensor s) noexcept {
  return s == Sensor::SteeringAngle || s == Sensor::SteeringVelocity ||
         s == Sensor::SteeringAcceleration;
}

std::optional<UnitConversion> unit_conversion(Sensor s, std::string_view unit) noexcept {
  if (unit == internal_unit(s)) return UnitConversion{};
  switch (s) {
    case Sensor::SteeringAngle:
    case Sensor::Heading:
      if (unit == "rad") return UnitConversion{kRadToDeg, 0.0};
      break;
    case Sensor::SteeringVelocity:
      if (unit == "rad/s") return UnitConversion{kRadToDeg, 0.0};
      break;
    case Sensor::SteeringAcceleration:
      if (unit == "rad/s^2") return UnitConversion{kRadToDeg, 0.0};
      break;
    case Sensor::Velocity:
      if (unit == "km/h") return UnitConversion{1.0 / 3.6, 0.0};
      if (unit == "mph") return UnitConversion{0.44704, 0.0};
      break;
    case Sensor::GasPedal:
    case Sensor::BrakePedal:
    case Sensor::Throttle:
      if (unit == "percent" || unit == "%") return UnitConversion{0.01, 0.0};
      break;
    case Sensor::ForwardAcceleration:
    case Sensor::LateralAcceleration:
      if (unit == "g") return UnitConversion{9.80665, 0.0};
      break;
    case Sensor::Torque:
      if (unit == "Nm") return UnitConversion{};
      break;
    case Sensor::EngineRpm:
      if (unit == "rps") return UnitConversion{60.0, 0.0};
      break;
  }
  return std::nullopt;
}

}  // namespace turnid
