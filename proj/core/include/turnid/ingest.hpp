#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnid/geo.hpp"
#include "turnid/signals.hpp"

namespace turnid {

/// Grid step of every dense trace, seconds.
inline constexpr double kSamplePeriodS = 0.1;

struct ScalarEvent {
  double t = 0.0;
  double value = 0.0;
};

struct GpsFix {
  double t = 0.0;
  LatLon pos;
};

/// One record of the change-event log. `sensor` is empty for GPS records, which
/// carry `pos` instead of `value`.
struct ChangeEvent {
  double t = 0.0;
  std::string session;
  std::string driver;
  std::optional<Sensor> sensor;
  double value = 0.0;
  LatLon pos;
};

/// One continuous driving interval of one driver. Event lists are sorted by time.
struct Session {
  std::string session_id;
  std::string driver_id;
  std::array<std::vector<ScalarEvent>, kSensorCount> sensors;
  std::vector<GpsFix> gps;
  double start_time = 0.0;
  double end_time = 0.0;

  const std::vector<ScalarEvent>& events(Sensor s) const { return sensors[index(s)]; }
  std::vector<ScalarEvent>& events(Sensor s) { return sensors[index(s)]; }
  std::size_t event_count() const noexcept;
};

/// All sensors on a shared uniform grid plus interpolated GPS positions.
struct DenseTrace {
  std::string session_id;
  std::string driver_id;
  double start_time = 0.0;
  double period = kSamplePeriodS;
  std::array<std::vector<double>, kSensorCount> values;
  std::vector<LatLon> positions;

  std::size_t size() const noexcept { return positions.size(); }
  double time_at(std::size_t i) const noexcept { return start_time + static_cast<double>(i) * period; }
  const std::vector<double>& column(Sensor s) const { return values[index(s)]; }
  std::vector<double>& column(Sensor s) { return values[index(s)]; }
};

/// Declared input units, keyed by log signal name. Missing entries mean internal units.
using UnitMap = std::map<std::string, std::string, std::less<>>;

/// Parses a JSON-Lines change-event log. Sessions are returned in order of first
/// appearance. Throws ParseError naming the offending line.
std::vector<Session> parse_log(std::istream& in);

/// Opens and parses a log file. Throws IoError when the file cannot be read.
std::vector<Session> parse_log_file(const std::filesystem::path& path);

/// Writes the optional header line declaring input units.
void write_units_header(std::ostream& out, const UnitMap& units);

/// Writes one record in the log format.
void write_event(std::ostream& out, const ChangeEvent& ev);

/// Uniform grid start, start + period, ... reaching at least `end`.
std::vector<double> make_grid(double start, double end, double period);

/// Last-observation-carried-forward sampling. Grid points before the first
/// event take the first event's value. Events must be sorted and non-empty.
std::vector<double> step_hold(std::span<const ScalarEvent> events, std::span<const double> grid);

/// Componentwise linear interpolation of GPS fixes, clamped at both ends.
/// Requires at least two fixes.
std::vector<LatLon> interpolate_gps(std::span<const GpsFix> fixes, std::span<const double> grid);

/// interpolate_gps over the session's own dense grid.
std::vector<LatLon> interpolate_gps(const Session& session, double period = kSamplePeriodS);

/// Samples every sensor onto the session grid. Sensors without any event are
/// filled with zeros; GPS, heading and velocity are required.
DenseTrace densify(const Session& session, double period = kSamplePeriodS);

/// Expresses a dense trace as a session with one event per sensor and one GPS
/// fix per grid sample. densify(to_session(d)) reproduces d.
Session to_session(const DenseTrace& trace);

}  // namespace turnid
