#include "turnid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "turnid/error.hpp"

namespace turnid {

using nlohmann::json;

std::size_t Session::event_count() const noexcept {
  std::size_t n = gps.size();
  for (const auto& s : sensors) n += s.size();
  return n;
}

namespace {

double number_field(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
  if (!it->is_number()) throw ParseError(line, std::string("field \"") + key + "\" is not a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(line, std::string("field \"") + key + "\" is not finite");
  return v;
}

std::string string_field(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw ParseError(line, std::string("field \"") + key + "\" is not a string");
  return it->get<std::string>();
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::array<UnitConversion, kSensorCount> parse_units(const json& header, std::size_t line) {
  std::array<UnitConversion, kSensorCount> conv{};
  const json& units = header.at("units");
  if (!units.is_object()) throw ParseError(line, "\"units\" must be an object");
  for (const auto& [name, unit] : units.items()) {
    auto sensor = sensor_from_log_name(name);
    if (!sensor) {
      if (name == kGpsSignalName) {
        if (unit.is_string() && unit.get<std::string>() == "deg") continue;
        throw ParseError(line, "gps positions must be declared in \"deg\"");
      }
      throw ParseError(line, "unknown signal name in units header: \"" + name + "\"");
    }
    if (!unit.is_string()) throw ParseError(line, "unit for \"" + name + "\" is not a string");
    auto c = unit_conversion(*sensor, unit.get<std::string>());
    if (!c) {
      throw ParseError(line, "unsupported unit \"" + unit.get<std::string>() + "\" for \"" + name + "\"");
    }
    conv[index(*sensor)] = *c;
  }
  return conv;
}

}  // namespace

std::vector<Session> parse_log(std::istream& in) {
  std::vector<Session> sessions;
  std::unordered_map<std::string, std::size_t> by_id;
  std::array<UnitConversion, kSensorCount> conv{};

  std::string text;
  std::size_t line = 0;
  bool seen_record = false;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(line, "record is not a JSON object");

    if (rec.contains("units")) {
      if (seen_record) throw ParseError(line, "units header must be the first line");
      conv = parse_units(rec, line);
      seen_record = true;
      continue;
    }
    seen_record = true;

    const double t = number_field(rec, "t", line);
    std::string session_id = string_field(rec, "session", line);
    std::string driver_id = string_field(rec, "driver", line);
    const std::string signal = string_field(rec, "signal", line);

    auto [it, inserted] = by_id.try_emplace(session_id, sessions.size());
    if (inserted) {
      Session s;
      s.session_id = std::move(session_id);
      s.driver_id = driver_id;
      s.start_time = t;
      s.end_time = t;
      sessions.push_back(std::move(s));
    }
    Session& s = sessions[it->second];
    if (s.driver_id != driver_id) {
      throw ParseError(line, "session \"" + s.session_id + "\" has driver \"" + s.driver_id +
                                 "\" but this record says \"" + driver_id + "\"");
    }

    if (signal == kGpsSignalName) {
      const double lat = number_field(rec, "lat", line);
      const double lon = number_field(rec, "lon", line);
      s.gps.push_back({t, {lat, lon}});
    } else {
      auto sensor = sensor_from_log_name(signal);
      if (!sensor) throw ParseError(line, "unknown signal name \"" + signal + "\"");
      double v = conv[index(*sensor)].apply(number_field(rec, "value", line));
      if (*sensor == Sensor::Heading) v = wrap360(v);
      s.events(*sensor).push_back({t, v});
    }
    s.start_time = std::min(s.start_time, t);
    s.end_time = std::max(s.end_time, t);
  }
  if (in.bad()) throw IoError("read error in log stream");

  auto by_time = [](const auto& a, const auto& b) { return a.t < b.t; };
  for (Session& s : sessions) {
    for (auto& events : s.sensors) std::stable_sort(events.begin(), events.end(), by_time);
    std::stable_sort(s.gps.begin(), s.gps.end(), by_time);
  }
  return sessions;
}

std::vector<Session> parse_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open log file: " + path.string());
  return parse_log(in);
}

void write_units_header(std::ostream& out, const UnitMap& units) {
  json u = json::object();
  for (const auto& [k, v] : units) u[k] = v;
  out << json{{"units", u}}.dump() << '\n';
}

void write_event(std::ostream& out, const ChangeEvent& ev) {
  json rec = json::object();
  rec["t"] = ev.t;
  rec["session"] = ev.session;
  rec["driver"] = ev.driver;
  if (ev.sensor) {
    rec["signal"] = std::string(log_name(*ev.sensor));
    rec["value"] = ev.value;
  } else {
    rec["signal"] = std::string(kGpsSignalName);
    rec["lat"] = ev.pos.lat;
    rec["lon"] = ev.pos.lon;
  }
  out << rec.dump() << '\n';
}

std::vector<double> make_grid(double start, double end, double period) {
  if (!(period > 0.0)) throw PreconditionError("grid period must be positive");
  std::size_t n = 1;
  if (end > start) n += static_cast<std::size_t>(std::ceil((end - start) / period - 1e-9));
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) * period;
  return grid;
}

std::vector<double> step_hold(std::span<const ScalarEvent> events, std::span<const double> grid) {
  if (events.empty()) throw PreconditionError("step_hold needs at least one event");
  std::vector<double> out(grid.size());
  std::size_t j = 0;  // index of the last event with t <= grid[i]
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (j + 1 < events.size() && events[j + 1].t <= grid[i]) ++j;
    out[i] = events[j].value;
  }
  return out;
}

std::vector<LatLon> interpolate_gps(std::span<const GpsFix> fixes, std::span<const double> grid) {
  if (fixes.size() < 2) throw PreconditionError("GPS interpolation needs at least 2 fixes");
  std::vector<LatLon> out(grid.size());
  std::size_t j = 0;  // fixes[j].t <= q < fixes[j + 1].t when interior
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid[i];
    while (j + 1 < fixes.size() && fixes[j + 1].t <= q) ++j;
    if (q <= fixes.front().t) {
      out[i] = fixes.front().pos;
    } else if (j + 1 >= fixes.size()) {
      out[i] = fixes.back().pos;
    } else {
      const GpsFix& a = fixes[j];
      const GpsFix& b = fixes[j + 1];
      const double w = (q - a.t) / (b.t - a.t);
      auto lerp = [w](double x, double y) {
        return std::clamp(x + w * (y - x), std::min(x, y), std::max(x, y));
      };
      out[i] = {lerp(a.pos.lat, b.pos.lat), lerp(a.pos.lon, b.pos.lon)};
    }
  }
  return out;
}

std::vector<LatLon> interpolate_gps(const Session& session, double period) {
  const auto grid = make_grid(session.start_time, session.end_time, period);
  return interpolate_gps(session.gps, grid);
}

DenseTrace densify(const Session& session, double period) {
  if (session.event_count() == 0) {
    throw PreconditionError("session \"" + session.session_id + "\" is empty");
  }
  if (session.gps.size() < 2) {
    throw PreconditionError("session \"" + session.session_id + "\" has fewer than 2 GPS fixes");
  }
  for (Sensor required : {Sensor::Heading, Sensor::Velocity}) {
    if (session.events(required).empty()) {
      throw PreconditionError("session \"" + session.session_id + "\" has no " +
                              std::string(log_name(required)) + " events");
    }
  }

  const auto grid = make_grid(session.start_time, session.end_time, period);
  DenseTrace d;
  d.session_id = session.session_id;
  d.driver_id = session.driver_id;
  d.start_time = session.start_time;
  d.period = period;
  for (Sensor s : kAllSensors) {
    const auto& ev = session.events(s);
    d.column(s) = ev.empty() ? std::vector<double>(grid.size(), 0.0) : step_hold(ev, grid);
  }
  d.positions = interpolate_gps(session.gps, grid);
  return d;
}

Session to_session(const DenseTrace& trace) {
  Session s;
  s.session_id = trace.session_id;
  s.driver_id = trace.driver_id;
  s.start_time = trace.start_time;
  s.end_time = trace.size() == 0 ? trace.start_time : trace.time_at(trace.size() - 1);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.time_at(i);
    for (Sensor k : kAllSensors) s.events(k).push_back({t, trace.column(k)[i]});
    s.gps.push_back({t, trace.positions[i]});
  }
  return s;
}

}  // namespace turnid
