#include "turnid/align.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "turnid/error.hpp"
#include "turnid/parallel.hpp"

namespace turnid {

double smoothness(std::span<const double> velocity) {
  if (velocity.size() < 2) throw PreconditionError("smoothness needs at least 2 samples");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < velocity.size(); ++i) {
    const double d = velocity[i + 1] - velocity[i];
    sum += d * d;
  }
  return sum / std::sqrt(static_cast<double>(velocity.size()));
}

double smoothness(const RawSegment& segment) { return smoothness(segment.column(Sensor::Velocity)); }

std::size_t select_baseline(std::span<const RawSegment> segments) {
  if (segments.empty()) throw PreconditionError("baseline selection needs at least one segment");
  std::size_t best = 0;
  double best_metric = smoothness(segments[0]);
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const double m = smoothness(segments[i]);
    if (m < best_metric || (m == best_metric && segments[i].session_start < segments[best].session_start)) {
      best = i;
      best_metric = m;
    }
  }
  return best;
}

namespace {

struct Projection {
  std::size_t edge = 0;
  double t = 0.0;
};

// Closest point on the polyline; the first edge wins ties.
Projection project(const std::vector<Vec2>& poly, const Vec2& p) {
  Projection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[i + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double ex = a.x + t * dx - p.x;
    const double ey = a.y + t * dy - p.y;
    const double d2 = ex * ex + ey * ey;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = {i, t};
    }
  }
  return best;
}

double lerp_bounded(double a, double b, double t) {
  return std::clamp((1.0 - t) * a + t * b, std::min(a, b), std::max(a, b));
}

}  // namespace

AlignedSegment align_segment(const RawSegment& segment, const RawSegment& baseline) {
  if (segment.site_id != baseline.site_id) {
    throw PreconditionError("segment of site " + std::to_string(segment.site_id) +
                            " aligned against baseline of site " + std::to_string(baseline.site_id));
  }
  if (segment.size() < 2) {
    throw PreconditionError("session \"" + segment.session_id + "\" has fewer than 2 samples at site " +
                            std::to_string(segment.site_id));
  }
  if (baseline.size() == 0) throw PreconditionError("baseline segment is empty");

  const LocalFrame frame(baseline.positions.front());
  std::vector<Vec2> poly;
  poly.reserve(segment.size());
  for (const LatLon& p : segment.positions) poly.push_back(frame.to_local(p));

  AlignedSegment out;
  out.site_id = segment.site_id;
  out.driver_id = segment.driver_id;
  out.session_id = segment.session_id;
  out.session_start = segment.session_start;
  out.locations = baseline.positions;
  const std::size_t k = baseline.size();
  for (auto& col : out.values) col.resize(k);

  for (std::size_t row = 0; row < k; ++row) {
    const Projection pr = project(poly, frame.to_local(baseline.positions[row]));
    for (Sensor s : kAllSensors) {
      const auto& col = segment.column(s);
      out.values[index(s)][row] = lerp_bounded(col[pr.edge], col[pr.edge + 1], pr.t);
    }
  }

  // Put the continuous heading on the same 360-degree branch as the baseline.
  auto& heading = out.values[index(Sensor::Heading)];
  const double turns = std::round((baseline.column(Sensor::Heading).front() - heading.front()) / 360.0);
  if (turns != 0.0) {
    for (double& h : heading) h += 360.0 * turns;
  }
  return out;
}

std::vector<AlignedSegment> align_site(std::span<const RawSegment> segments) {
  const std::size_t base = select_baseline(segments);
  std::vector<AlignedSegment> out(segments.size());
  parallel_for(segments.size(), [&](std::size_t i) { out[i] = align_segment(segments[i], segments[base]); });
  return out;
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, end - buf);
}

double get_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "bad number \"" + s + "\"");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

void write_aligned_csv(std::ostream& out, std::span<const AlignedSegment> segments) {
  const int site = segments.empty() ? 0 : segments.front().site_id;
  const std::size_t k = segments.empty() ? 0 : segments.front().rows();
  out << "# site=" << site << ",K=" << k << ",columns=";
  for (Sensor s : kAllSensors) out << (index(s) ? ";" : "") << log_name(s);
  out << "\nsession,driver,start,row,lat,lon";
  for (Sensor s : kAllSensors) out << ',' << log_name(s);
  out << '\n';
  for (const AlignedSegment& seg : segments) {
    if (seg.site_id != site || seg.rows() != k) {
      throw PreconditionError("aligned segments of one file must share site and K");
    }
    for (std::size_t r = 0; r < k; ++r) {
      out << seg.session_id << ',' << seg.driver_id << ',';
      put_double(out, seg.session_start);
      out << ',' << r << ',';
      put_double(out, seg.locations[r].lat);
      out << ',';
      put_double(out, seg.locations[r].lon);
      for (Sensor s : kAllSensors) {
        out << ',';
        put_double(out, seg.at(r, s));
      }
      out << '\n';
    }
  }
}

std::vector<AlignedSegment> read_aligned_csv(std::istream& in) {
  std::string text;
  std::size_t line = 1;
  if (!std::getline(in, text) || text.rfind("# site=", 0) != 0) throw ParseError(line, "missing tensor header");
  int site = 0;
  std::size_t k = 0;
  if (std::sscanf(text.c_str(), "# site=%d,K=%zu", &site, &k) != 2) throw ParseError(line, "bad tensor header");
  ++line;
  if (!std::getline(in, text)) throw ParseError(line, "missing column header");
  std::string expected = "session,driver,start,row,lat,lon";
  for (Sensor s : kAllSensors) expected += "," + std::string(log_name(s));
  if (text != expected) throw ParseError(line, "unexpected column header");

  std::vector<AlignedSegment> out;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const auto f = split(text, ',');
    if (f.size() != 6 + kSensorCount) throw ParseError(line, "expected " + std::to_string(6 + kSensorCount) + " fields");
    const auto row = static_cast<std::size_t>(get_double(f[3], line));
    if (row == 0) {
      AlignedSegment seg;
      seg.site_id = site;
      seg.session_id = f[0];
      seg.driver_id = f[1];
      seg.session_start = get_double(f[2], line);
      out.push_back(std::move(seg));
    }
    if (out.empty() || out.back().session_id != f[0] || out.back().rows() != row) {
      throw ParseError(line, "rows out of order");
    }
    AlignedSegment& seg = out.back();
    seg.locations.push_back({get_double(f[4], line), get_double(f[5], line)});
    for (Sensor s : kAllSensors) seg.values[index(s)].push_back(get_double(f[6 + index(s)], line));
  }
  for (const auto& seg : out) {
    if (seg.rows() != k) throw ParseError(line, "segment \"" + seg.session_id + "\" does not have K rows");
  }
  return out;
}

}  // namespace turnid
