#include "turnid/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "turnid/error.hpp"
#include "turnid/parallel.hpp"
#include "turnid/rng.hpp"

namespace turnid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;
constexpr double kIntegrationStepS = 0.01;

// Steering proxy: road-wheel angle atan(wheelbase * curvature), times the steering ratio.
constexpr double kWheelbaseM = 2.7;
constexpr double kSteeringRatio = 15.0;
constexpr double kReferenceRadiusM = 12.0;

constexpr double kDefaultApexLateralAcc = 2.5;  // m/s^2, apex speed = sqrt(a * R)
constexpr double kGripLimit = 8.0;              // m/s^2
constexpr double kSpeedFloor = 2.0;             // m/s
constexpr double kMinBrakeDistanceM = 5.0;
constexpr double kGasRampS = 0.5;
constexpr double kCruiseApproachS = 0.5;

// Powertrain map.
constexpr double kMassKg = 1500.0;
constexpr double kGravity = 9.80665;
constexpr double kRollingResistance = 0.012;
constexpr double kAeroCoeff = 0.4;  // N / (m/s)^2
constexpr double kWheelRadiusM = 0.31;
constexpr double kFinalDrive = 3.9;
constexpr std::array<double, 5> kGearRatios = {3.6, 2.2, 1.5, 1.1, 0.85};
constexpr std::array<double, 5> kUpshiftSpeeds = {0.0, 4.0, 8.0, 12.5, 17.0};
constexpr double kIdleRpm = 800.0;
constexpr double kMaxTorqueNm = 250.0;
constexpr double kEngineBrakeNm = -20.0;
constexpr double kThrottleLagS = 0.15;
constexpr double kIdleThrottle = 0.03;

constexpr double kNoiseCorrelationS = 0.3;

// Style axis ranges: center and full width at separation 1.
struct AxisRange {
  StyleAxis axis;
  const char* name;
  double center;
  double width;
};
constexpr std::array<AxisRange, 7> kAxisRanges = {{
    {StyleAxis::BrakeOnset, "brake_onset", 50.0, 40.0},
    {StyleAxis::PeakSteering, "peak_steering", 190.0, 80.0},
    {StyleAxis::SteeringRate, "steering_rate", 250.0, 200.0},
    {StyleAxis::GasOnsetLag, "gas_onset_lag", 1.0, 1.2},
    {StyleAxis::CruiseSpeed, "cruise_speed", 13.0, 4.0},
    {StyleAxis::AccelRate, "accel_rate", 1.8, 1.2},
    {StyleAxis::ApexSpeed, "apex_speed", 1.0, 0.3},
}};

double& axis_field(DriverStyle& s, StyleAxis a) {
  switch (a) {
    case StyleAxis::BrakeOnset: return s.brake_onset_m;
    case StyleAxis::PeakSteering: return s.peak_steering_deg;
    case StyleAxis::SteeringRate: return s.steering_rate_deg_s;
    case StyleAxis::GasOnsetLag: return s.gas_onset_lag_s;
    case StyleAxis::CruiseSpeed: return s.cruise_speed_mps;
    case StyleAxis::AccelRate: return s.accel_rate_mps2;
    case StyleAxis::ApexSpeed: return s.apex_speed_factor;
  }
  throw PreconditionError("unknown style axis");
}

void validate(const DriverStyle& s) {
  const double magnitudes[] = {s.brake_onset_m,    s.peak_steering_deg, s.steering_rate_deg_s, s.gas_onset_lag_s,
                               s.cruise_speed_mps, s.accel_rate_mps2,   s.apex_speed_factor};
  for (double m : magnitudes) {
    if (!(m > 0.0) || !std::isfinite(m)) throw PreconditionError("driver style magnitudes must be positive");
  }
  for (double m : s.noise_multipliers) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw PreconditionError("noise multipliers must be >= 0");
  }
  if (!(s.gps_noise_multiplier >= 0.0) || !(s.variability >= 0.0)) {
    throw PreconditionError("noise multipliers must be >= 0");
  }
}

void validate(const RouteSpec& r) {
  if (r.elements.empty()) throw PreconditionError("route has no elements");
  for (const auto& e : r.elements) {
    if (e.is_turn()) {
      const double a = std::abs(e.angle_deg);
      if (!(a > 0.0 && a < 180.0)) throw PreconditionError("turn angles must lie in (0, 180) degrees");
      if (!(e.radius_m > 0.0)) throw PreconditionError("turn radius must be positive");
      if (e.speed_mps < 0.0) throw PreconditionError("turn speed must be >= 0");
    } else if (!(e.length_m > 0.0)) {
      throw PreconditionError("straight legs must have positive length");
    }
  }
}

// One route element laid out along the path for a specific session.
struct PathPiece {
  double s0 = 0.0;
  double length = 0.0;
  bool turn = false;
  double sign = 1.0;
  double kappa = 0.0;       // peak curvature, 1/m
  double transition = 0.0;  // clothoid length at each end
  double apex_speed = 0.0;
  double angle_deg = 0.0;
  bool planted = false;

  double curvature(double s) const {
    if (!turn) return 0.0;
    const double u = std::clamp(s - s0, 0.0, length);
    double k = kappa;
    if (transition > 0.0) {
      if (u < transition) k = kappa * u / transition;
      else if (u > length - transition) k = kappa * (length - u) / transition;
    }
    return sign * k;
  }
  double end() const { return s0 + length; }
  double apex() const { return s0 + 0.5 * length; }
};

double nominal_steering_deg(double radius_m) { return kSteeringRatio * std::atan(kWheelbaseM / radius_m) * kDeg; }

std::vector<PathPiece> lay_out(const RouteSpec& route, const DriverStyle& p) {
  const double gain = p.peak_steering_deg / nominal_steering_deg(kReferenceRadiusM);
  std::vector<PathPiece> out;
  double s = 0.0;
  for (const auto& e : route.elements) {
    PathPiece piece;
    piece.s0 = s;
    if (!e.is_turn()) {
      piece.length = e.length_m;
    } else {
      piece.turn = true;
      piece.planted = e.planted;
      piece.angle_deg = e.angle_deg;
      piece.sign = e.angle_deg > 0.0 ? 1.0 : -1.0;
      const double wheel = std::min(gain * std::atan(kWheelbaseM / e.radius_m), 80.0 / kDeg);
      piece.kappa = std::tan(wheel) / kWheelbaseM;
      double v = e.speed_mps > 0.0 ? e.speed_mps : std::sqrt(kDefaultApexLateralAcc * e.radius_m);
      v = std::min(v, p.cruise_speed_mps) * p.apex_speed_factor;
      v = std::min(v, std::sqrt(kGripLimit / piece.kappa));
      if (v < kSpeedFloor) {
        throw PreconditionError("infeasible route: turn radius " + std::to_string(e.radius_m) +
                                " m cannot be taken above the speed floor");
      }
      piece.apex_speed = v;
      const double theta = std::abs(e.angle_deg) / kDeg;
      const double steer_peak = kSteeringRatio * wheel * kDeg;
      piece.transition = v * steer_peak / p.steering_rate_deg_s;
      double arc = theta / piece.kappa - piece.transition;
      if (arc < 0.0) {
        piece.transition = theta / piece.kappa;
        arc = 0.0;
      }
      piece.length = 2.0 * piece.transition + arc;
    }
    s += piece.length;
    out.push_back(piece);
  }
  return out;
}

DriverStyle jittered(const DriverStyle& style, Rng& rng) {
  DriverStyle p = style;
  if (style.variability <= 0.0) return p;
  std::normal_distribution<double> z(0.0, 1.0);
  for (const auto& r : kAxisRanges) {
    double& f = axis_field(p, r.axis);
    f *= std::max(0.2, 1.0 + style.variability * z(rng));
  }
  return p;
}

struct Sample {
  double t = 0.0;
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
  double kappa = 0.0;
  double heading = 0.0;  // radians clockwise from north, continuous
  Vec2 pos;
};

struct Trajectory {
  std::vector<Sample> samples;  // every kSimStepS
  std::vector<SimulatedTurn> turns;
};

Trajectory integrate(const RouteSpec& route, const DriverStyle& p, const LocalFrame& frame) {
  const auto pieces = lay_out(route, p);
  const double total = pieces.back().end();

  std::vector<std::size_t> turn_idx;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].turn) turn_idx.push_back(i);
  }
  std::vector<double> brake_start(turn_idx.size());
  for (std::size_t j = 0; j < turn_idx.size(); ++j) {
    const auto& tp = pieces[turn_idx[j]];
    const double prev_end = j == 0 ? 0.0 : pieces[turn_idx[j - 1]].end();
    brake_start[j] = std::clamp(tp.apex() - p.brake_onset_m, prev_end, std::max(prev_end, tp.s0 - kMinBrakeDistanceM));
  }

  Trajectory out;
  out.turns.resize(turn_idx.size());
  for (std::size_t j = 0; j < turn_idx.size(); ++j) {
    out.turns[j].angle_deg = pieces[turn_idx[j]].angle_deg;
    out.turns[j].planted = pieces[turn_idx[j]].planted;
  }

  const int substeps = static_cast<int>(std::lround(kSimStepS / kIntegrationStepS));
  std::size_t step = 0;
  double t = 0.0, s = 0.0, v = p.cruise_speed_mps, heading = route.start_heading_deg / kDeg;
  Vec2 pos{};
  double gas_onset = 0.0;  // time from which the driver may accelerate
  std::size_t next = 0;    // next turn not yet exited
  bool braking = false;
  double brake_decel = 0.0;
  std::vector<bool> entered(turn_idx.size(), false), apexed(turn_idx.size(), false);

  auto free_accel = [&](double now) {
    if (now < gas_onset || v >= p.cruise_speed_mps) return 0.0;
    const double ramp = std::min(1.0, (now - gas_onset) / kGasRampS);
    return std::min(p.accel_rate_mps2 * ramp, (p.cruise_speed_mps - v) / kCruiseApproachS);
  };

  auto commanded_accel = [&]() {
    if (next >= turn_idx.size()) return free_accel(t);
    const auto& tp = pieces[turn_idx[next]];
    if (s < brake_start[next]) return free_accel(t);
    if (s < tp.s0) {
      if (!braking) {
        braking = true;
        const double target = std::min(tp.apex_speed, v);
        brake_decel = (v * v - target * target) / (2.0 * std::max(tp.s0 - s, 1e-3));
      }
      const double a = -brake_decel;
      return v + a * kIntegrationStepS < std::min(tp.apex_speed, v) ? (std::min(tp.apex_speed, v) - v) / kIntegrationStepS
                                                                       : a;
    }
    // inside the turn: hold speed until the gas onset after the apex
    return apexed[next] ? free_accel(t) : 0.0;
  };

  auto record = [&](double a) {
    // sample times match the ingest grid bit for bit, whatever the session start
    const double ts = static_cast<double>(out.samples.size()) * kSimStepS;
    out.samples.push_back({ts, s, v, a, 0.0, heading, pos});
    std::size_t k = 0;
    while (k + 1 < pieces.size() && s >= pieces[k].end()) ++k;
    out.samples.back().kappa = pieces[k].curvature(s);
  };

  double a = commanded_accel();
  record(a);
  while (s < total) {
    for (int k = 0; k < substeps; ++k) {
      a = commanded_accel();
      const double v_next = std::max(0.0, v + a * kIntegrationStepS);
      const double ds = 0.5 * (v + v_next) * kIntegrationStepS;
      std::size_t piece = 0;
      const double s_mid = s + 0.5 * ds;
      while (piece + 1 < pieces.size() && s_mid >= pieces[piece].end()) ++piece;
      const double kappa_mid = pieces[piece].curvature(s_mid);
      const double h_mid = heading + 0.5 * kappa_mid * ds;
      pos.x += std::sin(h_mid) * ds;
      pos.y += std::cos(h_mid) * ds;
      heading += kappa_mid * ds;
      s += ds;
      v = v_next;
      t = static_cast<double>(++step) * kIntegrationStepS;

      if (next < turn_idx.size()) {
        const auto& tp = pieces[turn_idx[next]];
        if (!entered[next] && s >= tp.s0) {
          entered[next] = true;
          out.turns[next].start_time = t;
        }
        if (!apexed[next] && s >= tp.apex()) {
          apexed[next] = true;
          gas_onset = t + p.gas_onset_lag_s;
          out.turns[next].apex = frame.to_geo(pos);
        }
        if (s >= tp.end()) {
          out.turns[next].end_time = t;
          ++next;
          braking = false;
        }
      }
    }
    // the stored acceleration is the mean over the step so speed differences match exactly
    const double v_prev = out.samples.back().v;
    out.samples.back().a = (v - v_prev) / kSimStepS;
    record(0.0);
  }
  if (out.samples.size() >= 2) out.samples.back().a = out.samples[out.samples.size() - 2].a;
  return out;
}

// Zero-mean AR(1) noise with the given stationary standard deviation.
class NoiseTrack {
 public:
  NoiseTrack(double sigma, double dt) : sigma_(sigma), rho_(std::exp(-dt / kNoiseCorrelationS)) {}
  double next(Rng& rng) {
    if (sigma_ <= 0.0) return 0.0;
    std::normal_distribution<double> z(0.0, 1.0);
    if (!started_) {
      state_ = sigma_ * z(rng);
      started_ = true;
    } else {
      state_ = rho_ * state_ + std::sqrt(1.0 - rho_ * rho_) * sigma_ * z(rng);
    }
    return state_;
  }

 private:
  double sigma_;
  double rho_;
  double state_ = 0.0;
  bool started_ = false;
};

double quantize(double x, double step) { return std::round(x / step) * step; }

struct Powertrain {
  double rpm;
  double torque;
  double gas;
  double brake;
};

Powertrain powertrain(double v, double a) {
  std::size_t gear = 0;
  for (std::size_t g = 0; g < kUpshiftSpeeds.size(); ++g) {
    if (v >= kUpshiftSpeeds[g]) gear = g;
  }
  const double ratio = kGearRatios[gear] * kFinalDrive;
  const double force = kMassKg * a + kMassKg * kGravity * kRollingResistance + kAeroCoeff * v * v;
  const double demand = force * kWheelRadiusM / ratio;
  Powertrain pt{};
  pt.rpm = std::max(kIdleRpm, v / kWheelRadiusM * ratio * 60.0 / (2.0 * kPi));
  if (demand >= kEngineBrakeNm) {
    pt.torque = demand;
    pt.gas = std::clamp(demand / kMaxTorqueNm, 0.0, 1.0);
  } else {
    pt.torque = kEngineBrakeNm;
    const double brake_force = -force + kEngineBrakeNm * ratio / kWheelRadiusM;
    pt.brake = std::clamp(brake_force / (kMassKg * kGravity), 0.0, 1.0);
  }
  return pt;
}

}  // namespace

const std::array<double, kSensorCount>& base_noise_std() {
  // SW angle, SW vel, SW acc, velocity, heading, rpm, gas, brake, fwd acc, lat acc, torque, throttle
  static const std::array<double, kSensorCount> v = {0.3, 1.5, 10.0, 0.05, 0.2,  15.0,
                                                     0.01, 0.01, 0.08, 0.15, 3.0, 0.01};
  return v;
}

const std::array<double, kSensorCount>& quantization_steps() {
  static const std::array<double, kSensorCount> v = {0.5,   1.0,   5.0,  0.1,  0.1, 10.0,
                                                     0.005, 0.005, 0.05, 0.05, 1.0, 0.005};
  return v;
}

SimulatedSession simulate_session(const DriverStyle& style, const RouteSpec& route, std::uint64_t session_seed,
                                  const SessionMeta& meta) {
  validate(style);
  validate(route);
  const std::uint64_t seed = derive_seed(style.seed, session_seed);
  Rng behavior = make_rng(seed, 0);
  const DriverStyle p = jittered(style, behavior);
  const LocalFrame frame(route.start);
  Trajectory traj = integrate(route, p, frame);
  const auto& smp = traj.samples;
  const std::size_t n = smp.size();

  std::array<std::vector<double>, kSensorCount> clean;
  for (auto& c : clean) c.resize(n);
  auto col = [&](Sensor s) -> std::vector<double>& { return clean[index(s)]; };
  double throttle = kIdleThrottle;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = smp[i];
    const double kabs = std::abs(x.kappa);
    col(Sensor::SteeringAngle)[i] = std::copysign(kSteeringRatio * std::atan(kWheelbaseM * kabs) * kDeg, x.kappa);
    col(Sensor::Velocity)[i] = x.v;
    col(Sensor::Heading)[i] = x.heading * kDeg;
    col(Sensor::ForwardAcceleration)[i] = x.a;
    col(Sensor::LateralAcceleration)[i] = x.v * x.v * x.kappa;
    const Powertrain pt = powertrain(x.v, x.a);
    col(Sensor::EngineRpm)[i] = pt.rpm;
    col(Sensor::Torque)[i] = pt.torque;
    col(Sensor::GasPedal)[i] = pt.gas;
    col(Sensor::BrakePedal)[i] = pt.brake;
    const double target = kIdleThrottle + (1.0 - kIdleThrottle) * pt.gas;
    throttle += (target - throttle) * (1.0 - std::exp(-kSimStepS / kThrottleLagS));
    col(Sensor::Throttle)[i] = throttle;
  }
  auto central_diff = [&](const std::vector<double>& f, std::vector<double>& d) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = std::min(n - 1, i + 1);
      d[i] = hi == lo ? 0.0 : (f[hi] - f[lo]) / (static_cast<double>(hi - lo) * kSimStepS);
    }
  };
  central_diff(col(Sensor::SteeringAngle), col(Sensor::SteeringVelocity));
  central_diff(col(Sensor::SteeringVelocity), col(Sensor::SteeringAcceleration));

  SimulatedSession out;
  Session& sess = out.session;
  sess.session_id = meta.session_id;
  sess.driver_id = meta.driver_id;
  sess.start_time = meta.start_time;
  const auto& sigma = base_noise_std();
  const auto& q = quantization_steps();
  for (Sensor s : kAllSensors) {
    const std::size_t k = index(s);
    Rng rng = make_rng(seed, 1 + k);
    NoiseTrack noise(sigma[k] * style.noise_multipliers[k], kSimStepS);
    auto& events = sess.sensors[k];
    for (std::size_t i = 0; i < n; ++i) {
      double value = clean[k][i] + noise.next(rng);
      if (s == Sensor::Heading) value = wrap360(value);
      if (s == Sensor::Velocity || s == Sensor::GasPedal || s == Sensor::BrakePedal || s == Sensor::Throttle ||
          s == Sensor::EngineRpm) {
        value = std::max(0.0, value);
      }
      value = quantize(value, q[k]);
      if (s == Sensor::Heading) value = wrap360(value);
      if (events.empty() || events.back().value != value) {
        events.push_back({meta.start_time + smp[i].t, value});
      }
    }
  }

  Rng gps_rng = make_rng(seed, 100);
  std::normal_distribution<double> z(0.0, kBaseGpsNoiseM * style.gps_noise_multiplier);
  const double duration = smp.back().t;
  const auto fix_count = static_cast<std::size_t>(std::floor(duration / kGpsIntervalS + 1e-9)) + 1;
  for (std::size_t f = 0; f < fix_count; ++f) {
    const double tf = static_cast<double>(f) * kGpsIntervalS;
    const auto i = std::min(n - 1, static_cast<std::size_t>(std::lround(tf / kSimStepS)));
    Vec2 pos = smp[i].pos;
    if (style.gps_noise_multiplier > 0.0) {
      pos.x += z(gps_rng);
      pos.y += z(gps_rng);
    }
    sess.gps.push_back({meta.start_time + tf, frame.to_geo(pos)});
  }
  if (sess.gps.back().t < meta.start_time + duration) {
    sess.gps.push_back({meta.start_time + duration, frame.to_geo(smp.back().pos)});
  }
  sess.end_time = meta.start_time + duration;

  for (auto& turn : traj.turns) {
    turn.start_time += meta.start_time;
    turn.end_time += meta.start_time;
  }
  out.turns = std::move(traj.turns);
  return out;
}

std::string axis_name(StyleAxis a) {
  for (const auto& r : kAxisRanges) {
    if (r.axis == a) return r.name;
  }
  throw PreconditionError("unknown style axis");
}

StyleAxis axis_from_name(const std::string& name) {
  for (const auto& r : kAxisRanges) {
    if (name == r.name) return r.axis;
  }
  throw PreconditionError("unknown style axis \"" + name + "\"");
}

std::vector<DriverStyle> fleet_styles(const FleetConfig& config) {
  if (config.drivers < 1) throw PreconditionError("fleet needs at least 1 driver");
  if (config.separation < 0.0 || config.separation > 1.0) throw PreconditionError("separation must lie in [0, 1]");
  if (config.noise < 0.0) throw PreconditionError("noise level must be >= 0");
  const std::size_t n = config.drivers;
  DriverStyle base;
  base.noise_multipliers.fill(config.noise);
  base.gps_noise_multiplier = config.noise;
  base.variability = DriverStyle{}.variability * config.noise;
  std::vector<DriverStyle> styles(n, base);
  for (std::size_t d = 0; d < n; ++d) styles[d].seed = derive_seed(config.seed, 0x5354594cULL + d);

  for (const auto& r : kAxisRanges) {
    if (std::find(config.varied_axes.begin(), config.varied_axes.end(), r.axis) == config.varied_axes.end()) {
      continue;
    }
    std::vector<std::size_t> level(n);
    std::iota(level.begin(), level.end(), 0);
    Rng rng = make_rng(config.seed, 0x41584953ULL + static_cast<std::uint64_t>(r.axis));
    std::shuffle(level.begin(), level.end(), rng);
    for (std::size_t d = 0; d < n; ++d) {
      const double q = (static_cast<double>(level[d]) + 0.5) / static_cast<double>(n);
      axis_field(styles[d], r.axis) = r.center + config.separation * (q - 0.5) * r.width;
    }
  }
  return styles;
}

std::vector<SimulatedSession> gen_fleet(const FleetConfig& config) {
  const auto styles = fleet_styles(config);
  const std::size_t n = config.drivers;
  const std::size_t s = config.sessions_per_driver;
  std::vector<SimulatedSession> out(n * s);
  auto pad = [](std::size_t v, int width) {
    std::string t = std::to_string(v);
    return std::string(t.size() < static_cast<std::size_t>(width) ? width - t.size() : 0, '0') + t;
  };
  parallel_for(n * s, [&](std::size_t i) {
    const std::size_t d = i / s;
    const std::size_t k = i % s;
    SessionMeta meta;
    meta.driver_id = "driver_" + pad(d + 1, 2);
    meta.session_id = meta.driver_id + "_s" + pad(k + 1, 3);
    meta.start_time = static_cast<double>(k * n + d) * 3600.0;
    out[i] = simulate_session(styles[d], config.route, derive_seed(config.seed, 0x53455353ULL + i), meta);
  });
  return out;
}

void write_log(std::ostream& out, const std::vector<SimulatedSession>& sessions) {
  for (const auto& sim : sessions) {
    const Session& s = sim.session;
    std::vector<ChangeEvent> events;
    events.reserve(s.event_count());
    for (Sensor sensor : kAllSensors) {
      for (const auto& e : s.events(sensor)) events.push_back({e.t, s.session_id, s.driver_id, sensor, e.value, {}});
    }
    for (const auto& g : s.gps) events.push_back({g.t, s.session_id, s.driver_id, std::nullopt, 0.0, g.pos});
    // GPS first at equal times, then sensors in enum order
    auto rank = [](const ChangeEvent& e) { return e.sensor ? 1 + static_cast<int>(index(*e.sensor)) : 0; };
    std::stable_sort(events.begin(), events.end(), [&](const ChangeEvent& a, const ChangeEvent& b) {
      if (a.t != b.t) return a.t < b.t;
      return rank(a) < rank(b);
    });
    for (const auto& e : events) write_event(out, e);
  }
}

namespace {

using nlohmann::json;

RouteSpec route_from_json(const json& j) {
  RouteSpec r;
  if (j.contains("start")) {
    r.start.lat = j.at("start").at("lat").get<double>();
    r.start.lon = j.at("start").at("lon").get<double>();
  }
  r.start_heading_deg = j.value("heading", r.start_heading_deg);
  for (const auto& e : j.at("elements")) {
    const auto type = e.at("type").get<std::string>();
    if (type == "straight") {
      r.elements.push_back(RouteElement::straight(e.at("length").get<double>()));
    } else if (type == "turn") {
      r.elements.push_back(RouteElement::turn(e.at("angle").get<double>(), e.at("radius").get<double>(),
                                              e.value("speed", 0.0), e.value("planted", true)));
    } else {
      throw PreconditionError("unknown route element type \"" + type + "\"");
    }
  }
  validate(r);
  return r;
}

json route_to_json(const RouteSpec& r) {
  json elements = json::array();
  for (const auto& e : r.elements) {
    if (e.is_turn()) {
      elements.push_back({{"type", "turn"},
                          {"angle", e.angle_deg},
                          {"radius", e.radius_m},
                          {"speed", e.speed_mps},
                          {"planted", e.planted}});
    } else {
      elements.push_back({{"type", "straight"}, {"length", e.length_m}});
    }
  }
  return {{"start", {{"lat", r.start.lat}, {"lon", r.start.lon}}},
          {"heading", r.start_heading_deg},
          {"elements", std::move(elements)}};
}

}  // namespace

FleetConfig fleet_config_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FleetConfig c;
    c.drivers = j.value("drivers", c.drivers);
    c.sessions_per_driver = j.value("sessions", c.sessions_per_driver);
    c.separation = j.value("separation", c.separation);
    c.noise = j.value("noise", c.noise);
    c.seed = j.value("seed", c.seed);
    if (j.contains("vary")) {
      c.varied_axes.clear();
      for (const auto& a : j.at("vary")) c.varied_axes.push_back(axis_from_name(a.get<std::string>()));
    }
    c.route = j.contains("route") ? route_from_json(j.at("route")) : single_turn_route();
    if (c.drivers < 1) throw PreconditionError("fleet needs at least 1 driver");
    if (c.sessions_per_driver < 1) throw PreconditionError("fleet needs at least 1 session per driver");
    return c;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid fleet config: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ParseError(0, std::string("invalid fleet config: ") + e.what());
  }
}

std::string fleet_config_to_json(const FleetConfig& c) {
  json vary = json::array();
  for (StyleAxis a : c.varied_axes) vary.push_back(axis_name(a));
  json j{{"drivers", c.drivers},   {"sessions", c.sessions_per_driver}, {"separation", c.separation},
         {"noise", c.noise},       {"seed", c.seed},                    {"vary", std::move(vary)},
         {"route", route_to_json(c.route)}};
  return j.dump(2) + "\n";
}

RouteSpec single_turn_route(double angle_deg, double radius_m, double approach_m, double exit_m) {
  RouteSpec r;
  r.elements = {RouteElement::straight(approach_m), RouteElement::turn(angle_deg, radius_m),
                RouteElement::straight(exit_m)};
  return r;
}

}  // namespace turnid
