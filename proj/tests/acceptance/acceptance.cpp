// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fleet.hpp"
#include "oracles.hpp"
#include "routes.hpp"
#include "turnid/eval.hpp"
#include "turnid/features.hpp"
#include "turnid/logistic.hpp"
#include "turnid/model_io.hpp"
#include "turnid/parallel.hpp"
#include "turnid/pipeline.hpp"
#include "turnid/rng.hpp"
#include "turnid/simgen.hpp"

using namespace turnid;
using namespace turnid::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Outcome transforms() {
  Rng rng(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(3, 257);
  double worst_energy = 0.0, worst_recon = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(len(rng));
    for (double& v : x) v = z(rng) * std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
    const auto c = haar_dwt(x);
    std::vector<double> padded(c.size(), x.back());
    std::copy(x.begin(), x.end(), padded.begin());
    const double e_in = dot(padded, padded), e_out = dot(c, c);
    worst_energy = std::max(worst_energy, std::abs(e_in - e_out) / e_in);
    const auto back = inverse_haar(c);
    double num = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) num += (back[i] - x[i]) * (back[i] - x[i]);
    worst_recon = std::max(worst_recon, std::sqrt(num / dot(x, x)));
  }

  double worst_pca = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (auto& r : rows) {
      for (std::size_t j = 0; j < m; ++j) r[j] = z(rng) * static_cast<double>(j + 1);
    }
    const auto pca = fit_pca(rows, 5);
    const auto oracle = jacobi_eigen(covariance(rows));
    for (std::size_t k = 0; k < pca.kept; ++k) {
      worst_pca = std::max(worst_pca, rel_err(pca.explained_variance[k], oracle.values[k]));
      worst_pca = std::max(worst_pca, 1.0 - std::abs(dot(pca.components[k], oracle.vectors[k])));
    }
    for (std::size_t k = pca.kept; k < std::min<std::size_t>({5, m, n - 1}); ++k) {
      // a dropped component must be numerically zero in the oracle too
      if (oracle.values[k] > 1e-9 * std::max(1.0, oracle.values[0])) worst_pca = 1.0;
    }
  }
  const bool ok = worst_energy <= 1e-9 && worst_recon <= 1e-9 && worst_pca <= 1e-8;
  return {ok, fmt("energy %.1e, reconstruction %.1e, pca %.1e", worst_energy, worst_recon, worst_pca)};
}

Outcome gradient_check() {
  Rng rng(77);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t classes = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
    const std::size_t f = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 12)(rng);
    std::vector<std::vector<double>> rows(n, std::vector<double>(f));
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : rows[i]) v = z(rng);
      y[i] = i % classes;
    }
    std::vector<double> w(classes * (f + 1));
    for (double& v : w) v = z(rng);
    const double lambda = 0.1 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> analytic;
    logistic_objective(w, rows, y, classes, lambda, &analytic);
    const auto numeric = numeric_gradient(
        [&](std::span<const double> x) { return logistic_objective(x, rows, y, classes, lambda, nullptr); }, w, 1e-5);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      norm += numeric[i] * numeric[i];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  return {worst <= 1e-5, fmt("max relative error %.2e over 20 instances", worst)};
}

Outcome turn_detection() {
  std::size_t detections = 0, true_positive = 0, planted = 0, recalled = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RouteSpec route = random_detection_route(seed);
    DriverStyle style;
    style.seed = seed;
    const auto sim = simulate_session(style, route, seed);
    const auto events = detect_turns(densify(sim.session));
    detections += events.size();
    auto overlaps = [](const TurnEvent& e, const SimulatedTurn& t) {
      return e.start_time < t.end_time && t.start_time < e.end_time;
    };
    for (const auto& e : events) {
      for (const auto& t : sim.turns) {
        if (t.planted && overlaps(e, t)) {
          ++true_positive;
          break;
        }
      }
    }
    for (const auto& t : sim.turns) {
      if (!t.planted) continue;
      ++planted;
      std::size_t hits = 0;
      for (const auto& e : events) hits += overlaps(e, t) ? 1 : 0;
      if (hits == 1) ++recalled;
    }
  }
  const double precision = detections ? static_cast<double>(true_positive) / static_cast<double>(detections) : 0.0;
  const double recall = static_cast<double>(recalled) / static_cast<double>(planted);
  return {precision == 1.0 && recall == 1.0,
          fmt("precision %.3f (%zu/%zu), recall %.3f (%zu/%zu)", precision, true_positive, detections, recall,
              recalled, planted)};
}

FleetConfig base_fleet(std::size_t drivers, std::uint64_t seed) {
  FleetConfig c;
  c.drivers = drivers;
  c.sessions_per_driver = 16;
  c.separation = 1.0;
  c.noise = 1.0;
  c.seed = seed;
  c.route = single_turn_route();
  return c;
}

EvalReport evaluate(const std::vector<AlignedSegment>& aligned, std::size_t drivers, std::size_t reps,
                    std::uint64_t seed = 1, bool permute = false) {
  EvalParams p;
  p.drivers = drivers;
  p.repetitions = reps;
  p.seed = seed;
  p.permute_labels = permute;
  return evaluate_site(aligned, p);
}

Outcome identification(std::size_t drivers, double threshold) {
  const auto segs = fleet_segments(base_fleet(drivers, 11));
  const auto r = evaluate(segs.turn, drivers, 10);
  return {r.accuracy >= threshold, fmt("accuracy %.1f%% (threshold %.0f%%, chance %.0f%%)", 100.0 * r.accuracy,
                                       100.0 * threshold, 100.0 / static_cast<double>(drivers))};
}

Outcome turn_vs_straight() {
  double turn = 0.0, straight = 0.0;
  constexpr int kSeeds = 10;
  for (int s = 0; s < kSeeds; ++s) {
    FleetConfig c = base_fleet(2, 100 + static_cast<std::uint64_t>(s));
    c.varied_axes = {StyleAxis::BrakeOnset, StyleAxis::PeakSteering, StyleAxis::SteeringRate, StyleAxis::ApexSpeed};
    const auto segs = fleet_segments(c, 120.0);
    turn += evaluate(segs.turn, 2, 2).accuracy / kSeeds;
    straight += evaluate(segs.straightaway, 2, 2).accuracy / kSeeds;
  }
  return {turn > straight, fmt("turn %.1f%% vs straightaway %.1f%% (mean of %d seeds)", 100.0 * turn,
                               100.0 * straight, kSeeds)};
}

Outcome permutation_null() {
  FleetConfig c = base_fleet(2, 23);
  c.sessions_per_driver = 40;
  const auto segs = fleet_segments(c);
  const auto r = evaluate(segs.turn, 2, 1, 5, true);
  const std::size_t total = 2 * r.sessions_per_driver;
  const auto correct = static_cast<std::size_t>(std::lround(r.accuracy * static_cast<double>(total)));
  const auto [lo, hi] = binomial_interval(total, 0.5, 0.01);
  return {correct >= lo && correct <= hi,
          fmt("%zu/%zu correct, 99%% null interval [%zu, %zu]", correct, total, lo, hi)};
}

Outcome determinism() {
  FleetConfig c = base_fleet(2, 31);
  c.sessions_per_driver = 6;
  std::vector<std::string> logs, models, reports;
  for (std::size_t threads : {1, 4, 8}) {
    set_thread_count(threads);
    std::ostringstream log;
    write_log(log, gen_fleet(c));
    logs.push_back(log.str());
    const auto segs = fleet_segments(c);
    ForestParams fp;
    fp.tree_count = 60;
    fp.seed = 9;
    models.push_back(model_to_json(train_site_model(segs.turn, fp)));
    EvalParams p;
    p.repetitions = 2;
    p.forest.tree_count = 60;
    reports.push_back(report_to_json(evaluate_site(segs.turn, p)));
  }
  set_thread_count(0);
  const bool ok = logs[0] == logs[1] && logs[0] == logs[2] && models[0] == models[1] && models[0] == models[2] &&
                  reports[0] == reports[1] && reports[0] == reports[2];
  return {ok, fmt("threads 1/4/8: logs %s, models %s, reports %s", logs[0] == logs[1] && logs[0] == logs[2] ? "equal" : "differ",
                  models[0] == models[1] && models[0] == models[2] ? "equal" : "differ",
                  reports[0] == reports[1] && reports[0] == reports[2] ? "equal" : "differ")};
}

Outcome importance_sanity() {
  // Five drivers keep the task short of perfect separation; with two, many
  // sensors split the classes cleanly and the Gini ranking among them is arbitrary.
  FleetConfig c = base_fleet(5, 41);
  c.varied_axes = {StyleAxis::PeakSteering, StyleAxis::SteeringRate};
  const auto segs = fleet_segments(c);
  const auto r = evaluate(segs.turn, 5, 10);
  const auto& top = r.sensor_importance.front();
  return {is_steering_family(top.first),
          fmt("top sensor %s (%.3f), runner-up %s (%.3f)", std::string(log_name(top.first)).c_str(), top.second,
              std::string(log_name(r.sensor_importance[1].first)).c_str(), r.sensor_importance[1].second)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0: no stated bound
  };
  const std::vector<Criterion> criteria = {
      {"transform correctness", transforms, 5.0},
      {"gradient check", gradient_check, 5.0},
      {"turn detection", turn_detection, 30.0},
      {"identification, 2 drivers", [] { return identification(2, 0.85); }, 60.0},
      {"identification, 5 drivers", [] { return identification(5, 0.60); }, 120.0},
      {"turn vs straightaway", turn_vs_straight, 0.0},
      {"permutation null", permutation_null, 0.0},
      {"determinism", determinism, 0.0},
      {"importance sanity", importance_sanity, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0.0) timing += fmt(" of %.0f s", c.budget_s);
    std::printf("%s  %-28s %s [%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
