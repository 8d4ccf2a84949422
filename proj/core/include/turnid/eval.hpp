#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turnid/forest.hpp"

namespace turnid {

/// Which sessions balancing discards from drivers with surplus sessions.
enum class DropOrder {
  Earliest,  ///< keep the most recent sessions
  Latest,    ///< keep the oldest sessions
};

/// Sessions of the selected drivers at one site, balanced to s per driver.
struct SiteDataset {
  int site_id = 0;
  /// Sorted ascending; index order matches forest class order.
  std::vector<std::string> drivers;
  /// sessions[d] is driver d's segments in chronological order.
  std::vector<std::vector<AlignedSegment>> sessions;

  std::size_t driver_count() const noexcept { return drivers.size(); }
  std::size_t sessions_per_driver() const noexcept { return sessions.empty() ? 0 : sessions.front().size(); }
};

/// (driver index, session index) into a SiteDataset.
struct SessionRef {
  std::size_t driver = 0;
  std::size_t session = 0;
  friend bool operator==(const SessionRef&, const SessionRef&) = default;
};

struct Fold {
  std::vector<SessionRef> train;
  std::vector<SessionRef> test;
};

/// The n drivers with the most sessions; ties by driver id ascending.
std::vector<std::string> select_top_drivers(const std::map<std::string, std::size_t>& session_counts, std::size_t n);
std::vector<std::string> select_top_drivers(std::span<const AlignedSegment> segments, std::size_t n);

/// Trims every driver to the smallest session count. Input lists may be in any
/// order; they are sorted by session start first.
SiteDataset balance_sessions(std::map<std::string, std::vector<AlignedSegment>> per_driver,
                             DropOrder drop = DropOrder::Earliest);

/// k = s folds. Each driver's sessions are permuted with a seeded generator and
/// dealt one per fold, so each test set holds exactly one session per driver.
std::vector<Fold> stratified_kfold(const SiteDataset& dataset, std::uint64_t seed);

/// PCA fit, featurization and forest training on one training set. The
/// returned model carries the PCA it was trained with.
ForestModel train_site_model(std::span<const AlignedSegment> training, const ForestParams& params);

struct EvalParams {
  std::size_t drivers = 2;
  /// Independent reshuffles of the folds; results are pooled.
  std::size_t repetitions = 10;
  ForestParams forest;
  std::uint64_t seed = 1;
  DropOrder drop = DropOrder::Earliest;
  /// Shuffle driver labels across sessions before evaluation (null-hypothesis check).
  bool permute_labels = false;
};

struct EvalReport {
  int site_id = 0;
  /// "turn" or "straight"; descriptive only.
  std::string segment_kind = "turn";
  std::size_t drivers = 0;
  std::size_t sessions_per_driver = 0;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  /// Mean fold accuracy, fraction in [0, 1].
  double accuracy = 0.0;
  std::vector<std::string> driver_ids;
  /// Raw counts pooled over all folds and repetitions; rows = true driver.
  std::vector<std::vector<std::size_t>> confusion_counts;
  /// Row-normalized integer percentages; every row sums to 100.
  std::vector<std::vector<int>> confusion_percent;
  std::vector<std::pair<Sensor, double>> sensor_importance;
  std::vector<double> fold_accuracies;
};

/// Full cross-validated evaluation of one site's aligned segments.
EvalReport evaluate_site(std::span<const AlignedSegment> aligned, const EvalParams& params);

/// Integer percentages that sum to exactly 100 (largest remainder).
std::vector<int> percent_row(std::span<const std::size_t> counts);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

struct SkippedSite {
  int site_id = 0;
  std::size_t drivers = 0;
  std::string reason;
};

/// Plaintext accuracy table: one row per site with "accuracy% (sessions per
/// driver)" per driver count, per-type averages and an overall average row.
std::string render_table(std::span<const EvalReport> reports, const std::map<int, std::string>& site_types,
                         std::span<const SkippedSite> skipped = {});

}  // namespace turnid
