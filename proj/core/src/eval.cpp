#include "turnid/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "turnid/error.hpp"
#include "turnid/parallel.hpp"
#include "turnid/rng.hpp"

namespace turnid {

namespace {
constexpr std::uint64_t kPermutationStream = 0x7065726dULL;
constexpr std::uint64_t kFoldStreamBase = 1000;
}  // namespace

std::vector<std::string> select_top_drivers(const std::map<std::string, std::size_t>& session_counts,
                                            std::size_t n) {
  if (session_counts.size() < n) {
    throw PreconditionError("need " + std::to_string(n) + " drivers, site has " +
                            std::to_string(session_counts.size()));
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(session_counts.begin(), session_counts.end());
  // map order is lexicographic, so a stable sort keeps id order among ties
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<std::string> select_top_drivers(std::span<const AlignedSegment> segments, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : segments) ++counts[s.driver_id];
  return select_top_drivers(counts, n);
}

SiteDataset balance_sessions(std::map<std::string, std::vector<AlignedSegment>> per_driver, DropOrder drop) {
  SiteDataset ds;
  std::size_t s = std::numeric_limits<std::size_t>::max();
  for (auto& [driver, list] : per_driver) {
    if (list.empty()) throw PreconditionError("driver \"" + driver + "\" has no sessions");
    s = std::min(s, list.size());
  }
  for (auto& [driver, list] : per_driver) {
    std::stable_sort(list.begin(), list.end(),
                     [](const AlignedSegment& a, const AlignedSegment& b) { return a.session_start < b.session_start; });
    const auto surplus = static_cast<std::ptrdiff_t>(list.size() - s);
    if (drop == DropOrder::Earliest) {
      list.erase(list.begin(), list.begin() + surplus);
    } else {
      list.erase(list.end() - surplus, list.end());
    }
    ds.drivers.push_back(driver);
    ds.sessions.push_back(std::move(list));
  }
  if (!ds.sessions.empty() && !ds.sessions.front().empty()) ds.site_id = ds.sessions.front().front().site_id;
  return ds;
}

std::vector<Fold> stratified_kfold(const SiteDataset& ds, std::uint64_t seed) {
  const std::size_t s = ds.sessions_per_driver();
  if (s < 2) throw PreconditionError("stratified k-fold needs at least 2 sessions per driver");
  std::vector<Fold> folds(s);
  for (std::size_t d = 0; d < ds.driver_count(); ++d) {
    if (ds.sessions[d].size() != s) throw PreconditionError("dataset is not balanced");
    std::vector<std::size_t> perm(s);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = make_rng(seed, d);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t f = 0; f < s; ++f) folds[f].test.push_back({d, perm[f]});
  }
  for (std::size_t f = 0; f < s; ++f) {
    for (std::size_t d = 0; d < ds.driver_count(); ++d) {
      for (std::size_t k = 0; k < s; ++k) {
        const SessionRef ref{d, k};
        if (std::find(folds[f].test.begin(), folds[f].test.end(), ref) == folds[f].test.end()) {
          folds[f].train.push_back(ref);
        }
      }
    }
  }
  return folds;
}

ForestModel train_site_model(std::span<const AlignedSegment> training, const ForestParams& params) {
  SitePca pca = fit_site_pca(training);
  std::vector<FeatureVector> features;
  features.reserve(training.size());
  for (const auto& seg : training) features.push_back(featurize(seg, pca));
  ForestModel model = train_forest(features, params);
  model.pca = std::move(pca);
  return model;
}

namespace {

SiteDataset permute_labels(const SiteDataset& ds, std::uint64_t seed) {
  std::vector<const AlignedSegment*> items;
  std::vector<std::string> labels;
  for (std::size_t d = 0; d < ds.driver_count(); ++d) {
    for (const auto& seg : ds.sessions[d]) {
      items.push_back(&seg);
      labels.push_back(ds.drivers[d]);
    }
  }
  Rng rng = make_rng(seed, kPermutationStream);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::map<std::string, std::vector<AlignedSegment>> regrouped;
  for (std::size_t i = 0; i < items.size(); ++i) {
    AlignedSegment seg = *items[i];
    seg.driver_id = labels[i];
    regrouped[labels[i]].push_back(std::move(seg));
  }
  return balance_sessions(std::move(regrouped));
}

}  // namespace

EvalReport evaluate_site(std::span<const AlignedSegment> aligned, const EvalParams& params) {
  if (params.drivers < 2) throw PreconditionError("evaluation needs at least 2 drivers");
  if (params.repetitions < 1) throw PreconditionError("evaluation needs at least 1 repetition");
  if (aligned.empty()) throw PreconditionError("no aligned segments to evaluate");

  const auto top = select_top_drivers(aligned, params.drivers);
  std::map<std::string, std::vector<AlignedSegment>> per_driver;
  for (const auto& d : top) per_driver[d];
  for (const auto& seg : aligned) {
    auto it = per_driver.find(seg.driver_id);
    if (it != per_driver.end()) it->second.push_back(seg);
  }
  SiteDataset ds = balance_sessions(std::move(per_driver), params.drop);
  if (params.permute_labels) ds = permute_labels(ds, params.seed);
  const std::size_t s = ds.sessions_per_driver();
  const std::size_t n = ds.driver_count();
  if (s < 2) {
    throw PreconditionError("site " + std::to_string(ds.site_id) + " has fewer than 2 sessions per driver");
  }

  struct Job {
    std::size_t rep;
    std::size_t fold;
    std::uint64_t forest_seed;
    const Fold* split;
  };
  std::vector<std::vector<Fold>> all_folds(params.repetitions);
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < params.repetitions; ++r) {
    const std::uint64_t rep_seed = derive_seed(params.seed, r);
    all_folds[r] = stratified_kfold(ds, rep_seed);
    for (std::size_t f = 0; f < all_folds[r].size(); ++f) {
      jobs.push_back({r, f, derive_seed(rep_seed, kFoldStreamBase + f), &all_folds[r][f]});
    }
  }

  struct JobResult {
    std::vector<std::size_t> predicted;  // class index per test ref
    std::vector<double> importances;
  };
  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    std::vector<AlignedSegment> train;
    train.reserve(job.split->train.size());
    for (const SessionRef& ref : job.split->train) train.push_back(ds.sessions[ref.driver][ref.session]);
    ForestParams fp = params.forest;
    fp.seed = job.forest_seed;
    const ForestModel model = train_site_model(train, fp);
    for (const SessionRef& ref : job.split->test) {
      const FeatureVector fv = featurize(ds.sessions[ref.driver][ref.session], *model.pca);
      results[j].predicted.push_back(model.predict(fv.values).class_index);
    }
    results[j].importances = model.importances;
  });

  EvalReport report;
  report.site_id = ds.site_id;
  report.segment_kind = "turn";
  report.drivers = n;
  report.sessions_per_driver = s;
  report.repetitions = params.repetitions;
  report.seed = params.seed;
  report.driver_ids = ds.drivers;
  report.confusion_counts.assign(n, std::vector<std::size_t>(n, 0));

  std::vector<double> importance(kFeatureCount, 0.0);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    std::size_t fold_correct = 0;
    const auto& test = jobs[j].split->test;
    for (std::size_t k = 0; k < test.size(); ++k) {
      const std::size_t truth = test[k].driver;
      const std::size_t pred = results[j].predicted[k];
      ++report.confusion_counts[truth][pred];
      if (truth == pred) ++fold_correct;
    }
    correct += fold_correct;
    total += test.size();
    report.fold_accuracies.push_back(static_cast<double>(fold_correct) / static_cast<double>(test.size()));
    for (std::size_t f = 0; f < kFeatureCount && f < results[j].importances.size(); ++f) {
      importance[f] += results[j].importances[f] / static_cast<double>(jobs.size());
    }
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  for (const auto& row : report.confusion_counts) report.confusion_percent.push_back(percent_row(row));
  report.sensor_importance = sensor_importance(importance);
  return report;
}

std::vector<int> percent_row(std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<int> out(counts.size(), 0);
  if (total == 0) return out;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder * total scale, index)
  int assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t scaled = counts[i] * 100;
    out[i] = static_cast<int>(scaled / total);
    assigned += out[i];
    remainders.emplace_back(scaled % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < 100; ++k, ++assigned) ++out[remainders[k].second];
  return out;
}

}  // namespace turnid
