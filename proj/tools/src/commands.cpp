#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "turnid/align.hpp"
#include "turnid/error.hpp"
#include "turnid/eval.hpp"
#include "turnid/features.hpp"
#include "turnid/model_io.hpp"
#include "turnid/parallel.hpp"
#include "turnid/pipeline.hpp"
#include "turnid/simgen.hpp"

namespace turnid::cli {

namespace fs = std::filesystem;

namespace {

// Command-line values; set ones override the config file.
struct Flags {
  std::vector<std::string> inputs;
  std::optional<std::string> out;
  std::optional<std::string> sites;
  std::vector<std::size_t> drivers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> top;
  std::optional<double> straightaway;
  std::string config;
};

RunConfig merge(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (!f.inputs.empty()) c.inputs = f.inputs;
  if (f.out) c.out = *f.out;
  if (f.sites) c.sites = *f.sites;
  if (!f.drivers.empty()) c.drivers = f.drivers;
  if (f.seed) c.seed = *f.seed;
  if (f.reps) c.repetitions = *f.reps;
  if (f.threads) c.threads = *f.threads;
  if (f.top) c.top = *f.top;
  if (f.straightaway) c.straightaway_offset_m = *f.straightaway;
  return c;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw CLI::RequiredError(what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<DenseTrace> load_traces(const std::vector<std::string>& inputs, std::ostream& err) {
  std::vector<Session> sessions;
  for (const auto& path : inputs) {
    auto s = parse_log_file(path);
    sessions.insert(sessions.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  std::vector<std::optional<DenseTrace>> dense(sessions.size());
  std::vector<std::string> problems(sessions.size());
  parallel_for(sessions.size(), [&](std::size_t i) {
    try {
      dense[i] = densify(sessions[i]);
    } catch (const PreconditionError& e) {
      problems[i] = e.what();
    }
  });
  std::vector<DenseTrace> out;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (dense[i]) {
      out.push_back(std::move(*dense[i]));
    } else {
      err << "warning: skipping session " << sessions[i].session_id << ": " << problems[i] << '\n';
    }
  }
  return out;
}

std::vector<AlignedSegment> load_aligned(const std::vector<std::string>& inputs) {
  std::vector<AlignedSegment> out;
  for (const auto& path : inputs) {
    std::istringstream in(read_file(path));
    auto segs = read_aligned_csv(in);
    out.insert(out.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  return out;
}

int cmd_detect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(!c.inputs.empty(), "--input is required");
  require(!c.out.empty(), "--out is required");
  const auto traces = load_traces(c.inputs, err);
  const auto events = detect_all(traces, c.detect);
  auto sites = cluster_turn_sites(events, c.radius_m);
  if (sites.size() > c.top) sites.resize(c.top);
  write_file(c.out, sites_to_json(sites));

  out << "Detected " << events.size() << " turns in " << traces.size() << " sessions\n";
  out << "Site  Latitude     Longitude    Count\n";
  for (const auto& s : sites) {
    char line[96];
    std::snprintf(line, sizeof line, "%-5d %-12.6f %-12.6f %zu\n", s.site_id, s.center.lat, s.center.lon, s.count);
    out << line;
  }
  return 0;
}

std::vector<TurnSite> load_sites(const RunConfig& c) {
  require(!c.sites.empty(), "--sites is required");
  return sites_from_json(read_file(c.sites));
}

int cmd_align(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(!c.inputs.empty(), "--input is required");
  require(!c.out.empty(), "--out is required");
  const auto sites = load_sites(c);
  const auto traces = load_traces(c.inputs, err);
  for (const auto& site : sites) {
    const auto segments = site_segments(traces, site, c.radius_m);
    if (segments.empty()) {
      err << "warning: site " << site.site_id << " has no traversals\n";
      continue;
    }
    const auto aligned = align_site(segments);
    std::ostringstream csv;
    write_aligned_csv(csv, aligned);
    const fs::path path = fs::path(c.out) / ("site_" + std::to_string(site.site_id) + ".csv");
    write_file(path, csv.str());
    out << "site " << site.site_id << ": " << aligned.size() << " segments, " << aligned.front().rows()
        << " samples -> " << path.string() << '\n';
  }
  return 0;
}

int cmd_featurize(const RunConfig& c, std::ostream& out, std::ostream&) {
  require(!c.inputs.empty(), "--input is required");
  require(!c.out.empty(), "--out is required");
  const auto aligned = load_aligned(c.inputs);
  if (aligned.empty()) throw PreconditionError("no aligned segments in input");
  const SitePca pca = fit_site_pca(aligned);
  std::vector<FeatureVector> rows;
  for (const auto& seg : aligned) rows.push_back(featurize(seg, pca));
  std::ostringstream csv;
  write_features_csv(csv, rows);
  write_file(c.out, csv.str());
  out << rows.size() << " feature vectors of " << kFeatureCount << " features -> " << c.out << '\n';
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream&) {
  require(!c.inputs.empty(), "--input is required");
  require(!c.out.empty(), "--out is required");
  const auto aligned = load_aligned(c.inputs);
  const std::size_t n = c.drivers.front();
  const auto top = select_top_drivers(aligned, n);
  std::map<std::string, std::vector<AlignedSegment>> per_driver;
  for (const auto& d : top) per_driver[d];
  for (const auto& seg : aligned) {
    if (auto it = per_driver.find(seg.driver_id); it != per_driver.end()) it->second.push_back(seg);
  }
  const SiteDataset ds = balance_sessions(std::move(per_driver), c.drop);
  std::vector<AlignedSegment> training;
  for (const auto& list : ds.sessions) training.insert(training.end(), list.begin(), list.end());
  ForestParams params = c.forest;
  params.seed = c.seed;
  const ForestModel model = train_site_model(training, params);
  write_file(c.out, model_to_json(model));
  out << "trained " << params.tree_count << " trees on " << training.size() << " sessions of " << n
      << " drivers -> " << c.out << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(!c.inputs.empty(), "--input is required");
  require(!c.out.empty(), "--out is required");
  const auto sites = load_sites(c);
  const auto traces = load_traces(c.inputs, err);
  const bool straight = c.straightaway_offset_m > 0.0;

  std::vector<EvalReport> reports;
  std::vector<SkippedSite> skipped;
  std::map<int, std::string> types;
  for (const auto& listed : sites) {
    types[listed.site_id] = listed.type;
    auto skip = [&](std::size_t n, const std::string& reason) {
      err << "warning: skipping site " << listed.site_id << " (n = " << n << "): " << reason << '\n';
      skipped.push_back({listed.site_id, n, reason});
    };
    TurnSite site = listed;
    if (straight) {
      try {
        site = offset_site(traces, listed, c.straightaway_offset_m, c.radius_m);
      } catch (const PreconditionError& e) {
        for (std::size_t n : c.drivers) skip(n, e.what());
        continue;
      }
    }
    const auto segments = site_segments(traces, site, c.radius_m);
    std::set<std::string> drivers;
    for (const auto& s : segments) drivers.insert(s.driver_id);
    const auto aligned = segments.empty() ? std::vector<AlignedSegment>{} : align_site(segments);
    for (std::size_t n : c.drivers) {
      if (drivers.size() < n) {
        skip(n, "only " + std::to_string(drivers.size()) + " drivers");
        continue;
      }
      EvalParams params;
      params.drivers = n;
      params.repetitions = c.repetitions;
      params.forest = c.forest;
      params.seed = c.seed;
      params.drop = c.drop;
      try {
        EvalReport r = evaluate_site(aligned, params);
        r.site_id = listed.site_id;
        r.segment_kind = straight ? "straightaway" : "turn";
        write_file(fs::path(c.out) / ("site_" + std::to_string(r.site_id) + "_n" + std::to_string(n) + ".json"),
                   report_to_json(r));
        reports.push_back(std::move(r));
      } catch (const PreconditionError& e) {
        skip(n, e.what());
      }
    }
  }
  const std::string table = render_table(reports, types, skipped);
  write_file(fs::path(c.out) / "summary.txt", table);
  out << table;
  return 0;
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream&) {
  require(!c.inputs.empty(), "--input is required");
  std::vector<std::string> files;
  for (const auto& in : c.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path().string());
      }
    } else {
      files.push_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalReport> reports;
  for (const auto& f : files) reports.push_back(report_from_json(read_file(f)));
  std::map<int, std::string> types;
  if (!c.sites.empty()) {
    for (const auto& s : sites_from_json(read_file(c.sites))) types[s.site_id] = s.type;
  }
  const std::string table = render_table(reports, types, {});
  if (!c.out.empty()) write_file(c.out, table);
  out << table;
  return 0;
}

int cmd_simulate(const RunConfig& c, const Flags& flags, std::ostream& out) {
  require(c.inputs.size() == 1, "--input must name one fleet config file");
  require(!c.out.empty(), "--out is required");
  FleetConfig fleet = fleet_config_from_json(read_file(c.inputs.front()));
  if (flags.seed) fleet.seed = *flags.seed;
  if (!flags.drivers.empty()) fleet.drivers = flags.drivers.front();
  const auto sessions = gen_fleet(fleet);
  std::ostringstream log;
  write_log(log, sessions);
  write_file(c.out, log.str());
  std::size_t events = 0;
  for (const auto& s : sessions) events += s.session.event_count() + s.session.gps.size();
  out << sessions.size() << " sessions, " << events << " events -> " << c.out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Driver identification from vehicle sensor traces at turns"};
  app.name("turnid");
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", flags.inputs, "Input file(s)");
    sub->add_option("--out,-o", flags.out, "Output file or directory");
    sub->add_option("--config", flags.config, "Run config JSON; flags override it");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
    sub->add_option("--seed", flags.seed, "Master seed");
  };
  auto add_sites = [&](CLI::App* sub) { sub->add_option("--sites", flags.sites, "Sites JSON from detect"); };
  auto add_drivers = [&](CLI::App* sub) {
    sub->add_option("--drivers,-n", flags.drivers, "Driver count(s) n, e.g. 2,5")->delimiter(',');
  };

  auto* detect = app.add_subcommand("detect", "Find turns and rank turn sites");
  add_common(detect);
  detect->add_option("--top", flags.top, "Keep the N most common sites");
  auto* align = app.add_subcommand("align", "Extract and align per-site segments");
  add_common(align);
  add_sites(align);
  auto* featurize = app.add_subcommand("featurize", "Compute feature vectors from aligned segments");
  add_common(featurize);
  auto* train = app.add_subcommand("train", "Train a site model on aligned segments");
  add_common(train);
  add_drivers(train);
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated accuracy per site");
  add_common(evaluate);
  add_sites(evaluate);
  add_drivers(evaluate);
  evaluate->add_option("--reps", flags.reps, "Fold reshuffles per site");
  evaluate->add_option("--straightaway", flags.straightaway, "Evaluate the straightaway this many meters past each site");
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic fleet log");
  add_common(simulate);
  add_drivers(simulate);
  auto* report = app.add_subcommand("report", "Render evaluation reports as a table");
  add_common(report);
  add_sites(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = merge(flags);
    set_thread_count(config.threads);
    if (detect->parsed()) return cmd_detect(config, out, err);
    if (align->parsed()) return cmd_align(config, out, err);
    if (featurize->parsed()) return cmd_featurize(config, out, err);
    if (train->parsed()) return cmd_train(config, out, err);
    if (evaluate->parsed()) return cmd_evaluate(config, out, err);
    if (simulate->parsed()) return cmd_simulate(config, flags, out);
    if (report->parsed()) return cmd_report(config, out, err);
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace turnid::cli
