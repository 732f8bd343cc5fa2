#pragma once

// Config-driven batch runs: a JSON run configuration, input loading, and detection over
// every (window, trace) with artifacts written under one output directory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cibnet/analysis.hpp"
#include "cibnet/graph_io.hpp"
#include "cibnet/ingest.hpp"
#include "cibnet/pipeline.hpp"

namespace cibnet {

namespace fs = std::filesystem;

inline constexpr std::string_view kVersion = "0.1.0";

struct InputPaths {
  fs::path posts;
  fs::path comments;
  fs::path embeddings;
  fs::path audio_dir;
};

struct RunConfig {
  InputPaths inputs;
  std::vector<Window> windows;  // empty: a single "all" window spanning the data
  bool allow_overlap = false;
  std::vector<TraceKind> traces;  // empty: every trace
  Json prune = Json::object();    // {"*": {...}, "<trace>": {...}} over the per-trace defaults
  TraceConfig trace;
  std::int64_t min_user_support = 2;
  fs::path out = "out";
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: all hardware threads
  Json source = Json::object();

  std::vector<TraceKind> selected_traces() const {
    if (!traces.empty()) return traces;
    return {kAllTraceKinds.begin(), kAllTraceKinds.end()};
  }
};

namespace detail {

inline std::int64_t config_time(const Json& v, const char* what) {
  try {
    return parse_timestamp(v);
  } catch (const DataError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

template <class T>
void read_field(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void apply_prune_patch(PruneConfig& p, const Json& j) {
  if (!j.is_object()) throw ConfigError("prune overrides must be objects");
  read_field(j, "node_percentile", p.node_percentile);
  read_field(j, "edge_percentile", p.edge_percentile);
  read_field(j, "node_percentile_combined", p.node_percentile_combined);
  read_field(j, "power_iteration_tol", p.power_iteration_tol);
  read_field(j, "max_iterations", p.max_iterations);
  if (j.contains("strategy")) p.strategy = parse_prune_strategy(j.at("strategy").get<std::string>());
  if (j.contains("scaling")) p.scaling = parse_centrality_scaling(j.at("scaling").get<std::string>());
}

}  // namespace detail

inline void validate_windows(const std::vector<Window>& windows, bool allow_overlap) {
  std::set<std::string> labels;
  for (const auto& w : windows) {
    if (w.label.empty()) throw ConfigError("window label must not be empty");
    if (!labels.insert(w.label).second) throw ConfigError("duplicate window label '" + w.label + "'");
    if (w.start >= w.end) throw ConfigError("window '" + w.label + "' ends before it starts");
  }
  if (allow_overlap) return;
  auto sorted = windows;
  std::sort(sorted.begin(), sorted.end(), [](const Window& a, const Window& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) {
      throw ConfigError("windows '" + sorted[i - 1].label + "' and '" + sorted[i].label + "' overlap");
    }
  }
}

/// Parses a run configuration; relative paths resolve against `base_dir`.
inline RunConfig run_config_from_json(const Json& j, const fs::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
  RunConfig cfg;
  cfg.source = j;
  auto path_of = [&](const char* key) -> fs::path {
    if (!j.contains(key)) return {};
    std::string s;
    detail::read_field(j, key, s);
    fs::path p(s);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  if (!j.contains("posts")) throw ConfigError("run configuration needs a 'posts' path");
  cfg.inputs = {path_of("posts"), path_of("comments"), path_of("embeddings"), path_of("audio_dir")};
  if (j.contains("out")) cfg.out = path_of("out");
  if (j.contains("windows")) {
    for (const auto& w : j.at("windows")) {
      Window win;
      detail::read_field(w, "label", win.label);
      if (!w.contains("start") || !w.contains("end")) throw ConfigError("windows need 'start' and 'end'");
      win.start = detail::config_time(w.at("start"), "window start");
      win.end = detail::config_time(w.at("end"), "window end");
      cfg.windows.push_back(std::move(win));
    }
  }
  detail::read_field(j, "allow_overlap", cfg.allow_overlap);
  validate_windows(cfg.windows, cfg.allow_overlap);
  if (j.contains("traces")) {
    for (const auto& t : j.at("traces")) cfg.traces.push_back(parse_trace_kind(t.get<std::string>()));
  }
  if (j.contains("prune")) {
    cfg.prune = j.at("prune");
    if (!cfg.prune.is_object()) throw ConfigError("'prune' must be an object keyed by trace name or '*'");
    for (const auto& [key, patch] : cfg.prune.items()) {
      if (key != "*") parse_trace_kind(key);
      PruneConfig probe;
      detail::apply_prune_patch(probe, patch);
      probe.validate();
    }
  }
  if (j.contains("trace")) {
    const auto& t = j.at("trace");
    detail::read_field(t, "min_hashtags", cfg.trace.min_hashtags);
    detail::read_field(t, "bin_width", cfg.trace.bin_width);
    detail::read_field(t, "registrable_domain", cfg.trace.domain.registrable_only);
    if (cfg.trace.bin_width <= 0) throw ConfigError("bin_width must be positive");
  }
  detail::read_field(j, "min_user_support", cfg.min_user_support);
  detail::read_field(j, "seed", cfg.seed);
  detail::read_field(j, "threads", cfg.threads);
  return cfg;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

/// FNV-1a of the canonical (key-sorted, compact) configuration, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(cfg.source.dump())));
  return buf;
}

/// Per-trace defaults with the configuration's prune overrides and shared settings applied.
inline TraceRunConfig trace_run_config(const RunConfig& cfg, TraceKind kind) {
  auto rc = default_run_config(kind);
  rc.trace = cfg.trace;
  rc.min_user_support = cfg.min_user_support;
  rc.threads = cfg.threads;
  if (cfg.prune.contains("*")) detail::apply_prune_patch(rc.prune, cfg.prune.at("*"));
  const std::string name(to_string(kind));
  if (cfg.prune.contains(name)) detail::apply_prune_patch(rc.prune, cfg.prune.at(name));
  return rc;
}

struct LoadedInputs {
  Dataset data;
  std::vector<std::pair<std::string, LedgerEntry>> ledger;  // (file, entry)
};

inline LoadedInputs load_inputs(const InputPaths& paths) {
  auto open = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("missing input '" + p.string() + "'");
    return in;
  };
  LoadedInputs out;
  {
    auto in = open(paths.posts);
    auto r = parse_posts(in);
    out.data.posts = std::move(r.records);
    for (auto& e : r.ledger) out.ledger.emplace_back(paths.posts.string(), std::move(e));
  }
  if (!paths.comments.empty()) {
    auto in = open(paths.comments);
    auto r = parse_comments(in);
    out.data.comments = std::move(r.records);
    for (auto& e : r.ledger) out.ledger.emplace_back(paths.comments.string(), std::move(e));
    for (auto& e : dangling_comments(out.data.comments, out.data.posts)) {
      out.ledger.emplace_back(paths.comments.string(), std::move(e));
    }
  }
  if (!paths.embeddings.empty()) {
    auto in = open(paths.embeddings);
    auto r = parse_embeddings(in);
    out.data.embeddings = std::move(r.records);
    for (auto& e : r.ledger) out.ledger.emplace_back(paths.embeddings.string(), std::move(e));
  }
  return out;
}

struct DetectOptions {
  std::optional<std::string> window;      // run only this window label
  std::vector<TraceKind> traces;          // non-empty: replaces the configured trace list
  std::optional<PruneStrategy> strategy;  // forces the strategy on every trace
  std::optional<std::size_t> threads;
  bool write_artifacts = true;
};

struct RunRecord {
  std::string window;
  TraceKind trace = TraceKind::HashtagSequence;
  std::string status = "ok";  // ok | convergence_error
  std::string message;
  std::size_t engagement_pairs = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t pruned_nodes = 0;
  std::vector<Cluster> clusters;
  std::vector<ClusterReport> reports;
  std::vector<StageTiming> timings;
};

struct DetectSummary {
  bool no_data = false;
  std::vector<RunRecord> runs;

  bool any_failed() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.status != "ok"; });
  }
  std::set<std::string> detected(TraceKind kind) const {
    std::set<std::string> out;
    for (const auto& r : runs) {
      if (r.trace != kind) continue;
      for (const auto& c : r.clusters) out.insert(c.members.begin(), c.members.end());
    }
    return out;
  }
};

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

inline std::vector<Window> effective_windows(const RunConfig& cfg, const Dataset& data) {
  if (!cfg.windows.empty()) return cfg.windows;
  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& p : data.posts) {
    lo = std::min(lo, p.timestamp);
    hi = std::max(hi, p.timestamp);
  }
  return {{"all", lo, hi + 1}};
}

inline Json manifest_json(const RunConfig& cfg, const DetectSummary& s) {
  Json runs = Json::array();
  for (const auto& r : s.runs) {
    Json timings = Json::object();
    for (const auto& t : r.timings) timings[t.stage] = t.seconds;
    runs.push_back({{"window", r.window},
                    {"trace", to_string(r.trace)},
                    {"status", r.status},
                    {"message", r.message},
                    {"engagement_pairs", r.engagement_pairs},
                    {"nodes", r.nodes},
                    {"edges", r.edges},
                    {"pruned_nodes", r.pruned_nodes},
                    {"clusters", r.clusters.size()},
                    {"timings", std::move(timings)}});
  }
  return {{"tool", "cibnet"},
          {"version", kVersion},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg.seed},
          {"runs", std::move(runs)}};
}

}  // namespace detail

/// Runs every selected (window, trace) pair. Traces that fail to converge are recorded and
/// skipped; other errors propagate. Artifacts:
///   <out>/manifest.json
///   <out>/<window>/<trace>/{network.csv, pruned.csv, clusters.json, report.json, report.txt,
///                           time_profile_<id>.csv}
inline DetectSummary run_detect(const RunConfig& cfg, const Dataset& data, const DetectOptions& opts = {}) {
  DetectSummary summary;
  if (data.posts.empty()) {
    summary.no_data = true;
    return summary;
  }
  auto windows = detail::effective_windows(cfg, data);
  if (opts.window) {
    std::erase_if(windows, [&](const Window& w) { return w.label != *opts.window; });
    if (windows.empty()) throw ConfigError("no window labelled '" + *opts.window + "'");
  }
  const auto traces = opts.traces.empty() ? cfg.selected_traces() : opts.traces;

  for (const auto& w : windows) {
    const auto slice = slice_window(data, w);
    std::vector<std::int64_t> baseline;
    for (const auto& p : slice.posts) baseline.push_back(p.timestamp);
    for (auto kind : traces) {
      auto rc = trace_run_config(cfg, kind);
      if (opts.strategy) rc.prune.strategy = *opts.strategy;
      if (opts.threads) rc.threads = *opts.threads;
      RunRecord rec;
      rec.window = w.label;
      rec.trace = kind;
      TraceRunResult res;
      try {
        res = run_trace(slice, rc, w.label);
      } catch (const ConvergenceError& e) {
        rec.status = "convergence_error";
        rec.message = e.what();
        summary.runs.push_back(std::move(rec));
        continue;
      }
      rec.engagement_pairs = res.engagement_pairs;
      rec.nodes = res.network.node_count();
      rec.edges = res.network.edge_count();
      rec.pruned_nodes = res.pruned.node_count();
      rec.clusters = std::move(res.clusters);
      rec.timings = std::move(res.timings);
      ReportOptions ro;
      ro.trace = rc.trace;
      for (std::size_t i = 0; i < rec.clusters.size(); ++i) {
        rec.reports.push_back(cluster_report(rec.clusters[i], i, slice.posts, slice.comments, ro));
      }

      if (opts.write_artifacts) {
        const fs::path dir = cfg.out / w.label / std::string(to_string(kind));
        fs::create_directories(dir);
        std::ostringstream net_csv, pruned_csv, table;
        write_edge_csv(net_csv, res.network);
        write_edge_csv(pruned_csv, res.pruned);
        detail::write_text(dir / "network.csv", net_csv.str());
        detail::write_text(dir / "pruned.csv", pruned_csv.str());
        Json clusters = Json::array(), reports = Json::array();
        for (const auto& c : rec.clusters) clusters.push_back(to_json(c));
        for (const auto& r : rec.reports) reports.push_back(to_json(r));
        detail::write_text(dir / "clusters.json", clusters.dump(2) + "\n");
        detail::write_text(dir / "report.json", reports.dump(2) + "\n");
        write_report_table(table, rec.reports);
        detail::write_text(dir / "report.txt", table.str());
        for (std::size_t i = 0; i < rec.clusters.size(); ++i) {
          const std::set<std::string> members(rec.clusters[i].members.begin(), rec.clusters[i].members.end());
          std::vector<std::int64_t> times;
          for (const auto& p : slice.posts) {
            if (members.count(p.user_id)) times.push_back(p.timestamp);
          }
          if (times.size() < 2 || baseline.size() < 2) continue;
          const auto [cp, bp] = time_gap_density(times, baseline, 60.0);
          std::ostringstream csv;
          write_time_profile_csv(csv, cp, bp);
          detail::write_text(dir / ("time_profile_" + std::to_string(i) + ".csv"), csv.str());
        }
      }
      summary.runs.push_back(std::move(rec));
    }
  }
  if (opts.write_artifacts) {
    fs::create_directories(cfg.out);
    detail::write_text(cfg.out / "manifest.json", detail::manifest_json(cfg, summary).dump(2) + "\n");
  }
  return summary;
}

}  // namespace cibnet
