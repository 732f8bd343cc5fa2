#pragma once

// End-to-end detection for one (trace, window): traces -> network -> pruning ->
// clusters, plus the data-loss robustness protocol built on top of it.

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cibnet/error.hpp"
#include "cibnet/prune.hpp"
#include "cibnet/simnet.hpp"
#include "cibnet/synthbench.hpp"
#include "cibnet/traces.hpp"

namespace cibnet {

struct TraceRunConfig {
  TraceKind kind = TraceKind::HashtagSequence;
  TraceConfig trace;
  MatchConfig match;
  TfidfOptions tfidf;
  PruneConfig prune;
  std::int64_t min_user_support = 2;  // users with less total engagement are left out
  bool drop_isolated = false;
  std::size_t threads = 1;
};

/// Per-trace defaults: node pruning at the 98th percentile for bipartite traces, edge
/// then node pruning for synchronized posting, and no pruning for match networks,
/// whose edges already require repeated co-timed matches. Sparse co-domain components
/// can have a small spectral gap, so the iteration budget is raised to 100000.
inline constexpr std::size_t kPipelineMaxIterations = 100000;

inline TraceRunConfig default_run_config(TraceKind kind) {
  TraceRunConfig cfg;
  cfg.kind = kind;
  cfg.prune.max_iterations = kPipelineMaxIterations;
  cfg.match = default_match_config(kind);
  if (kind == TraceKind::SynchronizedPosting) {
    cfg.prune.strategy = PruneStrategy::EdgeThenNode;
  } else if (!is_bipartite(kind)) {
    cfg.prune.node_percentile = 0.0;
  }
  return cfg;
}

struct Window {
  std::string label;
  std::int64_t start = 0;  // inclusive
  std::int64_t end = 0;    // exclusive
};

/// Posts, comments and embeddings whose post falls inside the window.
inline Dataset slice_window(const Dataset& data, const Window& w) {
  Dataset out;
  std::set<std::string> kept;
  for (const auto& p : data.posts) {
    if (p.timestamp >= w.start && p.timestamp < w.end) {
      out.posts.push_back(p);
      kept.insert(p.post_id);
    }
  }
  for (const auto& c : data.comments) {
    if (c.timestamp >= w.start && c.timestamp < w.end) out.comments.push_back(c);
  }
  for (const auto& e : data.embeddings) {
    if (kept.count(e.post_id)) out.embeddings.push_back(e);
  }
  return out;
}

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct TraceRunResult {
  TraceKind kind = TraceKind::HashtagSequence;
  std::string window;
  std::size_t engagement_pairs = 0;  // bipartite pairs or match pairs
  SimilarityNetwork network;
  SimilarityNetwork pruned;
  std::vector<Cluster> clusters;
  std::vector<StageTiming> timings;

  std::set<std::string> detected() const {
    std::set<std::string> out;
    for (const auto& c : clusters) out.insert(c.members.begin(), c.members.end());
    return out;
  }
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink), last_(std::chrono::steady_clock::now()) {}
  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

/// Builds the similarity network for cfg.kind from `data`.
inline SimilarityNetwork build_network(const Dataset& data, const TraceRunConfig& cfg, std::size_t* pair_count = nullptr) {
  SimilarityNetwork net;
  if (is_bipartite(cfg.kind)) {
    auto pairs = filter_min_support(extract_bipartite_pairs(data.posts, data.comments, cfg.kind, cfg.trace),
                                    cfg.min_user_support);
    if (pair_count) *pair_count = pairs.size();
    net = project_users(tfidf_weight(build_bipartite(pairs), cfg.tfidf), cfg.kind, {cfg.threads, cfg.drop_isolated});
  } else {
    auto matches = extract_embedding_matches(data.posts, data.embeddings, cfg.kind, cfg.match, cfg.threads);
    if (pair_count) *pair_count = matches.size();
    std::vector<std::string> extra;
    if (!cfg.drop_isolated) {
      const auto want = embedding_kind_for(cfg.kind);
      std::set<std::string> with_embedding;
      for (const auto& e : data.embeddings) {
        if (e.kind == want) with_embedding.insert(e.post_id);
      }
      for (const auto& p : data.posts) {
        if (with_embedding.count(p.post_id)) extra.push_back(p.user_id);
      }
    }
    net = build_match_network(matches, cfg.kind, std::move(extra));
  }
  return net;
}

inline TraceRunResult run_trace(const Dataset& data, const TraceRunConfig& cfg, const std::string& window = {}) {
  cfg.prune.validate();
  TraceRunResult r;
  r.kind = cfg.kind;
  r.window = window;
  detail::StageClock clock(r.timings);
  r.network = build_network(data, cfg, &r.engagement_pairs);
  r.network.window = window;
  clock.mark("network");
  r.pruned = prune(r.network, cfg.prune);
  clock.mark("prune");
  r.clusters = connected_components(r.pruned);
  clock.mark("components");
  return r;
}

// ---------------------------------------------------------------------------
// Robustness

struct RobustnessConfig {
  std::vector<TraceKind> traces = {TraceKind::HashtagSequence, TraceKind::CoDomainDescription,
                                   TraceKind::SpeechSimilarity, TraceKind::VideoSimilarity};
  std::vector<double> loss_fractions = {0.05, 0.10};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::map<TraceKind, TraceRunConfig> run;  // overrides of default_run_config
  std::size_t threads = 1;

  TraceRunConfig config_for(TraceKind kind) const {
    auto it = run.find(kind);
    auto cfg = it == run.end() ? default_run_config(kind) : it->second;
    cfg.threads = threads;
    return cfg;
  }
};

struct RetentionCell {
  double mean = 0.0;
  std::vector<double> per_seed;  // NaN-free; seeds with no detected campaign accounts are skipped
  std::size_t skipped = 0;
};

struct RobustnessRow {
  TraceKind trace = TraceKind::HashtagSequence;
  std::vector<RetentionCell> cells;  // one per loss fraction
};

/// For every seed: generate the scenario, detect on the full corpus, then on corpora with
/// posts removed at each loss fraction. Retention compares the campaign accounts detected
/// in both runs.
inline std::vector<RobustnessRow> robustness(const Scenario& scenario, const RobustnessConfig& cfg) {
  for (double f : cfg.loss_fractions) {
    if (!(f >= 0.0 && f < 1.0)) throw ConfigError("loss fraction must lie in [0, 1)");
  }
  std::vector<RobustnessRow> rows;
  for (auto kind : cfg.traces) rows.push_back({kind, std::vector<RetentionCell>(cfg.loss_fractions.size())});
  for (auto seed : cfg.seeds) {
    const auto gen = generate(scenario, seed, cfg.threads);
    const auto positives = gen.truth.campaign_accounts();
    std::vector<Dataset> degraded;
    for (std::size_t f = 0; f < cfg.loss_fractions.size(); ++f) {
      degraded.push_back(restrict_to_posts(gen.data, drop_posts(gen.data.posts, cfg.loss_fractions[f], seed * 1000 + f)));
    }
    for (std::size_t t = 0; t < cfg.traces.size(); ++t) {
      const auto run_cfg = cfg.config_for(cfg.traces[t]);
      std::set<std::string> full;
      for (const auto& u : run_trace(gen.data, run_cfg).detected()) {
        if (positives.count(u)) full.insert(u);
      }
      for (std::size_t f = 0; f < degraded.size(); ++f) {
        auto& cell = rows[t].cells[f];
        if (full.empty()) {
          ++cell.skipped;
          continue;
        }
        cell.per_seed.push_back(retention(full, run_trace(degraded[f], run_cfg).detected()));
      }
    }
  }
  for (auto& row : rows) {
    for (auto& cell : row.cells) {
      double sum = 0.0;
      for (double v : cell.per_seed) sum += v;
      cell.mean = cell.per_seed.empty() ? 0.0 : sum / static_cast<double>(cell.per_seed.size());
    }
  }
  return rows;
}

}  // namespace cibnet
