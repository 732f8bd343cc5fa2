#pragma once

// Eigenvector centrality, percentile pruning and connected-component extraction.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cibnet/detail/union_find.hpp"
#include "cibnet/error.hpp"
#include "cibnet/simnet.hpp"
#include "json.hpp"

namespace cibnet {

enum class PruneStrategy { NodeOnly, EdgeThenNode };

inline std::string to_string(PruneStrategy s) { return s == PruneStrategy::NodeOnly ? "node" : "edge+node"; }

inline PruneStrategy parse_prune_strategy(std::string_view s) {
  if (s == "node" || s == "node_only" || s == "NodeOnly") return PruneStrategy::NodeOnly;
  if (s == "edge+node" || s == "edge_then_node" || s == "EdgeThenNode") return PruneStrategy::EdgeThenNode;
  throw ConfigError("unknown prune strategy '" + std::string(s) + "'");
}

/// How per-component eigenvectors are put on a common scale.
enum class CentralityScaling {
  /// Unit eigenvector times the component's dominant eigenvalue. A k-clique of unit
  /// weights scores (k-1)/sqrt(k) per member, so larger and denser groups outrank
  /// small components.
  ComponentEigenvalue,
  /// Unit L2 norm within every component.
  ComponentUnit,
  /// One power iteration over all non-isolated nodes.
  Global,
};

inline std::string to_string(CentralityScaling s) {
  switch (s) {
    case CentralityScaling::ComponentEigenvalue: return "component_eigenvalue";
    case CentralityScaling::ComponentUnit: return "component_unit";
    case CentralityScaling::Global: return "global";
  }
  return "component_eigenvalue";
}

inline CentralityScaling parse_centrality_scaling(std::string_view s) {
  if (s == "component_eigenvalue") return CentralityScaling::ComponentEigenvalue;
  if (s == "component_unit") return CentralityScaling::ComponentUnit;
  if (s == "global") return CentralityScaling::Global;
  throw ConfigError("unknown centrality scaling '" + std::string(s) + "'");
}

struct CentralityOptions {
  double tol = 1e-8;
  std::size_t max_iterations = 1000;
  CentralityScaling scaling = CentralityScaling::ComponentEigenvalue;
};

struct PruneConfig {
  double node_percentile = 98.0;
  double edge_percentile = 99.5;
  double node_percentile_combined = 95.0;
  PruneStrategy strategy = PruneStrategy::NodeOnly;
  double power_iteration_tol = 1e-8;
  std::size_t max_iterations = 1000;
  CentralityScaling scaling = CentralityScaling::ComponentEigenvalue;

  CentralityOptions centrality() const { return {power_iteration_tol, max_iterations, scaling}; }

  void validate() const {
    for (double p : {node_percentile, edge_percentile, node_percentile_combined}) {
      if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("percentile must lie in [0, 100]");
    }
    if (!(power_iteration_tol > 0.0)) throw ConfigError("power iteration tolerance must be positive");
    if (max_iterations == 0) throw ConfigError("max_iterations must be positive");
  }
};

namespace detail {

struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> neighbors;  // ascending per node
  std::vector<double> weights;
};

inline Adjacency build_adjacency(const SimilarityNetwork& net) {
  Adjacency adj;
  const std::size_t n = net.node_count();
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : net.edges) {
    ++adj.offsets[e.u + 1];
    ++adj.offsets[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) adj.offsets[i + 1] += adj.offsets[i];
  adj.neighbors.resize(adj.offsets[n]);
  adj.weights.resize(adj.offsets[n]);
  std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
  // Edges are sorted by (u, v), so appending in two passes keeps each list ascending.
  for (const auto& e : net.edges) {
    adj.neighbors[fill[e.v]] = e.u;
    adj.weights[fill[e.v]++] = e.w;
  }
  for (const auto& e : net.edges) {
    adj.neighbors[fill[e.u]] = e.v;
    adj.weights[fill[e.u]++] = e.w;
  }
  return adj;
}

/// Power iteration of (A / max_w + I) restricted to `nodes`, from the uniform start
/// vector. Returns the unit eigenvector (indexed like `nodes`) and the Rayleigh quotient
/// of the unshifted, unscaled adjacency.
inline std::pair<std::vector<double>, double> power_iterate(const Adjacency& adj,
                                                            const std::vector<std::uint32_t>& nodes,
                                                            const std::vector<std::uint32_t>& local,
                                                            const CentralityOptions& opts) {
  const std::size_t n = nodes.size();
  double max_w = 0.0;
  for (auto v : nodes) {
    for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) max_w = std::max(max_w, adj.weights[k]);
  }
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double residual = 0.0;
  bool converged = false;
  std::size_t it = 0;
  while (it < opts.max_iterations) {
    ++it;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = nodes[i];
      double acc = x[i];
      for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) {
        acc += (adj.weights[k] / max_w) * x[local[adj.neighbors[k]]];
      }
      y[i] = acc;
      sq += acc * acc;
    }
    const double norm = std::sqrt(sq);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      residual = std::max(residual, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (residual < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError(it, residual);
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = nodes[i];
    double acc = 0.0;
    for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) acc += adj.weights[k] * x[local[adj.neighbors[k]]];
    lambda += x[i] * acc;
  }
  return {std::move(x), lambda};
}

}  // namespace detail

/// Node groups of the network's connected components with at least one edge, each
/// ascending; groups ordered by their smallest node index.
inline std::vector<std::vector<std::uint32_t>> component_node_sets(const SimilarityNetwork& net) {
  detail::UnionFind uf(net.node_count());
  std::vector<bool> touched(net.node_count(), false);
  for (const auto& e : net.edges) {
    uf.unite(e.u, e.v);
    touched[e.u] = touched[e.v] = true;
  }
  std::map<std::uint32_t, std::size_t> slot;
  std::vector<std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    if (!touched[i]) continue;
    auto [it, fresh] = slot.emplace(uf.find(i), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

/// Scores indexed like net.nodes. Isolated nodes score 0.
inline std::vector<double> eigenvector_centrality(const SimilarityNetwork& net, const CentralityOptions& opts = {}) {
  if (!(opts.tol > 0.0) || opts.max_iterations == 0) throw ConfigError("invalid power iteration settings");
  std::vector<double> scores(net.node_count(), 0.0);
  if (net.edges.empty()) return scores;
  const auto adj = detail::build_adjacency(net);
  std::vector<std::uint32_t> local(net.node_count(), 0);
  auto run = [&](const std::vector<std::uint32_t>& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<std::uint32_t>(i);
    auto [x, lambda] = detail::power_iterate(adj, nodes, local, opts);
    const double scale = opts.scaling == CentralityScaling::ComponentEigenvalue ? lambda : 1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) scores[nodes[i]] = scale * x[i];
  };
  auto groups = component_node_sets(net);
  if (opts.scaling == CentralityScaling::Global) {
    std::vector<std::uint32_t> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    run(all);
  } else {
    for (const auto& g : groups) run(g);
  }
  return scores;
}

inline std::map<std::string, double> centrality_by_user(const SimilarityNetwork& net, const std::vector<double>& scores) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < net.node_count(); ++i) out.emplace(net.nodes[i], scores[i]);
  return out;
}

/// Nearest-rank percentile: the value at index ceil(p/100 * n) - 1 of the sorted input.
inline double percentile_threshold(std::vector<double> values, double p) {
  if (values.empty()) throw ContractViolation("percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // p * n is exact for the percentiles used in practice; the small offset absorbs the
  // rounding of the division so exact ranks do not spill into the next slot.
  const double rank = std::ceil(p * n / 100.0 - 1e-9);
  const auto idx = static_cast<std::size_t>(std::clamp(rank - 1.0, 0.0, n - 1.0));
  return values[idx];
}

inline SimilarityNetwork node_prune(const SimilarityNetwork& net, const std::vector<double>& scores, double p) {
  if (scores.size() != net.node_count()) throw ContractViolation("centrality scores do not cover every node");
  if (net.nodes.empty()) return net;
  const double threshold = percentile_threshold(scores, p);
  std::vector<bool> keep(net.node_count());
  for (std::size_t i = 0; i < scores.size(); ++i) keep[i] = scores[i] >= threshold;
  return induced_subgraph(net, keep);
}

inline SimilarityNetwork edge_filter(const SimilarityNetwork& net, double p) {
  if (net.edges.empty()) throw ContractViolation("edge filter on a network without edges");
  std::vector<double> weights;
  weights.reserve(net.edges.size());
  for (const auto& e : net.edges) weights.push_back(e.w);
  const double threshold = percentile_threshold(std::move(weights), p);
  SimilarityNetwork kept = net;
  kept.edges.clear();
  std::vector<bool> keep(net.node_count(), false);
  for (const auto& e : net.edges) {
    if (e.w < threshold) continue;
    kept.edges.push_back(e);
    keep[e.u] = keep[e.v] = true;
  }
  return induced_subgraph(kept, keep);
}

inline SimilarityNetwork combined_prune(const SimilarityNetwork& net, const PruneConfig& cfg) {
  cfg.validate();
  if (net.edges.empty()) {
    SimilarityNetwork empty;
    empty.kind = net.kind;
    empty.window = net.window;
    return empty;
  }
  auto filtered = edge_filter(net, cfg.edge_percentile);
  if (filtered.nodes.empty()) return filtered;
  const auto scores = eigenvector_centrality(filtered, cfg.centrality());
  return node_prune(filtered, scores, cfg.node_percentile_combined);
}

/// Applies cfg.strategy.
inline SimilarityNetwork prune(const SimilarityNetwork& net, const PruneConfig& cfg) {
  cfg.validate();
  if (cfg.strategy == PruneStrategy::EdgeThenNode) return combined_prune(net, cfg);
  if (net.nodes.empty()) return net;
  return node_prune(net, eigenvector_centrality(net, cfg.centrality()), cfg.node_percentile);
}

struct ClusterEdge {
  std::string u;
  std::string v;
  double w = 0.0;

  friend bool operator==(const ClusterEdge&, const ClusterEdge&) = default;
};

struct Cluster {
  std::vector<std::string> members;  // sorted
  std::vector<ClusterEdge> induced_edges;
  TraceKind trace = TraceKind::HashtagSequence;
  std::string window;

  std::size_t size() const noexcept { return members.size(); }
};

/// Components with at least two members, largest first, ties broken by smallest member.
inline std::vector<Cluster> connected_components(const SimilarityNetwork& net) {
  auto groups = component_node_sets(net);
  std::vector<std::uint32_t> group_of(net.node_count(), UINT32_MAX);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto v : groups[g]) group_of[v] = static_cast<std::uint32_t>(g);
  }
  std::vector<Cluster> clusters(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    clusters[g].trace = net.kind;
    clusters[g].window = net.window;
    for (auto v : groups[g]) clusters[g].members.push_back(net.nodes[v]);
  }
  for (const auto& e : net.edges) clusters[group_of[e.u]].induced_edges.push_back({net.nodes[e.u], net.nodes[e.v], e.w});
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.members.front() < b.members.front();
  });
  return clusters;
}

inline nlohmann::json to_json(const SimilarityNetwork& net) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : net.edges) edges.push_back({net.nodes[e.u], net.nodes[e.v], e.w});
  return {{"trace", to_string(net.kind)}, {"window", net.window}, {"nodes", net.nodes}, {"edges", std::move(edges)}};
}

inline nlohmann::json to_json(const Cluster& c) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : c.induced_edges) edges.push_back({e.u, e.v, e.w});
  return {{"trace", to_string(c.trace)}, {"window", c.window}, {"members", c.members}, {"edges", std::move(edges)}};
}

}  // namespace cibnet
