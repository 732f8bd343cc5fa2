#pragma once

// Bipartite user-entity graphs, TF-IDF weighting, cosine projection onto users and
// match networks built from embedding traces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cibnet/detail/parallel.hpp"
#include "cibnet/error.hpp"
#include "cibnet/trace_kind.hpp"
#include "cibnet/traces.hpp"

namespace cibnet {

/// Sparse user x entity matrix in CSR form. Users and entities are sorted, and each row
/// lists its entity columns in ascending order.
struct BipartiteGraph {
  std::vector<std::string> users;
  std::vector<std::string> entities;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::uint32_t> columns;
  std::vector<double> values;

  std::size_t user_count() const noexcept { return users.size(); }
  std::size_t entity_count() const noexcept { return entities.size(); }
  std::size_t nnz() const noexcept { return values.size(); }

  std::span<const std::uint32_t> row_columns(std::size_t u) const {
    return {columns.data() + row_offsets[u], row_offsets[u + 1] - row_offsets[u]};
  }
  std::span<const double> row_values(std::size_t u) const {
    return {values.data() + row_offsets[u], row_offsets[u + 1] - row_offsets[u]};
  }

  double weight(std::size_t u, std::size_t e) const {
    auto cols = row_columns(u);
    auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(e));
    if (it == cols.end() || *it != e) return 0.0;
    return row_values(u)[static_cast<std::size_t>(it - cols.begin())];
  }

  /// Number of distinct users with a nonzero weight on each entity.
  std::vector<std::size_t> document_frequency() const {
    std::vector<std::size_t> df(entities.size(), 0);
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (values[k] != 0.0) ++df[columns[k]];
    }
    return df;
  }
};

inline BipartiteGraph build_bipartite(const std::vector<EngagementPair>& pairs) {
  BipartiteGraph g;
  for (const auto& p : pairs) {
    if (p.count < 1) throw ContractViolation("engagement count must be positive for '" + p.user_id + "'");
    g.users.push_back(p.user_id);
    g.entities.push_back(p.entity);
  }
  auto sort_unique = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(g.users);
  sort_unique(g.entities);
  auto index_in = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::uint32_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  struct Cell {
    std::uint32_t u, e;
    double w;
  };
  std::vector<Cell> cells;
  cells.reserve(pairs.size());
  for (const auto& p : pairs) {
    cells.push_back({index_in(g.users, p.user_id), index_in(g.entities, p.entity), static_cast<double>(p.count)});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.u != b.u ? a.u < b.u : a.e < b.e; });
  g.row_offsets.assign(g.users.size() + 1, 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0 && cells[k].u == cells[k - 1].u && cells[k].e == cells[k - 1].e) {
      throw ContractViolation("duplicate engagement pair (" + g.users[cells[k].u] + ", " + g.entities[cells[k].e] + ")");
    }
    g.columns.push_back(cells[k].e);
    g.values.push_back(cells[k].w);
    ++g.row_offsets[cells[k].u + 1];
  }
  for (std::size_t u = 0; u < g.users.size(); ++u) g.row_offsets[u + 1] += g.row_offsets[u];
  return g;
}

enum class TfMode { Count, Binary };
enum class IdfMode {
  Log,       // ln(N / df)
  LogPlus1,  // ln(1 + N / df)
};

struct TfidfOptions {
  TfMode tf = TfMode::Count;
  IdfMode idf = IdfMode::Log;
};

/// weight = tf(u, e) * idf(e). With the default ln(N/df), entities used by every user
/// get weight zero.
inline BipartiteGraph tfidf_weight(const BipartiteGraph& g, const TfidfOptions& opts = {}) {
  BipartiteGraph out = g;
  const auto df = g.document_frequency();
  const double n = static_cast<double>(g.user_count());
  std::vector<double> idf(df.size(), 0.0);
  for (std::size_t e = 0; e < df.size(); ++e) {
    if (df[e] == 0) continue;
    const double ratio = n / static_cast<double>(df[e]);
    idf[e] = opts.idf == IdfMode::Log ? std::log(ratio) : std::log1p(ratio);
  }
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double tf = opts.tf == TfMode::Binary ? (g.values[k] > 0.0 ? 1.0 : 0.0) : g.values[k];
    out.values[k] = tf * idf[g.columns[k]];
  }
  return out;
}

struct WeightedEdge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  double w = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Weighted undirected user-user graph. Nodes are sorted; edges are sorted by (u, v).
struct SimilarityNetwork {
  std::vector<std::string> nodes;
  std::vector<WeightedEdge> edges;
  TraceKind kind = TraceKind::HashtagSequence;
  std::string window;

  std::size_t node_count() const noexcept { return nodes.size(); }
  std::size_t edge_count() const noexcept { return edges.size(); }

  std::optional<std::uint32_t> index_of(std::string_view user) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), user);
    if (it == nodes.end() || *it != user) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes.begin());
  }

  /// Weight of (a, b), or 0 when there is no edge.
  double weight(std::string_view a, std::string_view b) const {
    auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib || *ia == *ib) return 0.0;
    WeightedEdge key{std::min(*ia, *ib), std::max(*ia, *ib), 0.0};
    auto it = std::lower_bound(edges.begin(), edges.end(), key, [](const WeightedEdge& x, const WeightedEdge& y) {
      return x.u != y.u ? x.u < y.u : x.v < y.v;
    });
    if (it == edges.end() || it->u != key.u || it->v != key.v) return 0.0;
    return it->w;
  }
};

/// Subgraph induced by the nodes with keep[i] true; node order is preserved.
inline SimilarityNetwork induced_subgraph(const SimilarityNetwork& net, const std::vector<bool>& keep) {
  SimilarityNetwork out;
  out.kind = net.kind;
  out.window = net.window;
  std::vector<std::uint32_t> remap(net.nodes.size(), UINT32_MAX);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<std::uint32_t>(out.nodes.size());
    out.nodes.push_back(net.nodes[i]);
  }
  for (const auto& e : net.edges) {
    if (remap[e.u] != UINT32_MAX && remap[e.v] != UINT32_MAX) out.edges.push_back({remap[e.u], remap[e.v], e.w});
  }
  return out;
}

struct ProjectionOptions {
  std::size_t threads = 1;     // 0: hardware concurrency
  bool drop_isolated = false;  // keep users without edges as isolated nodes by default
};

/// Cosine similarity between user rows, accumulated through an inverted index so only
/// pairs sharing at least one weighted entity are visited. Per pair, products are summed
/// in ascending entity order, which keeps results independent of thread count.
inline SimilarityNetwork project_users(const BipartiteGraph& g, TraceKind kind, const ProjectionOptions& opts = {}) {
  const std::size_t n_users = g.user_count();
  // Unit-normalized rows; an all-zero row stays zero and its user ends up isolated.
  std::vector<double> unit(g.values.size(), 0.0);
  for (std::size_t u = 0; u < n_users; ++u) {
    double sq = 0.0;
    for (std::size_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k) sq += g.values[k] * g.values[k];
    if (sq <= 0.0) continue;
    const double norm = std::sqrt(sq);
    for (std::size_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k) unit[k] = g.values[k] / norm;
  }
  struct Posting {
    std::uint32_t user;
    double value;
  };
  std::vector<std::vector<Posting>> postings(g.entity_count());
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k) {
      if (unit[k] > 0.0) postings[g.columns[k]].push_back({static_cast<std::uint32_t>(u), unit[k]});
    }
  }

  const std::size_t chunks = std::min(detail::resolve_threads(opts.threads), std::max<std::size_t>(1, n_users));
  std::vector<std::vector<WeightedEdge>> partial(chunks);
  detail::parallel_chunks(n_users, chunks, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> acc(n_users, 0.0);
    std::vector<std::uint32_t> touched;
    for (std::size_t u = begin; u < end; ++u) {
      for (std::size_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k) {
        if (unit[k] <= 0.0) continue;
        const auto& list = postings[g.columns[k]];
        auto it = std::upper_bound(list.begin(), list.end(), static_cast<std::uint32_t>(u),
                                   [](std::uint32_t x, const Posting& p) { return x < p.user; });
        for (; it != list.end(); ++it) {
          if (acc[it->user] == 0.0) touched.push_back(it->user);
          acc[it->user] += unit[k] * it->value;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (auto v : touched) {
        double cos = acc[v];
        acc[v] = 0.0;
        // Identical rows can land a few ulps off 1; snap so they compare as exact ties.
        if (cos > 1.0 - 1e-12) cos = 1.0;
        if (cos > 0.0) partial[c].push_back({static_cast<std::uint32_t>(u), v, cos});
      }
      touched.clear();
    }
  });

  SimilarityNetwork net;
  net.kind = kind;
  net.nodes = g.users;
  for (auto& part : partial) net.edges.insert(net.edges.end(), part.begin(), part.end());
  if (opts.drop_isolated) {
    std::vector<bool> keep(net.nodes.size(), false);
    for (const auto& e : net.edges) keep[e.u] = keep[e.v] = true;
    net = induced_subgraph(net, keep);
  }
  return net;
}

/// One edge per match pair with weight = occurrences. `extra_nodes` adds users (e.g. every
/// user with an embedding) as isolated nodes so percentile statistics cover them.
inline SimilarityNetwork build_match_network(const std::vector<MatchPair>& pairs, TraceKind kind,
                                             std::vector<std::string> extra_nodes = {}) {
  SimilarityNetwork net;
  net.kind = kind;
  net.nodes = std::move(extra_nodes);
  for (const auto& p : pairs) {
    if (p.user_a == p.user_b) throw ContractViolation("self match for user '" + p.user_a + "'");
    net.nodes.push_back(p.user_a);
    net.nodes.push_back(p.user_b);
  }
  std::sort(net.nodes.begin(), net.nodes.end());
  net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());
  for (const auto& p : pairs) {
    auto a = *net.index_of(p.user_a);
    auto b = *net.index_of(p.user_b);
    net.edges.push_back({std::min(a, b), std::max(a, b), static_cast<double>(p.occurrences)});
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });
  for (std::size_t k = 1; k < net.edges.size(); ++k) {
    if (net.edges[k].u == net.edges[k - 1].u && net.edges[k].v == net.edges[k - 1].v) {
      throw ContractViolation("duplicate match pair (" + net.nodes[net.edges[k].u] + ", " + net.nodes[net.edges[k].v] + ")");
    }
  }
  return net;
}

}  // namespace cibnet
