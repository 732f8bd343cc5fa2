#pragma once

// Behavioral-trace extractors: user-entity engagement pairs for bipartite traces and
// direct co-timed content matches for embedding traces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cibnet/detail/parallel.hpp"
#include "cibnet/error.hpp"
#include "cibnet/ingest.hpp"
#include "cibnet/trace_kind.hpp"

namespace cibnet {

struct EngagementPair {
  std::string user_id;
  std::string entity;
  std::int64_t count = 1;

  friend bool operator==(const EngagementPair&, const EngagementPair&) = default;
};

struct MatchEvidence {
  std::string post_a;  // authored by MatchPair::user_a
  std::string post_b;
  double similarity = 0.0;
  std::int64_t gap_seconds = 0;

  friend bool operator==(const MatchEvidence&, const MatchEvidence&) = default;
};

struct MatchPair {
  std::string user_a;  // user_a < user_b
  std::string user_b;
  std::size_t occurrences = 0;
  std::vector<MatchEvidence> evidence;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct TraceConfig {
  std::size_t min_hashtags = 2;
  std::int64_t bin_width = 300;
  DomainOptions domain;
};

namespace detail {

inline std::vector<EngagementPair> aggregate(std::vector<std::pair<std::string, std::string>>&& raw) {
  std::sort(raw.begin(), raw.end());
  std::vector<EngagementPair> out;
  for (auto& [user, entity] : raw) {
    if (!out.empty() && out.back().user_id == user && out.back().entity == entity) {
      ++out.back().count;
    } else {
      out.push_back({std::move(user), std::move(entity), 1});
    }
  }
  return out;
}

inline std::vector<std::string> distinct_domains(const std::vector<std::string>& urls, const DomainOptions& opts) {
  std::vector<std::string> out;
  for (const auto& u : urls) {
    if (auto d = normalize_domain(u, opts)) out.push_back(std::move(*d));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Aggregated (user, entity, count) pairs for one bipartite trace, sorted by (user, entity).
/// A count is the number of distinct posts (or comments) engaging the entity.
inline std::vector<EngagementPair> extract_bipartite_pairs(const std::vector<PostRecord>& posts,
                                                           const std::vector<CommentRecord>& comments,
                                                           TraceKind kind, const TraceConfig& cfg = {}) {
  if (!is_bipartite(kind)) {
    throw ContractViolation(std::string(to_string(kind)) + " is an embedding trace, not a bipartite one");
  }
  std::vector<std::pair<std::string, std::string>> raw;
  auto add_target = [&](const PostRecord& p, const std::optional<std::string>& target) {
    if (target && !target->empty() && *target != p.user_id) raw.emplace_back(p.user_id, *target);
  };
  switch (kind) {
    case TraceKind::HashtagSequence:
      for (const auto& p : posts) {
        if (auto key = extract_hashtag_sequence(p, cfg.min_hashtags)) raw.emplace_back(p.user_id, std::move(*key));
      }
      break;
    case TraceKind::SynchronizedPosting:
      for (const auto& p : posts) {
        raw.emplace_back(p.user_id, std::to_string(assign_time_bin(p.timestamp, cfg.bin_width)));
      }
      break;
    case TraceKind::CoDomainDescription:
      for (const auto& p : posts) {
        for (auto& d : detail::distinct_domains(p.urls, cfg.domain)) raw.emplace_back(p.user_id, std::move(d));
      }
      break;
    case TraceKind::CoDomainComment:
      for (const auto& c : comments) {
        for (auto& d : detail::distinct_domains(c.urls, cfg.domain)) raw.emplace_back(c.user_id, std::move(d));
      }
      break;
    case TraceKind::CoDuet:
      for (const auto& p : posts) add_target(p, p.duet_target);
      break;
    case TraceKind::CoStitch:
      for (const auto& p : posts) add_target(p, p.stitch_target);
      break;
    case TraceKind::CoReply:
      for (const auto& p : posts) add_target(p, p.reply_target);
      break;
    default:
      break;
  }
  return detail::aggregate(std::move(raw));
}

/// Drops users whose total engagement count is below `min_support`.
inline std::vector<EngagementPair> filter_min_support(std::vector<EngagementPair> pairs, std::int64_t min_support) {
  if (min_support <= 1) return pairs;
  std::unordered_map<std::string_view, std::int64_t> totals;
  for (const auto& p : pairs) totals[p.user_id] += p.count;
  std::vector<bool> keep(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) keep[i] = totals[pairs[i].user_id] >= min_support;
  std::vector<EngagementPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(std::move(pairs[i]));
  }
  return out;
}

struct MatchConfig {
  double sim_threshold = 1.0 - 1e-6;
  bool inclusive = true;  // sim >= threshold, otherwise sim > threshold
  std::int64_t max_gap_seconds = 0;
  std::size_t min_occurrences = 2;
  std::size_t min_transcript_tokens = 4;  // speech only; posts without transcripts are kept
  const std::unordered_set<std::string>* stopwords = nullptr;  // null: default list
};

inline MatchConfig default_match_config(TraceKind kind) {
  MatchConfig cfg;
  if (kind == TraceKind::VideoSimilarity) {
    cfg.sim_threshold = 0.9;
    cfg.inclusive = false;
  }
  return cfg;
}

inline EmbeddingKind embedding_kind_for(TraceKind kind) {
  switch (kind) {
    case TraceKind::SpeechSimilarity: return EmbeddingKind::Speech;
    case TraceKind::VideoSimilarity: return EmbeddingKind::Video;
    default: throw ContractViolation(std::string(to_string(kind)) + " is not an embedding trace");
  }
}

/// One embedded post prepared for matching. Items are ordered by (timestamp, post_id).
struct MatchItem {
  const PostRecord* post = nullptr;
  const std::vector<float>* vector = nullptr;
  double norm = 0.0;
};

/// Candidate generator: returns index pairs (i < j) into the time-ordered items that
/// might match. Every candidate is re-checked exactly, so a generator may only prune.
using CandidateSource =
    std::function<std::vector<std::pair<std::size_t, std::size_t>>(std::span<const MatchItem>, std::int64_t)>;

/// Exact enumeration of every cross-user pair inside the time-gap window.
inline std::vector<std::pair<std::size_t, std::size_t>> exact_window_candidates(std::span<const MatchItem> items,
                                                                                std::int64_t max_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size() && items[j].post->timestamp - items[i].post->timestamp <= max_gap; ++j) {
      if (items[i].post->user_id != items[j].post->user_id) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace detail {

inline double cosine(const MatchItem& a, const MatchItem& b) {
  double dot = 0.0;
  const auto& va = *a.vector;
  const auto& vb = *b.vector;
  for (std::size_t k = 0; k < va.size(); ++k) dot += static_cast<double>(va[k]) * vb[k];
  return dot / (a.norm * b.norm);
}

inline std::vector<MatchItem> prepare_match_items(const std::vector<PostRecord>& posts,
                                                  const std::vector<EmbeddingRecord>& embeddings, TraceKind kind,
                                                  const MatchConfig& cfg) {
  const EmbeddingKind want = embedding_kind_for(kind);
  std::unordered_map<std::string_view, const EmbeddingRecord*> by_post;
  std::optional<std::size_t> dim;
  for (const auto& e : embeddings) {
    if (e.kind != want) continue;
    if (dim && *dim != e.vector.size()) {
      throw DataError("embedding for post '" + e.post_id + "' has dimension " + std::to_string(e.vector.size()) +
                      ", expected " + std::to_string(*dim));
    }
    dim = e.vector.size();
    by_post.emplace(e.post_id, &e);
  }
  const auto& stopwords = cfg.stopwords ? *cfg.stopwords : default_stopwords();
  std::vector<MatchItem> items;
  for (const auto& p : posts) {
    auto it = by_post.find(p.post_id);
    if (it == by_post.end()) continue;
    if (kind == TraceKind::SpeechSimilarity && p.transcript &&
        normalize_transcript(*p.transcript, stopwords).size() < cfg.min_transcript_tokens) {
      continue;
    }
    double sq = 0.0;
    for (float x : it->second->vector) sq += static_cast<double>(x) * x;
    if (sq == 0.0) throw DataError("zero embedding for post '" + p.post_id + "'");
    items.push_back({&p, &it->second->vector, std::sqrt(sq)});
  }
  std::sort(items.begin(), items.end(), [](const MatchItem& a, const MatchItem& b) {
    if (a.post->timestamp != b.post->timestamp) return a.post->timestamp < b.post->timestamp;
    return a.post->post_id < b.post->post_id;
  });
  return items;
}

}  // namespace detail

/// Co-timed content matches between users. A pair of posts counts when the cosine meets
/// the threshold and the posting-time gap is within `max_gap_seconds`; user pairs are kept
/// with at least `min_occurrences` such post pairs. Output sorted by (user_a, user_b).
inline std::vector<MatchPair> extract_embedding_matches(const std::vector<PostRecord>& posts,
                                                        const std::vector<EmbeddingRecord>& embeddings,
                                                        TraceKind kind, const MatchConfig& cfg,
                                                        const CandidateSource& candidates, std::size_t threads = 1) {
  if (cfg.max_gap_seconds < 0) throw ConfigError("max_gap_seconds must be nonnegative");
  const auto items = detail::prepare_match_items(posts, embeddings, kind, cfg);
  const auto cand = candidates ? candidates(items, cfg.max_gap_seconds)
                               : exact_window_candidates(items, cfg.max_gap_seconds);

  struct Hit {
    std::string user_a, user_b;
    MatchEvidence ev;
  };
  const std::size_t chunks = detail::resolve_threads(threads);
  std::vector<std::vector<Hit>> partial(std::min<std::size_t>(chunks, std::max<std::size_t>(1, cand.size())));
  detail::parallel_chunks(cand.size(), partial.size(), [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto& a = items[cand[k].first];
      const auto& b = items[cand[k].second];
      if (a.post->user_id == b.post->user_id) continue;
      const auto gap = std::llabs(a.post->timestamp - b.post->timestamp);
      if (gap > cfg.max_gap_seconds) continue;
      const double sim = detail::cosine(a, b);
      if (cfg.inclusive ? sim < cfg.sim_threshold : sim <= cfg.sim_threshold) continue;
      const bool a_first = a.post->user_id < b.post->user_id;
      const auto& first = a_first ? a : b;
      const auto& second = a_first ? b : a;
      partial[c].push_back({first.post->user_id, second.post->user_id,
                            {first.post->post_id, second.post->post_id, sim, gap}});
    }
  });

  std::map<std::pair<std::string, std::string>, std::vector<MatchEvidence>> grouped;
  for (auto& part : partial) {
    for (auto& h : part) grouped[{std::move(h.user_a), std::move(h.user_b)}].push_back(std::move(h.ev));
  }
  std::vector<MatchPair> out;
  for (auto& [users, evidence] : grouped) {
    if (evidence.size() < cfg.min_occurrences) continue;
    std::sort(evidence.begin(), evidence.end(), [](const MatchEvidence& x, const MatchEvidence& y) {
      return std::tie(x.post_a, x.post_b) < std::tie(y.post_a, y.post_b);
    });
    out.push_back({users.first, users.second, evidence.size(), std::move(evidence)});
  }
  return out;
}

inline std::vector<MatchPair> extract_embedding_matches(const std::vector<PostRecord>& posts,
                                                        const std::vector<EmbeddingRecord>& embeddings,
                                                        TraceKind kind, const MatchConfig& cfg, std::size_t threads = 1) {
  return extract_embedding_matches(posts, embeddings, kind, cfg, CandidateSource{}, threads);
}

inline std::vector<MatchPair> extract_embedding_matches(const std::vector<PostRecord>& posts,
                                                        const std::vector<EmbeddingRecord>& embeddings,
                                                        TraceKind kind) {
  return extract_embedding_matches(posts, embeddings, kind, default_match_config(kind));
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline void write_engagement_csv(std::ostream& out, const std::vector<EngagementPair>& pairs) {
  out << "user,entity,count\n";
  for (const auto& p : pairs) {
    out << detail::csv_field(p.user_id) << ',' << detail::csv_field(p.entity) << ',' << p.count << '\n';
  }
}

inline void write_match_csv(std::ostream& out, const std::vector<MatchPair>& pairs) {
  out << "user_a,user_b,occurrences\n";
  for (const auto& p : pairs) {
    out << detail::csv_field(p.user_a) << ',' << detail::csv_field(p.user_b) << ',' << p.occurrences << '\n';
  }
}

}  // namespace cibnet
