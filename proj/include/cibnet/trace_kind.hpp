#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cibnet/error.hpp"

namespace cibnet {

enum class TraceKind {
  HashtagSequence,
  SynchronizedPosting,
  CoDomainDescription,
  CoDomainComment,
  CoDuet,
  CoStitch,
  CoReply,
  SpeechSimilarity,
  VideoSimilarity,
};

inline constexpr std::array<TraceKind, 9> kAllTraceKinds = {
    TraceKind::HashtagSequence, TraceKind::SynchronizedPosting, TraceKind::CoDomainDescription,
    TraceKind::CoDomainComment, TraceKind::CoDuet,              TraceKind::CoStitch,
    TraceKind::CoReply,         TraceKind::SpeechSimilarity,    TraceKind::VideoSimilarity,
};

/// Bipartite traces are projected through TF-IDF cosine; the rest are direct match networks.
constexpr bool is_bipartite(TraceKind kind) noexcept {
  return kind != TraceKind::SpeechSimilarity && kind != TraceKind::VideoSimilarity;
}

constexpr std::string_view to_string(TraceKind kind) noexcept {
  switch (kind) {
    case TraceKind::HashtagSequence: return "hashtag_sequence";
    case TraceKind::SynchronizedPosting: return "synchronized_posting";
    case TraceKind::CoDomainDescription: return "co_domain_description";
    case TraceKind::CoDomainComment: return "co_domain_comment";
    case TraceKind::CoDuet: return "co_duet";
    case TraceKind::CoStitch: return "co_stitch";
    case TraceKind::CoReply: return "co_reply";
    case TraceKind::SpeechSimilarity: return "speech_similarity";
    case TraceKind::VideoSimilarity: return "video_similarity";
  }
  return "unknown";
}

inline std::optional<TraceKind> trace_kind_from_string(std::string_view name) {
  for (auto kind : kAllTraceKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

inline TraceKind parse_trace_kind(std::string_view name) {
  if (auto kind = trace_kind_from_string(name)) return *kind;
  throw ConfigError("unknown trace '" + std::string(name) + "'");
}

}  // namespace cibnet
