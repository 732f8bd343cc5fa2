#pragma once

// Canonical data model and loaders for posts, comments and precomputed embeddings.

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "cibnet/error.hpp"

namespace cibnet {

using Json = nlohmann::json;

/// Reserved separator for hashtag-sequence keys; stripped from hashtags at parse.
inline constexpr char kSequenceSeparator = '|';

struct PostRecord {
  std::string post_id;
  std::string user_id;
  std::string username;
  std::int64_t timestamp = 0;  // UTC epoch seconds
  std::string description;
  std::vector<std::string> hashtags;  // description order
  std::vector<std::string> urls;
  std::optional<std::string> duet_target;
  std::optional<std::string> stitch_target;
  std::optional<std::string> reply_target;
  std::optional<std::string> transcript;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

struct CommentRecord {
  std::string comment_id;
  std::string post_id;
  std::string user_id;
  std::string text;
  std::vector<std::string> urls;
  std::int64_t timestamp = 0;

  friend bool operator==(const CommentRecord&, const CommentRecord&) = default;
};

enum class EmbeddingKind { Speech, Video, AudioVerify };

constexpr std::string_view to_string(EmbeddingKind kind) noexcept {
  switch (kind) {
    case EmbeddingKind::Speech: return "speech";
    case EmbeddingKind::Video: return "video";
    case EmbeddingKind::AudioVerify: return "audio_verify";
  }
  return "unknown";
}

inline std::optional<EmbeddingKind> embedding_kind_from_string(std::string_view s) {
  if (s == "speech") return EmbeddingKind::Speech;
  if (s == "video") return EmbeddingKind::Video;
  if (s == "audio_verify") return EmbeddingKind::AudioVerify;
  return std::nullopt;
}

struct EmbeddingRecord {
  std::string post_id;
  EmbeddingKind kind = EmbeddingKind::Speech;
  std::vector<float> vector;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

/// One rejected or suspicious input line. Line numbers are 1-based.
struct LedgerEntry {
  std::size_t line = 0;
  std::string message;
};

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<LedgerEntry> ledger;
};

struct IngestOptions {
  bool lowercase_hashtags = true;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_fixed_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

/// ISO-8601 "YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|+HHMM]"; no zone means UTC.
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  s = trim(s);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!parse_fixed_digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' ||
      !parse_fixed_digits(s, 5, 2, mo) || s[7] != '-' || !parse_fixed_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
    if (!parse_fixed_digits(s, pos + 1, 2, h) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !parse_fixed_digits(s, pos + 4, 2, mi)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!parse_fixed_digits(s, pos + 1, 2, se)) return std::nullopt;
      pos += 3;
    }
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      int oh = 0, om = 0;
      if (!parse_fixed_digits(s, pos + 1, 2, oh)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size()) {
        if (!parse_fixed_digits(s, pos, 2, om)) return std::nullopt;
        pos += 2;
      }
      offset = sign * (oh * 3600 + om * 60);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + se - offset;
}

inline std::int64_t parse_timestamp(const Json& v) {
  std::int64_t t = 0;
  if (v.is_number_integer()) {
    t = v.get<std::int64_t>();
  } else if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw DataError("non-finite timestamp");
    t = static_cast<std::int64_t>(std::floor(d));
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    auto parsed = parse_iso8601(s);
    if (!parsed) throw DataError("unparseable timestamp '" + s + "'");
    t = *parsed;
  } else {
    throw DataError("timestamp must be an integer or ISO-8601 string");
  }
  if (t < 0) throw DataError("negative timestamp");
  return t;
}

inline std::string required_string(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DataError(std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

inline std::string optional_string(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

inline std::optional<std::string> nullable_string(const Json& obj, const char* key) {
  auto s = optional_string(obj, key);
  if (s.empty()) return std::nullopt;
  return s;
}

inline std::vector<std::string> string_list(const Json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw DataError(std::string("field '") + key + "' must be a list");
  for (const auto& e : *it) {
    if (!e.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::string clean_hashtag(std::string_view tag, bool lowercase) {
  tag = trim(tag);
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  std::string out;
  out.reserve(tag.size());
  for (char c : tag) {
    if (c == kSequenceSeparator) continue;
    out.push_back(c);
  }
  return lowercase ? ascii_lower(out) : out;
}

inline std::vector<std::string> hashtags_from_text(std::string_view text) {
  static const std::regex re(R"(#([^\s#]+))");
  std::vector<std::string> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

inline std::vector<std::string> urls_from_text(std::string_view text) {
  static const std::regex re(R"((https?://[^\s]+))", std::regex::icase);
  std::vector<std::string> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

template <class Record, class ParseOne>
ParseResult<Record> parse_lines(std::istream& in, ParseOne&& parse_one) {
  ParseResult<Record> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      Json obj = Json::parse(line);
      if (!obj.is_object()) throw DataError("record is not a JSON object");
      result.records.push_back(parse_one(obj));
    } catch (const Json::exception& e) {
      result.ledger.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const DataError& e) {
      result.ledger.push_back({line_no, e.what()});
    }
  }
  return result;
}

inline void put_optional(Json& obj, const char* key, const std::optional<std::string>& v) {
  if (v) obj[key] = *v;
  else obj[key] = nullptr;
}

}  // namespace detail

inline PostRecord post_from_json(const Json& obj, const IngestOptions& opts = {}) {
  PostRecord p;
  p.post_id = detail::required_string(obj, "post_id");
  if (p.post_id.empty()) throw DataError("empty post_id");
  p.user_id = detail::required_string(obj, "user_id");
  if (p.user_id.empty()) throw DataError("empty user_id");
  p.username = detail::optional_string(obj, "username");
  auto ts = obj.find("timestamp");
  if (ts == obj.end()) throw DataError("missing field 'timestamp'");
  p.timestamp = detail::parse_timestamp(*ts);
  p.description = detail::optional_string(obj, "description");
  std::vector<std::string> raw_tags = obj.contains("hashtags") && !obj["hashtags"].is_null()
                                          ? detail::string_list(obj, "hashtags")
                                          : detail::hashtags_from_text(p.description);
  for (const auto& t : raw_tags) {
    auto cleaned = detail::clean_hashtag(t, opts.lowercase_hashtags);
    if (!cleaned.empty()) p.hashtags.push_back(std::move(cleaned));
  }
  p.urls = obj.contains("urls") && !obj["urls"].is_null() ? detail::string_list(obj, "urls")
                                                          : detail::urls_from_text(p.description);
  p.duet_target = detail::nullable_string(obj, "duet_target");
  p.stitch_target = detail::nullable_string(obj, "stitch_target");
  p.reply_target = detail::nullable_string(obj, "reply_target");
  auto tr = obj.find("transcript");
  if (tr != obj.end() && !tr->is_null()) {
    if (!tr->is_string()) throw DataError("field 'transcript' must be a string");
    p.transcript = tr->get<std::string>();
  }
  return p;
}

inline Json to_json(const PostRecord& p) {
  Json obj;
  obj["post_id"] = p.post_id;
  obj["user_id"] = p.user_id;
  obj["username"] = p.username;
  obj["timestamp"] = p.timestamp;
  obj["description"] = p.description;
  obj["hashtags"] = p.hashtags;
  obj["urls"] = p.urls;
  detail::put_optional(obj, "duet_target", p.duet_target);
  detail::put_optional(obj, "stitch_target", p.stitch_target);
  detail::put_optional(obj, "reply_target", p.reply_target);
  detail::put_optional(obj, "transcript", p.transcript);
  return obj;
}

/// Parses JSON-lines posts. Malformed lines and duplicate post ids are recorded in the
/// ledger and skipped; surviving records keep input order.
inline ParseResult<PostRecord> parse_posts(std::istream& in, const IngestOptions& opts = {}) {
  std::unordered_set<std::string> seen;
  return detail::parse_lines<PostRecord>(in, [&](const Json& obj) {
    auto post = post_from_json(obj, opts);
    if (!seen.insert(post.post_id).second) throw DataError("duplicate post_id '" + post.post_id + "' rejected");
    return post;
  });
}

inline void write_posts(std::ostream& out, const std::vector<PostRecord>& posts) {
  for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

inline CommentRecord comment_from_json(const Json& obj) {
  CommentRecord c;
  c.comment_id = detail::required_string(obj, "comment_id");
  if (c.comment_id.empty()) throw DataError("empty comment_id");
  c.post_id = detail::required_string(obj, "post_id");
  c.user_id = detail::required_string(obj, "user_id");
  if (c.user_id.empty()) throw DataError("empty user_id");
  c.text = detail::optional_string(obj, "text");
  c.urls = obj.contains("urls") && !obj["urls"].is_null() ? detail::string_list(obj, "urls")
                                                          : detail::urls_from_text(c.text);
  auto ts = obj.find("timestamp");
  if (ts == obj.end()) throw DataError("missing field 'timestamp'");
  c.timestamp = detail::parse_timestamp(*ts);
  return c;
}

inline Json to_json(const CommentRecord& c) {
  return Json{{"comment_id", c.comment_id}, {"post_id", c.post_id}, {"user_id", c.user_id},
              {"text", c.text},             {"urls", c.urls},       {"timestamp", c.timestamp}};
}

inline ParseResult<CommentRecord> parse_comments(std::istream& in) {
  std::unordered_set<std::string> seen;
  return detail::parse_lines<CommentRecord>(in, [&](const Json& obj) {
    auto comment = comment_from_json(obj);
    if (!seen.insert(comment.comment_id).second) {
      throw DataError("duplicate comment_id '" + comment.comment_id + "' rejected");
    }
    return comment;
  });
}

/// Comments pointing at unknown posts are kept; each one gets a warning entry.
inline std::vector<LedgerEntry> dangling_comments(const std::vector<CommentRecord>& comments,
                                                  const std::vector<PostRecord>& posts) {
  std::unordered_set<std::string_view> ids;
  for (const auto& p : posts) ids.insert(p.post_id);
  std::vector<LedgerEntry> out;
  for (const auto& c : comments) {
    if (!ids.count(c.post_id)) {
      out.push_back({0, "comment '" + c.comment_id + "' references unknown post '" + c.post_id + "'"});
    }
  }
  return out;
}

inline void write_comments(std::ostream& out, const std::vector<CommentRecord>& comments) {
  for (const auto& c : comments) out << to_json(c).dump() << '\n';
}

namespace detail {

/// Rejects non-finite, zero and wrong-dimension vectors; `dims` remembers the first
/// dimensionality seen per kind.
inline void validate_embedding(const EmbeddingRecord& e, std::unordered_map<int, std::size_t>& dims) {
  if (e.post_id.empty()) throw DataError("empty post_id");
  if (e.vector.empty()) throw DataError("empty vector for post '" + e.post_id + "'");
  bool nonzero = false;
  for (float x : e.vector) {
    if (!std::isfinite(x)) throw DataError("non-finite component in vector for post '" + e.post_id + "'");
    nonzero = nonzero || x != 0.0f;
  }
  if (!nonzero) throw DataError("zero vector for post '" + e.post_id + "'");
  auto [it, inserted] = dims.emplace(static_cast<int>(e.kind), e.vector.size());
  if (!inserted && it->second != e.vector.size()) {
    throw DataError("dimension " + std::to_string(e.vector.size()) + " for post '" + e.post_id +
                    "' does not match " + std::string(to_string(e.kind)) + " dimension " +
                    std::to_string(it->second));
  }
}

}  // namespace detail

inline ParseResult<EmbeddingRecord> parse_embeddings(std::istream& in) {
  std::unordered_map<int, std::size_t> dims;
  std::set<std::pair<int, std::string>> seen;
  return detail::parse_lines<EmbeddingRecord>(in, [&](const Json& obj) {
    EmbeddingRecord e;
    e.post_id = detail::required_string(obj, "post_id");
    const auto kind_name = detail::required_string(obj, "kind");
    auto kind = embedding_kind_from_string(kind_name);
    if (!kind) throw DataError("unknown embedding kind '" + kind_name + "'");
    e.kind = *kind;
    auto vec = obj.find("vector");
    if (vec == obj.end() || !vec->is_array()) throw DataError("missing or non-list field 'vector'");
    e.vector.reserve(vec->size());
    for (const auto& x : *vec) {
      if (!x.is_number()) throw DataError("non-numeric vector component for post '" + e.post_id + "'");
      e.vector.push_back(x.get<float>());
    }
    detail::validate_embedding(e, dims);
    if (!seen.emplace(static_cast<int>(e.kind), e.post_id).second) {
      throw DataError("duplicate " + kind_name + " embedding for post '" + e.post_id + "'");
    }
    return e;
  });
}

inline void write_embeddings(std::ostream& out, const std::vector<EmbeddingRecord>& embeddings) {
  for (const auto& e : embeddings) {
    Json obj{{"post_id", e.post_id}, {"kind", std::string(to_string(e.kind))}, {"vector", e.vector}};
    out << obj.dump() << '\n';
  }
}

namespace detail {

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline bool read_exact(std::istream& in, void* dst, std::size_t n) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

inline std::uint32_t load_u32_le(const unsigned char* b) {
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

}  // namespace detail

/// Packed binary embeddings: "CNEB", u32 dim, then per record u16 id length, id bytes
/// and dim little-endian float32 values. A file carries a single embedding kind.
inline void write_embeddings_binary(std::ostream& out, const std::vector<EmbeddingRecord>& embeddings) {
  const std::uint32_t dim = embeddings.empty() ? 0 : static_cast<std::uint32_t>(embeddings.front().vector.size());
  out.write("CNEB", 4);
  detail::write_u32_le(out, dim);
  for (const auto& e : embeddings) {
    if (e.vector.size() != dim) throw DataError("mixed dimensionality at post '" + e.post_id + "'");
    if (e.post_id.size() > 0xFFFF) throw DataError("post id too long for binary format");
    const auto len = static_cast<std::uint16_t>(e.post_id.size());
    const unsigned char lb[2] = {static_cast<unsigned char>(len), static_cast<unsigned char>(len >> 8)};
    out.write(reinterpret_cast<const char*>(lb), 2);
    out.write(e.post_id.data(), len);
    for (float x : e.vector) detail::write_u32_le(out, std::bit_cast<std::uint32_t>(x));
  }
}

inline ParseResult<EmbeddingRecord> read_embeddings_binary(std::istream& in, EmbeddingKind kind) {
  unsigned char header[8];
  if (!detail::read_exact(in, header, 8) || std::memcmp(header, "CNEB", 4) != 0) {
    throw DataError("not a CNEB embedding file");
  }
  const std::uint32_t dim = detail::load_u32_le(header + 4);
  ParseResult<EmbeddingRecord> result;
  std::unordered_map<int, std::size_t> dims;
  std::set<std::string> seen;
  std::vector<unsigned char> buf(std::size_t(dim) * 4);
  for (std::size_t index = 1;; ++index) {
    unsigned char lb[2];
    in.read(reinterpret_cast<char*>(lb), 2);
    if (in.gcount() == 0) break;
    if (in.gcount() != 2) throw DataError("truncated record " + std::to_string(index));
    const std::size_t len = std::size_t(lb[0]) | std::size_t(lb[1]) << 8;
    EmbeddingRecord e;
    e.kind = kind;
    e.post_id.resize(len);
    if (!detail::read_exact(in, e.post_id.data(), len) || !detail::read_exact(in, buf.data(), buf.size())) {
      throw DataError("truncated record " + std::to_string(index));
    }
    e.vector.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) e.vector[i] = std::bit_cast<float>(detail::load_u32_le(&buf[4 * i]));
    try {
      detail::validate_embedding(e, dims);
      if (!seen.insert(e.post_id).second) throw DataError("duplicate embedding for post '" + e.post_id + "'");
      result.records.push_back(std::move(e));
    } catch (const DataError& err) {
      result.ledger.push_back({index, err.what()});
    }
  }
  return result;
}

struct DomainOptions {
  /// Collapse hosts to their registrable domain (eTLD+1, small built-in suffix list).
  bool registrable_only = false;
};

namespace detail {

inline bool valid_host(std::string_view host) {
  if (host.empty() || host.size() > 253 || host.find('.') == std::string_view::npos) return false;
  std::size_t start = 0;
  while (start <= host.size()) {
    auto end = host.find('.', start);
    if (end == std::string_view::npos) end = host.size();
    auto label = host.substr(start, end - start);
    if (label.empty() || label.size() > 63 || label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
            static_cast<unsigned char>(c) >= 0x80)) {
        return false;
      }
    }
    start = end + 1;
  }
  return true;
}

inline std::string registrable_domain(const std::string& host) {
  static const std::unordered_set<std::string> two_level = {
      "co.uk", "org.uk", "ac.uk", "gov.uk", "com.au", "net.au", "org.au", "co.jp", "co.nz",
      "com.br", "com.mx", "co.in", "com.cn", "com.tr", "co.za", "com.ar"};
  std::vector<std::string_view> labels;
  std::string_view h(host);
  std::size_t start = 0;
  while (true) {
    auto end = h.find('.', start);
    labels.push_back(h.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (labels.size() <= 2) return host;
  const std::string last2 = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
  const std::size_t keep = two_level.count(last2) ? 3 : 2;
  if (labels.size() <= keep) return host;
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out.append(labels[i]);
  }
  return out;
}

}  // namespace detail

/// Lowercased host with scheme, credentials, port, path, query and fragment removed and
/// a single leading "www." dropped. Absent when the string does not look like a URL.
inline std::optional<std::string> normalize_domain(std::string_view url, const DomainOptions& opts = {}) {
  std::string_view s = detail::trim(url);
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
  }
  if (auto scheme_end = s.find("://"); scheme_end != std::string_view::npos) {
    auto scheme = s.substr(0, scheme_end);
    if (scheme.empty() || !std::isalpha(static_cast<unsigned char>(scheme.front()))) return std::nullopt;
    for (char c : scheme) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) return std::nullopt;
    }
    s.remove_prefix(scheme_end + 3);
  } else if (s.rfind("//", 0) == 0) {
    s.remove_prefix(2);
  }
  auto authority_end = s.find_first_of("/?#");
  auto authority = s.substr(0, authority_end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  std::string host = detail::ascii_lower(authority);
  while (!host.empty() && host.back() == '.') host.pop_back();
  while (host.rfind("www.", 0) == 0) host.erase(0, 4);
  if (!detail::valid_host(host)) return std::nullopt;
  if (opts.registrable_only) host = detail::registrable_domain(host);
  return host;
}

/// Order-preserving key for a post's hashtags; absent below `min_hashtags`.
inline std::optional<std::string> extract_hashtag_sequence(const PostRecord& post, std::size_t min_hashtags = 2) {
  if (post.hashtags.size() < min_hashtags || post.hashtags.empty()) return std::nullopt;
  std::string key;
  for (const auto& tag : post.hashtags) {
    if (!key.empty()) key.push_back(kSequenceSeparator);
    key += tag;
  }
  return key;
}

inline std::int64_t assign_time_bin(std::int64_t timestamp, std::int64_t bin_width) {
  if (bin_width <= 0) throw ConfigError("time bin width must be positive");
  std::int64_t q = timestamp / bin_width;
  if (timestamp % bin_width != 0 && timestamp < 0) --q;
  return q;
}

inline const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",    "an",   "and",  "are",  "as",   "at",    "be",   "but",  "by",   "for",  "from",
      "has",  "have", "he",   "her",  "his",  "i",     "if",   "in",   "into", "is",   "it",
      "its",  "me",   "my",   "no",   "not",  "now",   "of",   "on",   "or",   "our",  "she",
      "so",   "that", "the",  "their", "them", "then", "there", "they", "this", "to",  "up",
      "us",   "was",  "we",   "were", "what", "when",  "which", "who", "will", "with", "you",
      "your"};
  return words;
}

/// Lowercases, turns ASCII punctuation into separators and drops stopwords.
inline std::vector<std::string> normalize_transcript(std::string_view text,
                                                     const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.count(current)) tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || (c < 0x80 && std::ispunct(c))) {
      flush();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

}  // namespace cibnet
