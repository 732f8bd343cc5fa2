#pragma once

// Synthetic corpora with planted coordinated campaigns, ground truth, detection scoring
// and the data-loss protocol.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cibnet/detail/parallel.hpp"
#include "cibnet/error.hpp"
#include "cibnet/ingest.hpp"
#include "cibnet/trace_kind.hpp"

namespace cibnet {

// ---------------------------------------------------------------------------
// Scenario description

struct EmbeddingTemplate {
  std::size_t dimension = 32;
  double noise_sigma = 0.0;  // per-component noise around the round's base vector
};

struct UsernameTemplate {
  std::string prefix = "acct";
  double autogen_fraction = 0.0;  // share of members named "user" + 13 digits
};

struct CampaignSpec {
  std::string name;
  std::size_t size = 2;
  std::vector<TraceKind> traces;
  int start_hour = 18;  // UTC posting window [start_hour, end_hour)
  int end_hour = 20;
  std::int64_t cadence_seconds = 120;
  std::size_t rounds = 8;
  std::vector<std::string> hashtag_pool;
  std::size_t sequence_length = 5;
  std::vector<std::string> domain_pool;
  std::vector<std::string> target_pool;  // duet / stitch / reply targets
  EmbeddingTemplate embedding;
  UsernameTemplate username;
  double duplication_rate = 1.0;  // chance a member joins a given round
  std::int64_t sync_bin_seconds = 300;
  std::string script = "vote early protect the count share this message today";

  void validate() const {
    if (name.empty()) throw ConfigError("campaign without a name");
    if (size < 2) throw ConfigError("campaign '" + name + "' needs at least two accounts");
    if (cadence_seconds <= 0) throw ConfigError("campaign '" + name + "' cadence must be positive");
    if (embedding.noise_sigma < 0.0) throw ConfigError("campaign '" + name + "' noise must be nonnegative");
    if (start_hour < 0 || end_hour > 24 || start_hour >= end_hour) throw ConfigError("campaign '" + name + "' posting window invalid");
    if (!(duplication_rate > 0.0 && duplication_rate <= 1.0)) throw ConfigError("campaign '" + name + "' duplication rate must lie in (0, 1]");
    if (rounds == 0) throw ConfigError("campaign '" + name + "' needs at least one round");
    if (sync_bin_seconds <= 0) throw ConfigError("campaign '" + name + "' sync bin must be positive");
    auto has = [&](TraceKind k) { return std::find(traces.begin(), traces.end(), k) != traces.end(); };
    if (has(TraceKind::HashtagSequence) && (hashtag_pool.size() < 2 || sequence_length < 2)) {
      throw ConfigError("campaign '" + name + "' needs a hashtag pool for hashtag sequences");
    }
    if ((has(TraceKind::CoDomainDescription) || has(TraceKind::CoDomainComment)) && domain_pool.empty()) {
      throw ConfigError("campaign '" + name + "' needs a domain pool");
    }
    if ((has(TraceKind::CoDuet) || has(TraceKind::CoStitch) || has(TraceKind::CoReply)) && target_pool.empty()) {
      throw ConfigError("campaign '" + name + "' needs a target pool");
    }
  }
};

struct OrganicConfig {
  std::size_t users = 3400;
  double posts_log_mean = 2.3;
  double posts_log_sigma = 0.9;
  std::size_t min_posts = 2;
  std::size_t max_posts = 200;
  double hashtag_active_fraction = 0.95;
  std::size_t hashtag_vocab = 20000;
  double hashtag_zipf = 0.7;
  std::size_t personal_tags = 8;
  double personal_tag_share = 0.5;
  double url_probability = 0.15;
  std::size_t domain_vocab = 5000;
  double domain_zipf = 0.5;
  double favourite_domain_share = 0.7;
  double duet_probability = 0.02;
  double stitch_probability = 0.02;
  double reply_probability = 0.02;
  double creator_zipf = 0.3;
  double comments_per_user = 2.0;
  double comment_url_probability = 0.3;
  double speech_probability = 0.15;
  double video_probability = 0.15;
  std::size_t speech_dimension = 32;
  std::size_t video_dimension = 32;
  double autogen_username_fraction = 0.04;
  int peak_hour = 20;          // UTC hour of the diurnal maximum
  double diurnal_amplitude = 0.6;  // 0: flat activity over the day

  void validate() const {
    if (hashtag_vocab < 10 || domain_vocab < 10) throw ConfigError("organic vocabularies are too small");
    if (min_posts == 0 || min_posts > max_posts) throw ConfigError("organic post bounds are invalid");
    for (double p : {hashtag_active_fraction, personal_tag_share, url_probability, favourite_domain_share,
                     duet_probability, stitch_probability, reply_probability, comment_url_probability,
                     speech_probability, video_probability, autogen_username_fraction}) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("organic probabilities must lie in [0, 1]");
    }
    if (!(diurnal_amplitude >= 0.0 && diurnal_amplitude <= 1.0)) throw ConfigError("diurnal amplitude must lie in [0, 1]");
  }
};

struct Scenario {
  std::string name = "custom";
  std::string window_label = "2024-08";
  std::int64_t window_start = 1722470400;  // 2024-08-01T00:00:00Z
  std::int64_t window_days = 31;
  OrganicConfig organic;
  std::vector<CampaignSpec> campaigns;

  std::int64_t window_end() const { return window_start + window_days * 86400; }

  void validate() const {
    if (window_days <= 0) throw ConfigError("scenario window must span at least one day");
    organic.validate();
    std::set<std::string> names;
    for (const auto& c : campaigns) {
      c.validate();
      if (!names.insert(c.name).second) throw ConfigError("duplicate campaign '" + c.name + "'");
      if (static_cast<std::int64_t>(c.rounds) > window_days) {
        throw ConfigError("campaign '" + c.name + "' has more rounds than window days");
      }
    }
  }
};

// JSON mapping -------------------------------------------------------------

inline Json to_json(const CampaignSpec& c) {
  Json traces = Json::array();
  for (auto t : c.traces) traces.push_back(std::string(to_string(t)));
  return {{"name", c.name},
          {"size", c.size},
          {"traces", traces},
          {"posting_window", {c.start_hour, c.end_hour}},
          {"cadence_seconds", c.cadence_seconds},
          {"rounds", c.rounds},
          {"hashtag_pool", c.hashtag_pool},
          {"sequence_length", c.sequence_length},
          {"domain_pool", c.domain_pool},
          {"target_pool", c.target_pool},
          {"embedding", {{"dimension", c.embedding.dimension}, {"noise_sigma", c.embedding.noise_sigma}}},
          {"username", {{"prefix", c.username.prefix}, {"autogen_fraction", c.username.autogen_fraction}}},
          {"duplication_rate", c.duplication_rate},
          {"sync_bin_seconds", c.sync_bin_seconds},
          {"script", c.script}};
}

inline CampaignSpec campaign_from_json(const Json& j) {
  try {
    CampaignSpec c;
    c.name = j.at("name").get<std::string>();
    c.size = j.at("size").get<std::size_t>();
    for (const auto& t : j.at("traces")) c.traces.push_back(parse_trace_kind(t.get<std::string>()));
    if (j.contains("posting_window")) {
      c.start_hour = j["posting_window"].at(0).get<int>();
      c.end_hour = j["posting_window"].at(1).get<int>();
    }
    c.cadence_seconds = j.value("cadence_seconds", c.cadence_seconds);
    c.rounds = j.value("rounds", c.rounds);
    c.hashtag_pool = j.value("hashtag_pool", c.hashtag_pool);
    c.sequence_length = j.value("sequence_length", c.sequence_length);
    c.domain_pool = j.value("domain_pool", c.domain_pool);
    c.target_pool = j.value("target_pool", c.target_pool);
    if (j.contains("embedding")) {
      c.embedding.dimension = j["embedding"].value("dimension", c.embedding.dimension);
      c.embedding.noise_sigma = j["embedding"].value("noise_sigma", c.embedding.noise_sigma);
    }
    if (j.contains("username")) {
      c.username.prefix = j["username"].value("prefix", c.username.prefix);
      c.username.autogen_fraction = j["username"].value("autogen_fraction", c.username.autogen_fraction);
    }
    c.duplication_rate = j.value("duplication_rate", c.duplication_rate);
    c.sync_bin_seconds = j.value("sync_bin_seconds", c.sync_bin_seconds);
    c.script = j.value("script", c.script);
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid campaign spec: ") + e.what());
  }
}

inline Json to_json(const OrganicConfig& o) {
  return {{"users", o.users},
          {"posts_log_mean", o.posts_log_mean},
          {"posts_log_sigma", o.posts_log_sigma},
          {"min_posts", o.min_posts},
          {"max_posts", o.max_posts},
          {"hashtag_active_fraction", o.hashtag_active_fraction},
          {"hashtag_vocab", o.hashtag_vocab},
          {"hashtag_zipf", o.hashtag_zipf},
          {"personal_tags", o.personal_tags},
          {"personal_tag_share", o.personal_tag_share},
          {"url_probability", o.url_probability},
          {"domain_vocab", o.domain_vocab},
          {"domain_zipf", o.domain_zipf},
          {"favourite_domain_share", o.favourite_domain_share},
          {"duet_probability", o.duet_probability},
          {"stitch_probability", o.stitch_probability},
          {"reply_probability", o.reply_probability},
          {"creator_zipf", o.creator_zipf},
          {"comments_per_user", o.comments_per_user},
          {"comment_url_probability", o.comment_url_probability},
          {"speech_probability", o.speech_probability},
          {"video_probability", o.video_probability},
          {"speech_dimension", o.speech_dimension},
          {"video_dimension", o.video_dimension},
          {"autogen_username_fraction", o.autogen_username_fraction},
          {"peak_hour", o.peak_hour},
          {"diurnal_amplitude", o.diurnal_amplitude}};
}

inline OrganicConfig organic_from_json(const Json& j) {
  OrganicConfig o;
  try {
#define CIBNET_FIELD(f) o.f = j.value(#f, o.f)
    CIBNET_FIELD(users);
    CIBNET_FIELD(posts_log_mean);
    CIBNET_FIELD(posts_log_sigma);
    CIBNET_FIELD(min_posts);
    CIBNET_FIELD(max_posts);
    CIBNET_FIELD(hashtag_active_fraction);
    CIBNET_FIELD(hashtag_vocab);
    CIBNET_FIELD(hashtag_zipf);
    CIBNET_FIELD(personal_tags);
    CIBNET_FIELD(personal_tag_share);
    CIBNET_FIELD(url_probability);
    CIBNET_FIELD(domain_vocab);
    CIBNET_FIELD(domain_zipf);
    CIBNET_FIELD(favourite_domain_share);
    CIBNET_FIELD(duet_probability);
    CIBNET_FIELD(stitch_probability);
    CIBNET_FIELD(reply_probability);
    CIBNET_FIELD(creator_zipf);
    CIBNET_FIELD(comments_per_user);
    CIBNET_FIELD(comment_url_probability);
    CIBNET_FIELD(speech_probability);
    CIBNET_FIELD(video_probability);
    CIBNET_FIELD(speech_dimension);
    CIBNET_FIELD(video_dimension);
    CIBNET_FIELD(autogen_username_fraction);
    CIBNET_FIELD(peak_hour);
    CIBNET_FIELD(diurnal_amplitude);
#undef CIBNET_FIELD
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid organic config: ") + e.what());
  }
  return o;
}

inline Json to_json(const Scenario& s) {
  Json campaigns = Json::array();
  for (const auto& c : s.campaigns) campaigns.push_back(to_json(c));
  return {{"name", s.name},
          {"window", {{"label", s.window_label}, {"start", s.window_start}, {"days", s.window_days}}},
          {"organic", to_json(s.organic)},
          {"campaigns", campaigns}};
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario s;
  try {
    s.name = j.value("name", s.name);
    if (j.contains("window")) {
      s.window_label = j["window"].value("label", s.window_label);
      s.window_start = j["window"].value("start", s.window_start);
      s.window_days = j["window"].value("days", s.window_days);
    }
    if (j.contains("organic")) s.organic = organic_from_json(j["organic"]);
    for (const auto& c : j.value("campaigns", Json::array())) s.campaigns.push_back(campaign_from_json(c));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  s.validate();
  return s;
}

// Presets ------------------------------------------------------------------

/// One month of organic activity with a 68-account hashtag campaign, a 16-account
/// co-domain campaign, 42- and 67-account co-timed speech and video campaigns, and
/// four synchronized-posting groups.
inline Scenario paper_august() {
  Scenario s;
  s.name = "paper-august";
  CampaignSpec hashtag;
  hashtag.name = "hashtag-68";
  hashtag.size = 68;
  hashtag.traces = {TraceKind::HashtagSequence};
  hashtag.cadence_seconds = 120;
  hashtag.rounds = 9;
  hashtag.start_hour = 14;
  hashtag.end_hour = 16;
  hashtag.hashtag_pool = {"america", "candidatexfullname", "candidatexlastname", "2024", "election2024"};
  hashtag.sequence_length = 5;
  hashtag.username = {"candx", 21.0 / 68.0};
  s.campaigns.push_back(hashtag);

  CampaignSpec domain;
  domain.name = "codomain-16";
  domain.size = 16;
  domain.traces = {TraceKind::CoDomainDescription};
  domain.cadence_seconds = 240;
  domain.rounds = 8;
  domain.start_hour = 12;
  domain.end_hour = 14;
  domain.domain_pool = {"patriot-dispatch.net"};
  domain.username = {"magatornado", 0.0};
  s.campaigns.push_back(domain);

  CampaignSpec speech;
  speech.name = "speech-42";
  speech.size = 42;
  speech.traces = {TraceKind::SpeechSimilarity};
  speech.rounds = 6;
  speech.start_hour = 16;
  speech.end_hour = 18;
  speech.embedding = {32, 0.0};
  speech.username = {"voiceclip", 0.2};
  s.campaigns.push_back(speech);

  CampaignSpec video;
  video.name = "video-67";
  video.size = 67;
  video.traces = {TraceKind::VideoSimilarity};
  video.rounds = 6;
  video.start_hour = 18;
  video.end_hour = 20;
  video.embedding = {32, 0.05};
  video.username = {"splitscreen", 0.1};
  s.campaigns.push_back(video);

  for (int g = 0; g < 4; ++g) {
    CampaignSpec sync;
    sync.name = "sync-group-" + std::to_string(g + 1);
    sync.size = 12;
    sync.traces = {TraceKind::SynchronizedPosting};
    sync.rounds = 10;
    sync.start_hour = 2 * g;
    sync.end_hour = 2 * g + 2;
    sync.username = {"syncgrp" + std::to_string(g + 1) + "x", 0.0};
    s.campaigns.push_back(sync);
  }
  return s;
}

/// Organic background plus four equal synchronized-posting groups only.
inline Scenario sync_groups() {
  Scenario s;
  s.name = "sync-groups";
  s.organic.users = 3000;
  for (int g = 0; g < 4; ++g) {
    CampaignSpec sync;
    sync.name = "sync-group-" + std::to_string(g + 1);
    sync.size = 12;
    sync.traces = {TraceKind::SynchronizedPosting};
    sync.rounds = 10;
    sync.start_hour = 2 * g;
    sync.end_hour = 2 * g + 2;
    sync.username = {"syncgrp" + std::to_string(g + 1) + "x", 0.0};
    s.campaigns.push_back(sync);
  }
  return s;
}

inline Scenario organic_only(std::size_t users = 10000) {
  Scenario s;
  s.name = "organic-only";
  s.organic.users = users;
  return s;
}

inline Scenario preset(std::string_view name) {
  if (name == "paper-august") return paper_august();
  if (name == "sync-groups") return sync_groups();
  if (name == "organic-only") return organic_only();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Generation

struct Dataset {
  std::vector<PostRecord> posts;
  std::vector<CommentRecord> comments;
  std::vector<EmbeddingRecord> embeddings;
};

struct GroundTruth {
  std::map<std::string, std::set<std::string>> campaigns;
  std::set<std::string> organic;

  std::set<std::string> campaign_accounts() const {
    std::set<std::string> all;
    for (const auto& [name, members] : campaigns) all.insert(members.begin(), members.end());
    return all;
  }
};

inline Json to_json(const GroundTruth& t) {
  Json campaigns = Json::object();
  for (const auto& [name, members] : t.campaigns) campaigns[name] = members;
  return {{"campaigns", campaigns}, {"organic", t.organic}};
}

inline GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth t;
  try {
    for (const auto& [name, members] : j.at("campaigns").items()) t.campaigns[name] = members.get<std::set<std::string>>();
    t.organic = j.at("organic").get<std::set<std::string>>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("invalid ground truth: ") + e.what());
  }
  return t;
}

struct Generated {
  Dataset data;
  GroundTruth truth;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Independent stream for a named sub-generator.
inline std::mt19937_64 stream(std::uint64_t seed, std::string_view name) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a(name)));
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

inline double normal(std::mt19937_64& rng) {
  // Box-Muller keeps draws identical across standard library implementations.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::size_t poisson(std::mt19937_64& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = uniform01(rng);
  std::size_t k = 0;
  while (prod > limit) {
    prod *= uniform01(rng);
    ++k;
  }
  return k;
}

class Zipf {
 public:
  Zipf(std::size_t n, double s) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cdf_[k] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "today", "music", "dance", "recipe", "travel", "weekend", "family", "coffee", "sunset", "workout",
      "morning", "story", "friends", "city", "garden", "puppy", "summer", "beach", "tutorial", "vibes",
      "game", "news", "school", "project", "street", "market", "concert", "movie", "review", "challenge"};
  return words;
}

inline std::string random_words(std::mt19937_64& rng, std::size_t n) {
  std::string out;
  const auto& w = filler_words();
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += w[uniform_index(rng, w.size())];
  }
  return out;
}

inline std::string autogen_name(std::mt19937_64& rng) {
  std::string name = "user";
  name += static_cast<char>('1' + uniform_index(rng, 9));
  for (int i = 1; i < 13; ++i) name += static_cast<char>('0' + uniform_index(rng, 10));
  return name;
}

inline std::string organic_name(std::mt19937_64& rng) {
  static const char* syllables[] = {"ka", "mi", "lo", "ra", "ve", "no", "sa", "ti", "zu", "be", "do", "fi", "ga", "hu", "je", "qu"};
  std::string name;
  const std::size_t parts = 2 + uniform_index(rng, 3);
  for (std::size_t i = 0; i < parts; ++i) name += syllables[uniform_index(rng, 16)];
  if (uniform01(rng) < 0.6) name += std::to_string(uniform_index(rng, 1000));
  return name;
}

inline std::vector<float> gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(normal(rng));
  return v;
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline std::string zero_pad(std::size_t v, std::size_t width) {
  std::string digits = std::to_string(v);
  return std::string(digits.size() < width ? width - digits.size() : 0, '0') + digits;
}

/// Seconds into the day drawn from a cosine-shaped diurnal curve.
inline std::int64_t diurnal_second(std::mt19937_64& rng, int peak_hour, double amplitude) {
  for (;;) {
    const double t = uniform01(rng) * 86400.0;
    const double phase = 2.0 * std::numbers::pi * (t / 3600.0 - peak_hour) / 24.0;
    if (uniform01(rng) * (1.0 + amplitude) <= 1.0 + amplitude * std::cos(phase)) return static_cast<std::int64_t>(t);
  }
}

struct OrganicShared {
  Zipf tags;
  Zipf domains;
  Zipf creators;
};

struct UserOutput {
  std::vector<PostRecord> posts;
  std::vector<CommentRecord> comments;
  std::vector<EmbeddingRecord> embeddings;
};

inline std::string organic_id(std::size_t i) { return "o" + zero_pad(i, 6); }

inline UserOutput generate_organic_user(const Scenario& s, const OrganicShared& shared, std::size_t index,
                                        std::uint64_t seed) {
  const auto& o = s.organic;
  const std::string uid = organic_id(index);
  auto rng = stream(seed, "organic:" + uid);
  UserOutput out;
  const std::string username = uniform01(rng) < o.autogen_username_fraction ? autogen_name(rng) : organic_name(rng);
  const double draw = std::exp(o.posts_log_mean + o.posts_log_sigma * normal(rng));
  const auto n_posts = std::clamp(static_cast<std::size_t>(std::llround(draw)), o.min_posts, o.max_posts);
  const bool tags_active = uniform01(rng) < o.hashtag_active_fraction;
  std::vector<std::size_t> personal(o.personal_tags);
  for (auto& t : personal) t = shared.tags(rng);
  // Favourite sites come from the long tail rather than the popularity curve.
  std::vector<std::size_t> favourites(1 + uniform_index(rng, 4));
  for (auto& d : favourites) d = uniform_index(rng, o.domain_vocab);

  for (std::size_t k = 0; k < n_posts; ++k) {
    PostRecord p;
    p.post_id = uid + "_" + std::to_string(k);
    p.user_id = uid;
    p.username = username;
    p.timestamp = s.window_start + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(s.window_days))) * 86400 +
                  diurnal_second(rng, o.peak_hour, o.diurnal_amplitude);
    std::string text = random_words(rng, 2 + uniform_index(rng, 6));
    if (tags_active) {
      static constexpr double kTagWeights[] = {0.08, 0.08, 0.168, 0.168, 0.168, 0.168, 0.168};
      double u = uniform01(rng);
      std::size_t n_tags = 0;
      while (n_tags < 6 && u >= kTagWeights[n_tags]) u -= kTagWeights[n_tags++];
      for (std::size_t t = 0; t < n_tags; ++t) {
        const std::size_t tag = (!personal.empty() && uniform01(rng) < o.personal_tag_share)
                                    ? personal[uniform_index(rng, personal.size())]
                                    : shared.tags(rng);
        const std::string name = "tag" + std::to_string(tag);
        if (std::find(p.hashtags.begin(), p.hashtags.end(), name) != p.hashtags.end()) continue;
        p.hashtags.push_back(name);
        text += " #" + name;
      }
    }
    if (uniform01(rng) < o.url_probability) {
      const std::size_t d = uniform01(rng) < o.favourite_domain_share ? favourites[uniform_index(rng, favourites.size())]
                                                                      : shared.domains(rng);
      const std::string url = "https://site" + std::to_string(d) + ".com/p/" + std::to_string(uniform_index(rng, 100000));
      p.urls.push_back(url);
      text += " " + url;
    }
    auto creator = [&] { return organic_id(shared.creators(rng) % o.users) + "_0"; };
    if (uniform01(rng) < o.duet_probability) p.duet_target = creator();
    if (uniform01(rng) < o.stitch_probability) p.stitch_target = creator();
    if (uniform01(rng) < o.reply_probability) p.reply_target = creator();
    p.description = text;
    if (uniform01(rng) < o.speech_probability) {
      p.transcript = random_words(rng, 3 + uniform_index(rng, 10));
      out.embeddings.push_back({p.post_id, EmbeddingKind::Speech, gaussian_vector(rng, o.speech_dimension)});
    }
    if (uniform01(rng) < o.video_probability) {
      out.embeddings.push_back({p.post_id, EmbeddingKind::Video, gaussian_vector(rng, o.video_dimension)});
    }
    out.posts.push_back(std::move(p));
  }
  const std::size_t n_comments = poisson(rng, o.comments_per_user);
  for (std::size_t k = 0; k < n_comments; ++k) {
    CommentRecord c;
    c.comment_id = uid + "_c" + std::to_string(k);
    c.post_id = organic_id(uniform_index(rng, o.users)) + "_0";
    c.user_id = uid;
    c.timestamp = s.window_start + static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(s.window_days * 86400));
    c.text = random_words(rng, 3);
    if (uniform01(rng) < o.comment_url_probability) {
      const std::size_t d = uniform01(rng) < o.favourite_domain_share ? favourites[uniform_index(rng, favourites.size())]
                                                                      : shared.domains(rng);
      c.urls.push_back("https://site" + std::to_string(d) + ".com/c/" + std::to_string(uniform_index(rng, 100000)));
      c.text += " " + c.urls.back();
    }
    out.comments.push_back(std::move(c));
  }
  return out;
}

inline void generate_campaign(const Scenario& s, const CampaignSpec& c, std::uint64_t seed, Dataset& data,
                              std::set<std::string>& members) {
  auto rng = stream(seed, "campaign:" + c.name);
  auto has = [&](TraceKind k) { return std::find(c.traces.begin(), c.traces.end(), k) != c.traces.end(); };
  std::vector<std::string> ids, names;
  for (std::size_t m = 0; m < c.size; ++m) {
    ids.push_back(c.name + "-" + zero_pad(m, 3));
    const bool autogen = static_cast<double>(m) < c.username.autogen_fraction * static_cast<double>(c.size);
    names.push_back(autogen ? autogen_name(rng) : c.username.prefix + organic_name(rng));
    members.insert(ids.back());
  }
  const bool cotimed = has(TraceKind::SpeechSimilarity) || has(TraceKind::VideoSimilarity);
  const bool binned = has(TraceKind::SynchronizedPosting);
  std::vector<std::string> sequence(c.hashtag_pool.begin(),
                                    c.hashtag_pool.begin() + static_cast<std::ptrdiff_t>(std::min(c.sequence_length, c.hashtag_pool.size())));
  for (auto& tag : sequence) tag = detail::ascii_lower(tag);

  for (std::size_t r = 0; r < c.rounds; ++r) {
    const std::int64_t day = static_cast<std::int64_t>(r) * s.window_days / static_cast<std::int64_t>(c.rounds);
    const std::int64_t span = (c.end_hour - c.start_hour) * 3600;
    std::int64_t start = s.window_start + day * 86400 + c.start_hour * 3600 +
                         static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(span) * 0.5);
    if (binned) start -= (start - s.window_start) % c.sync_bin_seconds;
    std::vector<std::size_t> order(c.size);
    for (std::size_t m = 0; m < c.size; ++m) order[m] = m;
    shuffle(order, rng);
    const auto base_speech = gaussian_vector(rng, c.embedding.dimension);
    const auto base_video = gaussian_vector(rng, c.embedding.dimension);
    const std::string domain = c.domain_pool.empty() ? std::string() : c.domain_pool[r % c.domain_pool.size()];
    const std::string target = c.target_pool.empty() ? std::string() : c.target_pool[r % c.target_pool.size()];
    for (std::size_t slot = 0; slot < c.size; ++slot) {
      const std::size_t m = order[slot];
      if (uniform01(rng) >= c.duplication_rate) continue;
      PostRecord p;
      p.post_id = ids[m] + "_" + std::to_string(r);
      p.user_id = ids[m];
      p.username = names[m];
      if (cotimed) {
        p.timestamp = start;
      } else if (binned) {
        p.timestamp = start + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(c.sync_bin_seconds)));
      } else {
        p.timestamp = start + static_cast<std::int64_t>(slot) * c.cadence_seconds +
                      static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(c.cadence_seconds / 4 + 1)));
      }
      std::string text = random_words(rng, 3);
      if (has(TraceKind::HashtagSequence)) {
        p.hashtags = sequence;
        for (const auto& tag : sequence) text += " #" + tag;
      }
      if (has(TraceKind::CoDomainDescription)) {
        p.urls.push_back("https://" + domain + "/story/" + std::to_string(r * 1000 + m));
        text += " " + p.urls.back();
      }
      if (has(TraceKind::CoDuet)) p.duet_target = target;
      if (has(TraceKind::CoStitch)) p.stitch_target = target;
      if (has(TraceKind::CoReply)) p.reply_target = target;
      p.description = text;
      if (has(TraceKind::SpeechSimilarity)) {
        p.transcript = c.script;
        data.embeddings.push_back({p.post_id, EmbeddingKind::Speech, base_speech});
      }
      if (has(TraceKind::VideoSimilarity)) {
        auto v = base_video;
        for (auto& x : v) x += static_cast<float>(c.embedding.noise_sigma * normal(rng));
        data.embeddings.push_back({p.post_id, EmbeddingKind::Video, std::move(v)});
      }
      if (has(TraceKind::CoDomainComment)) {
        CommentRecord cm;
        cm.comment_id = p.post_id + "_c";
        cm.post_id = organic_id(uniform_index(rng, std::max<std::size_t>(1, s.organic.users))) + "_0";
        cm.user_id = ids[m];
        cm.timestamp = p.timestamp;
        cm.urls.push_back("https://" + domain + "/c/" + std::to_string(r * 1000 + m));
        cm.text = "read this " + cm.urls.back();
        data.comments.push_back(std::move(cm));
      }
      data.posts.push_back(std::move(p));
    }
  }
}

}  // namespace detail

/// Deterministic for a given (scenario, seed); `threads` only changes speed.
inline Generated generate(const Scenario& scenario, std::uint64_t seed, std::size_t threads = 1) {
  scenario.validate();
  Generated g;
  const auto& o = scenario.organic;
  const detail::OrganicShared shared{detail::Zipf(o.hashtag_vocab, o.hashtag_zipf), detail::Zipf(o.domain_vocab, o.domain_zipf),
                                     detail::Zipf(std::max<std::size_t>(1, o.users), o.creator_zipf)};
  std::vector<detail::UserOutput> users(o.users);
  detail::parallel_chunks(o.users, detail::resolve_threads(threads), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) users[i] = detail::generate_organic_user(scenario, shared, i, seed);
  });
  for (std::size_t i = 0; i < o.users; ++i) {
    g.truth.organic.insert(detail::organic_id(i));
    auto& u = users[i];
    std::move(u.posts.begin(), u.posts.end(), std::back_inserter(g.data.posts));
    std::move(u.comments.begin(), u.comments.end(), std::back_inserter(g.data.comments));
    std::move(u.embeddings.begin(), u.embeddings.end(), std::back_inserter(g.data.embeddings));
  }
  for (const auto& c : scenario.campaigns) {
    auto& members = g.truth.campaigns[c.name];
    detail::generate_campaign(scenario, c, seed, g.data, members);
    for (const auto& m : members) {
      if (g.truth.organic.count(m)) throw ConfigError("campaign '" + c.name + "' reuses organic id " + m);
      for (const auto& [other, set] : g.truth.campaigns) {
        if (other != c.name && set.count(m)) throw ConfigError("campaigns '" + c.name + "' and '" + other + "' share id " + m);
      }
    }
  }
  auto by_time = [](const auto& a, const auto& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.post_id < b.post_id;
  };
  std::sort(g.data.posts.begin(), g.data.posts.end(), by_time);
  std::sort(g.data.comments.begin(), g.data.comments.end(), [](const CommentRecord& a, const CommentRecord& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.comment_id < b.comment_id;
  });
  std::sort(g.data.embeddings.begin(), g.data.embeddings.end(), [](const EmbeddingRecord& a, const EmbeddingRecord& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.post_id < b.post_id;
  });
  return g;
}

// ---------------------------------------------------------------------------
// Scoring and data loss

/// Exactly round((1 - fraction) * n) posts, chosen uniformly; input order is kept.
inline std::vector<PostRecord> drop_posts(const std::vector<PostRecord>& posts, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("drop fraction must lie in [0, 1)");
  const std::size_t n = posts.size();
  const auto keep = static_cast<std::size_t>(std::llround((1.0 - fraction) * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  auto rng = detail::stream(seed, "drop_posts");
  for (std::size_t i = 0; i < keep; ++i) std::swap(idx[i], idx[i + detail::uniform_index(rng, n - i)]);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<PostRecord> out;
  out.reserve(keep);
  for (auto i : idx) out.push_back(posts[i]);
  return out;
}

/// Embeddings and comments whose post survived.
inline Dataset restrict_to_posts(const Dataset& data, std::vector<PostRecord> posts) {
  Dataset out;
  std::set<std::string> kept;
  for (const auto& p : posts) kept.insert(p.post_id);
  out.posts = std::move(posts);
  for (const auto& e : data.embeddings) {
    if (kept.count(e.post_id)) out.embeddings.push_back(e);
  }
  out.comments = data.comments;
  return out;
}

inline double retention(const std::set<std::string>& full, const std::set<std::string>& degraded) {
  if (full.empty()) throw ContractViolation("retention needs a nonempty reference set");
  std::size_t kept = 0;
  for (const auto& u : full) kept += degraded.count(u);
  return static_cast<double>(kept) / static_cast<double>(full.size());
}

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::string, double> campaign_recall;
};

/// Precision over detected accounts (0 when nothing is detected); recall over all
/// campaign accounts.
inline EvalResult evaluate(const std::set<std::string>& detected, const GroundTruth& truth) {
  EvalResult r;
  const auto positives = truth.campaign_accounts();
  std::size_t hits = 0;
  for (const auto& u : detected) hits += positives.count(u);
  r.precision = detected.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(detected.size());
  r.recall = positives.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(positives.size());
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  for (const auto& [name, members] : truth.campaigns) {
    std::size_t found = 0;
    for (const auto& u : members) found += detected.count(u);
    r.campaign_recall[name] = members.empty() ? 0.0 : static_cast<double>(found) / static_cast<double>(members.size());
  }
  return r;
}

inline Json to_json(const EvalResult& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"campaign_recall", r.campaign_recall}};
}

// ---------------------------------------------------------------------------
// Synthetic voices for voiceprint fixtures

struct VoiceSpec {
  double f0 = 120.0;                          // Hz
  std::array<double, 3> formants{500, 1500, 2500};  // Hz
  std::array<double, 3> bandwidths{80, 120, 160};   // Hz
  double breathiness = 0.05;                  // noise share of the excitation
};

/// Nine well-separated voice presets.
inline std::vector<VoiceSpec> voice_palette() {
  std::vector<VoiceSpec> voices;
  const double f0s[] = {95.0, 150.0, 230.0};
  const std::array<double, 3> formant_sets[] = {{350, 900, 2300}, {650, 1300, 2700}, {450, 2000, 3100}};
  for (double f0 : f0s) {
    for (const auto& f : formant_sets) voices.push_back({f0, f, {70, 110, 150}, 0.05});
  }
  return voices;
}

/// A clip of `seconds` audio: a jittered glottal pulse train with syllable-level
/// loudness and pitch movement (driven by `text_seed`) shaped by the voice's formants.
inline std::vector<float> synthesize_voice(const VoiceSpec& v, std::uint64_t text_seed, double seconds,
                                           double sample_rate = 16000.0) {
  auto rng = detail::stream(text_seed, "voice");
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> excitation(n, 0.0);
  double phase = 0.0;
  double syllable_end = 0.0, gain = 1.0, pitch = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    if (t >= syllable_end) {
      syllable_end = t + 0.12 + 0.2 * detail::uniform01(rng);
      gain = detail::uniform01(rng) < 0.1 ? 0.2 : 0.8 + 0.2 * detail::uniform01(rng);
      pitch = 0.97 + 0.06 * detail::uniform01(rng);
    }
    phase += v.f0 * pitch / sample_rate;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    excitation[i] = gain * ((1.0 - v.breathiness) * pulse + v.breathiness * 0.3 * detail::normal(rng));
  }
  std::vector<double> signal = excitation;
  for (std::size_t f = 0; f < 3; ++f) {
    const double r = std::exp(-std::numbers::pi * v.bandwidths[f] / sample_rate);
    const double theta = 2.0 * std::numbers::pi * v.formants[f] / sample_rate;
    const double a1 = 2.0 * r * std::cos(theta), a2 = -r * r;
    double y1 = 0.0, y2 = 0.0;
    for (auto& x : signal) {
      const double y = (1.0 - r) * x + a1 * y1 + a2 * y2;
      y2 = y1;
      y1 = y;
      x = y;
    }
  }
  double energy = 1e-24;
  for (double x : signal) energy += x * x;
  const double rms = std::sqrt(energy / static_cast<double>(std::max<std::size_t>(n, 1)));
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(std::clamp(0.1 * signal[i] / rms, -1.0, 1.0));
  return out;
}

}  // namespace cibnet
