#pragma once

// Forensic evidence for detected clusters: density, posting cadence, username
// patterns, temporal profiles, and cross-indicator agreement (NMI, Fisher ratio).

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cibnet/error.hpp"
#include "cibnet/graph_io.hpp"
#include "cibnet/ingest.hpp"
#include "cibnet/prune.hpp"
#include "cibnet/traces.hpp"

namespace cibnet {

inline double density(std::size_t nodes, std::size_t edges) {
  if (nodes < 2) throw ContractViolation("density needs at least two nodes");
  return 2.0 * static_cast<double>(edges) / (static_cast<double>(nodes) * static_cast<double>(nodes - 1));
}

inline double density(const Cluster& c) { return density(c.members.size(), c.induced_edges.size()); }

/// "user" followed by 12 to 14 digits, case-insensitive.
inline bool autogen_username(std::string_view name) {
  if (name.size() < 16 || name.size() > 18) return false;
  if (detail::ascii_lower(name.substr(0, 4)) != "user") return false;
  return std::all_of(name.begin() + 4, name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct PrefixStats {
  std::optional<std::string> prefix;
  double coverage = 0.0;
};

/// The prefix (length >= 4, lowercased) carried by the most names; among equally common
/// prefixes the longest wins, then the lexicographically smallest. A prefix must be
/// shared by at least two names.
inline PrefixStats shared_prefix_stats(const std::vector<std::string>& usernames, std::size_t min_length = 4) {
  if (usernames.empty()) throw ContractViolation("shared prefix of an empty name list");
  std::map<std::string, std::size_t> counts;
  for (const auto& raw : usernames) {
    const auto name = detail::ascii_lower(raw);
    for (std::size_t len = min_length; len <= name.size(); ++len) ++counts[name.substr(0, len)];
  }
  PrefixStats best;
  std::size_t best_count = 1;
  for (const auto& [prefix, count] : counts) {
    const bool better = count > best_count ||
                        (count == best_count && best.prefix && prefix.size() > best.prefix->size());
    if (count >= 2 && better) {
      best.prefix = prefix;
      best_count = count;
    }
  }
  if (best.prefix) best.coverage = static_cast<double>(best_count) / static_cast<double>(usernames.size());
  return best;
}

struct IntervalStats {
  double median = 0.0;
  double p90 = 0.0;
  double fraction_below_300s = 0.0;
};

/// Gaps between consecutive posts on the pooled, time-sorted timeline.
inline std::optional<IntervalStats> inter_post_intervals(std::vector<std::int64_t> timestamps) {
  if (timestamps.size() < 2) return std::nullopt;
  std::sort(timestamps.begin(), timestamps.end());
  std::vector<double> gaps;
  gaps.reserve(timestamps.size() - 1);
  for (std::size_t i = 1; i < timestamps.size(); ++i) gaps.push_back(static_cast<double>(timestamps[i] - timestamps[i - 1]));
  IntervalStats s;
  s.fraction_below_300s =
      static_cast<double>(std::count_if(gaps.begin(), gaps.end(), [](double g) { return g < 300.0; })) /
      static_cast<double>(gaps.size());
  s.p90 = percentile_threshold(gaps, 90.0);
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size() / 2;
  s.median = gaps.size() % 2 == 1 ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
  return s;
}

struct TimeProfile {
  double bin_width = 0.0;
  std::vector<double> gap_density;      // density per gap bin; sum * bin_width = 1
  std::array<double, 24> hour_density{};  // fraction of posts per UTC hour; sums to 1
};

/// Histogram of consecutive-post gaps plus the hour-of-day activity profile.
/// `bins` fixes the number of gap bins (0: just enough to cover the largest gap).
inline TimeProfile time_profile(std::vector<std::int64_t> timestamps, double bin_width, std::size_t bins = 0) {
  if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
  if (timestamps.size() < 2) throw ContractViolation("time profile needs at least two posts");
  std::sort(timestamps.begin(), timestamps.end());
  TimeProfile prof;
  prof.bin_width = bin_width;
  std::vector<double> gaps;
  for (std::size_t i = 1; i < timestamps.size(); ++i) gaps.push_back(static_cast<double>(timestamps[i] - timestamps[i - 1]));
  if (bins == 0) bins = static_cast<std::size_t>(std::floor(*std::max_element(gaps.begin(), gaps.end()) / bin_width)) + 1;
  prof.gap_density.assign(bins, 0.0);
  const double mass = 1.0 / (static_cast<double>(gaps.size()) * bin_width);
  for (double g : gaps) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor(g / bin_width)));
    prof.gap_density[b] += mass;
  }
  for (auto t : timestamps) {
    const auto hour = static_cast<std::size_t>(((t % 86400) + 86400) % 86400 / 3600);
    prof.hour_density[hour] += 1.0 / static_cast<double>(timestamps.size());
  }
  return prof;
}

/// Profiles of a cluster and a baseline over a shared gap binning.
inline std::pair<TimeProfile, TimeProfile> time_gap_density(const std::vector<std::int64_t>& cluster,
                                                            const std::vector<std::int64_t>& baseline,
                                                            double bin_width) {
  auto max_gap = [](std::vector<std::int64_t> ts) {
    if (ts.size() < 2) throw ContractViolation("time profile needs at least two posts");
    std::sort(ts.begin(), ts.end());
    std::int64_t m = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) m = std::max(m, ts[i] - ts[i - 1]);
    return m;
  };
  if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
  const double widest = static_cast<double>(std::max(max_gap(cluster), max_gap(baseline)));
  const auto bins = static_cast<std::size_t>(std::floor(widest / bin_width)) + 1;
  return {time_profile(cluster, bin_width, bins), time_profile(baseline, bin_width, bins)};
}

inline void write_time_profile_csv(std::ostream& out, const TimeProfile& cluster, const TimeProfile& baseline) {
  out << "section,bin_start,cluster,baseline\n";
  for (std::size_t b = 0; b < cluster.gap_density.size(); ++b) {
    out << "gap," << detail::format_double(static_cast<double>(b) * cluster.bin_width) << ','
        << detail::format_double(cluster.gap_density[b]) << ',' << detail::format_double(baseline.gap_density[b]) << '\n';
  }
  for (std::size_t h = 0; h < 24; ++h) {
    out << "hour," << h << ',' << detail::format_double(cluster.hour_density[h]) << ','
        << detail::format_double(baseline.hour_density[h]) << '\n';
  }
}

enum class NmiNormalization { Geometric, Arithmetic };

/// NMI of two labelings of the same items.
inline double nmi_labels(const std::vector<int>& a, const std::vector<int>& b,
                         NmiNormalization norm = NmiNormalization::Geometric) {
  if (a.size() != b.size()) throw ContractViolation("labelings differ in length");
  if (a.empty()) throw ContractViolation("NMI of an empty labeling");
  if (a == b) return 1.0;
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(ca), hb = entropy(cb);
  if (ha == 0.0 || hb == 0.0) return ha == hb ? 1.0 : 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += (c / n) * std::log(c * n / (ca[key.first] * cb[key.second]));
  const double denom = norm == NmiNormalization::Geometric ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
  return std::clamp(mi / denom, 0.0, 1.0);
}

/// Binary membership labelings over the union of both account sets.
inline double nmi(const std::set<std::string>& a, const std::set<std::string>& b,
                  NmiNormalization norm = NmiNormalization::Geometric) {
  std::set<std::string> all(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  if (all.empty()) throw ContractViolation("NMI over an empty account union");
  std::vector<int> la, lb;
  for (const auto& u : all) {
    la.push_back(a.count(u) ? 1 : 0);
    lb.push_back(b.count(u) ? 1 : 0);
  }
  return nmi_labels(la, lb, norm);
}

/// Binary membership labelings over a fixed account universe, which must contain both sets.
/// Use this when non-members of both sets are meaningful: restricted to the union, two
/// independent memberships never both exclude an account and so look dependent.
inline double nmi(const std::set<std::string>& a, const std::set<std::string>& b, const std::set<std::string>& universe,
                  NmiNormalization norm = NmiNormalization::Geometric) {
  if (universe.empty()) throw ContractViolation("NMI over an empty account universe");
  for (const auto* side : {&a, &b}) {
    for (const auto& u : *side) {
      if (!universe.count(u)) throw ContractViolation("account " + u + " is outside the NMI universe");
    }
  }
  std::vector<int> la, lb;
  for (const auto& u : universe) {
    la.push_back(a.count(u) ? 1 : 0);
    lb.push_back(b.count(u) ? 1 : 0);
  }
  return nmi_labels(la, lb, norm);
}

/// Partition labelings over the union of accounts; an account absent from one side gets
/// that side's "unassigned" label.
inline double nmi(const std::map<std::string, int>& a, const std::map<std::string, int>& b,
                  NmiNormalization norm = NmiNormalization::Geometric) {
  std::set<std::string> all;
  for (const auto& [u, l] : a) all.insert(u);
  for (const auto& [u, l] : b) all.insert(u);
  if (all.empty()) throw ContractViolation("NMI over an empty account union");
  auto label = [](const std::map<std::string, int>& m, const std::string& u) {
    auto it = m.find(u);
    return it == m.end() ? INT32_MIN : it->second;
  };
  std::vector<int> la, lb;
  for (const auto& u : all) {
    la.push_back(label(a, u));
    lb.push_back(label(b, u));
  }
  return nmi_labels(la, lb, norm);
}

struct SeparationReport {
  double fisher_ratio = 0.0;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  double mean_gap_norm = 0.0;
};

/// Projects both classes onto the direction between their means and compares the
/// projected mean gap with the projected (unbiased) variances.
inline SeparationReport separation_report(const std::vector<std::vector<double>>& a,
                                          const std::vector<std::vector<double>>& b) {
  if (a.size() < 2 || b.size() < 2) throw ContractViolation("each class needs at least two vectors");
  const std::size_t dim = a.front().size();
  for (const auto* cls : {&a, &b}) {
    for (const auto& v : *cls) {
      if (v.size() != dim) throw DataError("embedding dimension mismatch");
    }
  }
  auto mean = [dim](const std::vector<std::vector<double>>& cls) {
    std::vector<double> m(dim, 0.0);
    for (const auto& v : cls) {
      for (std::size_t d = 0; d < dim; ++d) m[d] += v[d];
    }
    for (auto& x : m) x /= static_cast<double>(cls.size());
    return m;
  };
  const auto ma = mean(a), mb = mean(b);
  std::vector<double> dir(dim);
  double gap = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    dir[d] = ma[d] - mb[d];
    gap += dir[d] * dir[d];
  }
  gap = std::sqrt(gap);
  SeparationReport rep{0.0, a.size(), b.size(), gap};
  if (gap == 0.0) return rep;
  for (auto& x : dir) x /= gap;
  auto project = [&](const std::vector<std::vector<double>>& cls) {
    std::vector<double> p;
    for (const auto& v : cls) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) s += v[d] * dir[d];
      p.push_back(s);
    }
    return p;
  };
  auto moments = [](const std::vector<double>& p) {
    double m = 0.0;
    for (double x : p) m += x;
    m /= static_cast<double>(p.size());
    double var = 0.0;
    for (double x : p) var += (x - m) * (x - m);
    return std::make_pair(m, var / static_cast<double>(p.size() - 1));
  };
  const auto [pa, va] = moments(project(a));
  const auto [pb, vb] = moments(project(b));
  rep.fisher_ratio = (pa - pb) * (pa - pb) / (va + vb + 1e-12);
  return rep;
}

inline double fisher_ratio(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  return separation_report(a, b).fisher_ratio;
}

struct UsernameFlags {
  std::size_t autogen_count = 0;
  std::optional<std::string> shared_prefix;
  double prefix_coverage = 0.0;
};

struct MemberSummary {
  std::string user_id;
  std::string username;
  std::size_t post_count = 0;
};

struct ClusterReport {
  std::size_t id = 0;
  TraceKind trace = TraceKind::HashtagSequence;
  std::string window;
  std::size_t size = 0;
  std::size_t edge_count = 0;
  double density = 0.0;
  std::vector<std::pair<std::string, std::int64_t>> top_entities;
  std::optional<IntervalStats> intervals;
  UsernameFlags usernames;
  std::vector<MemberSummary> members;
};

struct ReportOptions {
  std::size_t top_entities = 5;
  TraceConfig trace;
};

/// Automated evidence for one cluster. Top entities are the trace's shared entities
/// summed over members (empty for embedding traces).
inline ClusterReport cluster_report(const Cluster& cluster, std::size_t id, const std::vector<PostRecord>& posts,
                                    const std::vector<CommentRecord>& comments = {}, const ReportOptions& opts = {}) {
  ClusterReport rep;
  rep.id = id;
  rep.trace = cluster.trace;
  rep.window = cluster.window;
  rep.size = cluster.members.size();
  rep.edge_count = cluster.induced_edges.size();
  rep.density = density(cluster);

  const std::set<std::string> members(cluster.members.begin(), cluster.members.end());
  std::vector<PostRecord> member_posts;
  for (const auto& p : posts) {
    if (members.count(p.user_id)) member_posts.push_back(p);
  }
  std::vector<CommentRecord> member_comments;
  for (const auto& c : comments) {
    if (members.count(c.user_id)) member_comments.push_back(c);
  }

  if (is_bipartite(cluster.trace)) {
    std::map<std::string, std::int64_t> totals;
    for (const auto& e : extract_bipartite_pairs(member_posts, member_comments, cluster.trace, opts.trace)) {
      totals[e.entity] += e.count;
    }
    std::vector<std::pair<std::string, std::int64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    if (ranked.size() > opts.top_entities) ranked.resize(opts.top_entities);
    rep.top_entities = std::move(ranked);
  }

  std::vector<std::int64_t> times;
  std::map<std::string, std::pair<std::int64_t, std::string>> latest_name;
  std::map<std::string, std::size_t> counts;
  for (const auto& p : member_posts) {
    times.push_back(p.timestamp);
    ++counts[p.user_id];
    auto& slot = latest_name[p.user_id];
    if (slot.second.empty() || p.timestamp >= slot.first) slot = {p.timestamp, p.username};
  }
  rep.intervals = inter_post_intervals(std::move(times));

  std::vector<std::string> names;
  for (const auto& u : cluster.members) {
    MemberSummary m{u, latest_name.count(u) ? latest_name[u].second : std::string(), counts[u]};
    if (!m.username.empty()) {
      names.push_back(m.username);
      if (autogen_username(m.username)) ++rep.usernames.autogen_count;
    }
    rep.members.push_back(std::move(m));
  }
  if (!names.empty()) {
    auto ps = shared_prefix_stats(names);
    rep.usernames.shared_prefix = ps.prefix;
    rep.usernames.prefix_coverage = ps.coverage;
  }
  return rep;
}

inline nlohmann::json to_json(const ClusterReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["trace"] = to_string(r.trace);
  j["window"] = r.window;
  j["size"] = r.size;
  j["edges"] = r.edge_count;
  j["density"] = r.density;
  j["top_entities"] = nlohmann::json::array();
  for (const auto& [entity, count] : r.top_entities) j["top_entities"].push_back({{"entity", entity}, {"count", count}});
  if (r.intervals) {
    j["inter_post_intervals"] = {{"median", r.intervals->median},
                                 {"p90", r.intervals->p90},
                                 {"fraction_below_300s", r.intervals->fraction_below_300s}};
  } else {
    j["inter_post_intervals"] = nullptr;
  }
  j["username_flags"] = {{"autogen_count", r.usernames.autogen_count},
                         {"shared_prefix", r.usernames.shared_prefix ? nlohmann::json(*r.usernames.shared_prefix) : nlohmann::json()},
                         {"prefix_coverage", r.usernames.prefix_coverage}};
  j["members"] = nlohmann::json::array();
  for (const auto& m : r.members) {
    j["members"].push_back({{"user_id", m.user_id}, {"username", m.username}, {"post_count", m.post_count}});
  }
  return j;
}

/// One line per cluster: id, size, density, trace, then the strongest signals.
inline void write_report_table(std::ostream& out, const std::vector<ClusterReport>& reports) {
  out << std::left << std::setw(5) << "id" << std::setw(7) << "size" << std::setw(9) << "density" << std::setw(24)
      << "trace" << std::setw(10) << "<300s" << "top entity\n";
  for (const auto& r : reports) {
    std::ostringstream dens, fast;
    dens << std::fixed << std::setprecision(3) << r.density;
    if (r.intervals) fast << std::fixed << std::setprecision(2) << r.intervals->fraction_below_300s;
    else fast << '-';
    out << std::left << std::setw(5) << r.id << std::setw(7) << r.size << std::setw(9) << dens.str() << std::setw(24)
        << to_string(r.trace) << std::setw(10) << fast.str();
    if (!r.top_entities.empty()) out << r.top_entities.front().first << " (" << r.top_entities.front().second << ')';
    out << '\n';
  }
}

}  // namespace cibnet
