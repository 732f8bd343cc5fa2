#pragma once

// Edge-list CSV and GraphML serialization for similarity networks.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <tuple>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include "cibnet/error.hpp"
#include "cibnet/simnet.hpp"
#include "cibnet/traces.hpp"

namespace cibnet {

namespace detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string xml_unescape(const std::string& s) {
  static const std::pair<const char*, char> table[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool hit = false;
    if (s[i] == '&') {
      for (const auto& [entity, ch] : table) {
        const std::size_t len = std::char_traits<char>::length(entity);
        if (s.compare(i, len, entity) == 0) {
          out += ch;
          i += len;
          hit = true;
          break;
        }
      }
    }
    if (!hit) out += s[i++];
  }
  return out;
}

inline double parse_weight(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double w = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return w;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line) + ": invalid edge weight '" + text + "'");
  }
}

/// Assembles a network from named edges; nodes are the endpoints plus `extra` names.
inline SimilarityNetwork network_from_named_edges(const std::vector<std::tuple<std::string, std::string, double>>& named,
                                                  std::vector<std::string> extra, TraceKind kind) {
  SimilarityNetwork net;
  net.kind = kind;
  net.nodes = std::move(extra);
  for (const auto& [a, b, w] : named) {
    net.nodes.push_back(a);
    net.nodes.push_back(b);
  }
  std::sort(net.nodes.begin(), net.nodes.end());
  net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> edges;
  for (const auto& [a, b, w] : named) {
    if (a == b) throw DataError("self-loop on node '" + a + "'");
    if (!(w > 0.0)) throw DataError("non-positive edge weight between '" + a + "' and '" + b + "'");
    auto ia = *net.index_of(a), ib = *net.index_of(b);
    auto key = std::make_pair(std::min(ia, ib), std::max(ia, ib));
    if (!edges.emplace(key, w).second) throw DataError("duplicate edge between '" + a + "' and '" + b + "'");
  }
  for (const auto& [key, w] : edges) net.edges.push_back({key.first, key.second, w});
  return net;
}

}  // namespace detail

/// Writes "u,v,w" rows. Isolated nodes are not representable in this format.
inline void write_edge_csv(std::ostream& out, const SimilarityNetwork& net) {
  out << "u,v,w\n";
  for (const auto& e : net.edges) {
    out << detail::csv_field(net.nodes[e.u]) << ',' << detail::csv_field(net.nodes[e.v]) << ','
        << detail::format_double(e.w) << '\n';
  }
}

inline SimilarityNetwork read_edge_csv(std::istream& in, TraceKind kind) {
  std::vector<std::tuple<std::string, std::string, double>> named;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (line_no == 1 && fields.size() == 3 && fields[0] == "u" && fields[1] == "v" && fields[2] == "w") continue;
    if (fields.size() != 3) throw DataError("line " + std::to_string(line_no) + ": expected 3 fields");
    named.emplace_back(fields[0], fields[1], detail::parse_weight(fields[2], line_no));
  }
  return detail::network_from_named_edges(named, {}, kind);
}

inline void write_graphml(std::ostream& out, const SimilarityNetwork& net) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"w\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph id=\"" << to_string(net.kind) << "\" edgedefault=\"undirected\">\n";
  for (const auto& n : net.nodes) out << "    <node id=\"" << detail::xml_escape(n) << "\"/>\n";
  for (const auto& e : net.edges) {
    out << "    <edge source=\"" << detail::xml_escape(net.nodes[e.u]) << "\" target=\""
        << detail::xml_escape(net.nodes[e.v]) << "\"><data key=\"w\">" << detail::format_double(e.w)
        << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

/// Reads the subset of GraphML produced by write_graphml: node ids, edge endpoints and
/// a weight stored under the key whose attr.name is "weight" (1.0 when absent).
inline SimilarityNetwork read_graphml(std::istream& in, TraceKind kind) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto attr = [](const std::string& tag, const std::string& name) -> std::optional<std::string> {
    const std::regex re("\\b" + name + "\\s*=\\s*\"([^\"]*)\"");
    std::smatch m;
    if (std::regex_search(tag, m, re)) return detail::xml_unescape(m[1].str());
    return std::nullopt;
  };
  std::string weight_key = "w";
  const std::regex key_re("<key\\b[^>]*>");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), key_re); it != std::sregex_iterator(); ++it) {
    const std::string tag = it->str();
    if (attr(tag, "attr.name") == std::optional<std::string>("weight")) {
      if (auto id = attr(tag, "id")) weight_key = *id;
    }
  }
  std::vector<std::string> nodes;
  const std::regex node_re("<node\\b[^>]*>");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), node_re); it != std::sregex_iterator(); ++it) {
    auto id = attr(it->str(), "id");
    if (!id) throw DataError("GraphML node without id");
    nodes.push_back(*id);
  }
  std::vector<std::tuple<std::string, std::string, double>> named;
  const std::regex edge_re("<edge\\b([^>]*?)(/>|>([\\s\\S]*?)</edge>)");
  const std::regex data_re("<data\\b[^>]*\\bkey\\s*=\\s*\"([^\"]*)\"[^>]*>([^<]*)</data>");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), edge_re); it != std::sregex_iterator(); ++it) {
    const std::string head = (*it)[1].str();
    auto src = attr(head, "source");
    auto dst = attr(head, "target");
    if (!src || !dst) throw DataError("GraphML edge without endpoints");
    double w = 1.0;
    const std::string body = (*it)[3].str();
    for (auto d = std::sregex_iterator(body.begin(), body.end(), data_re); d != std::sregex_iterator(); ++d) {
      if ((*d)[1].str() == weight_key) w = detail::parse_weight((*d)[2].str(), 0);
    }
    named.emplace_back(*src, *dst, w);
  }
  return detail::network_from_named_edges(named, std::move(nodes), kind);
}

}  // namespace cibnet
