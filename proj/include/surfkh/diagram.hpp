#pragma once

// Link diagrams on a closed orientable surface. The surface position is
// recorded combinatorially: an oriented 4-valent graph whose edges carry the
// holonomy word read while crossing the 4g-gon net.
//
// Slots 0..3 of a crossing run counterclockwise; the over strand joins 0 and
// 2, the under strand joins 1 and 3.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "surfkh/errors.hpp"
#include "surfkh/surface_group.hpp"

namespace surfkh {

struct Endpoint {
  int crossing = -1;
  int slot = -1;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Edge {
  std::string id;
  bool closed = false;  // crossingless component; endpoints unused
  Endpoint from, to;
  SurfaceWord holonomy;  // read traversing from `from` to `to`
  int orientation = 0;   // +1 component runs from->to, -1 reversed
  int line = 0;
};

// Which edge end occupies a slot: end 0 is the edge's `from`, 1 its `to`.
struct SlotUse {
  int edge = -1;
  int end = 0;
};

struct Crossing {
  std::string id;
  std::array<SlotUse, 4> slots{};
  int sign = 0;
  int line = 0;
};

struct Counts {
  int n = 0, n_plus = 0, n_minus = 0;
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Smoothing pairings. The 0-resolution joins (1,2),(3,0); the 1-resolution
// joins (0,1),(2,3).
inline constexpr int smoothing_partner(int slot, int bit) {
  if (bit == 0) {
    constexpr int p[4] = {3, 2, 1, 0};
    return p[slot];
  }
  constexpr int p[4] = {1, 0, 3, 2};
  return p[slot];
}

class SurfaceLinkDiagram {
 public:
  int genus = 0;
  std::vector<Crossing> crossings;
  std::vector<Edge> edges;

  int crossing_count() const noexcept { return static_cast<int>(crossings.size()); }

  Counts counts() const {
    Counts c;
    for (const auto& x : crossings) {
      ++c.n;
      (x.sign > 0 ? c.n_plus : c.n_minus)++;
    }
    return c;
  }

  // Endpoint of edge e at end 0 (from) or 1 (to).
  const Endpoint& endpoint(int e, int end) const { return end == 0 ? edges[e].from : edges[e].to; }

  int crossing_index(std::string_view id) const {
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      if (crossings[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }
  int edge_index(std::string_view id) const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }

  // Rebuilds slot tables, propagates orientation seeds along components and
  // computes crossing signs. `seeds` maps edge index to +1/-1 with the source
  // line for messages.
  void finalize(const std::vector<std::tuple<int, int, int>>& seeds);

  // Fills the crossing slot tables from the edge endpoints and checks that
  // every slot is used exactly once.
  void index_slots();

  // Components as lists of edge indices in traversal order.
  std::vector<std::vector<int>> components() const;
};

namespace detail {

// Dart = 2*edge + reversed. stepping through a crossing straight ahead.
inline int straight_next(const SurfaceLinkDiagram& d, int dart) {
  const int e = dart / 2;
  const Edge& edge = d.edges[e];
  if (edge.closed) return dart;
  const Endpoint& head = (dart % 2 == 0) ? edge.to : edge.from;
  const SlotUse& out = d.crossings[head.crossing].slots[(head.slot + 2) % 4];
  return 2 * out.edge + (out.end == 0 ? 0 : 1);
}

}  // namespace detail

inline std::vector<std::vector<int>> SurfaceLinkDiagram::components() const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (seen[e]) continue;
    std::vector<int> comp;
    int start = 2 * static_cast<int>(e);
    int dart = start;
    do {
      if (seen[dart / 2]) break;
      seen[dart / 2] = 1;
      comp.push_back(dart / 2);
      dart = detail::straight_next(*this, dart);
    } while (dart != start);
    out.push_back(std::move(comp));
  }
  return out;
}

inline void SurfaceLinkDiagram::index_slots() {
  if (genus < 0) throw validation_error("genus must be nonnegative");
  for (auto& c : crossings) c.slots.fill(SlotUse{});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Edge& edge = edges[e];
    if (edge.holonomy.genus != genus) {
      throw validation_error("edge " + edge.id + ": holonomy genus mismatch", edge.line);
    }
    check_word(edge.holonomy);
    if (edge.closed) continue;
    for (int end = 0; end < 2; ++end) {
      const Endpoint& p = end == 0 ? edge.from : edge.to;
      if (p.crossing < 0 || p.crossing >= crossing_count()) {
        throw validation_error("edge " + edge.id + ": dangling endpoint", edge.line);
      }
      if (p.slot < 0 || p.slot > 3) {
        throw validation_error("edge " + edge.id + ": slot must be 0..3", edge.line);
      }
      SlotUse& use = crossings[p.crossing].slots[p.slot];
      if (use.edge >= 0) {
        throw validation_error("slot " + crossings[p.crossing].id + "." + std::to_string(p.slot) +
                                   " used twice (edges " + edges[use.edge].id + ", " + edge.id + ")",
                               edge.line);
      }
      use = {static_cast<int>(e), end};
    }
  }
  for (const auto& c : crossings) {
    for (int s = 0; s < 4; ++s) {
      if (c.slots[s].edge < 0) {
        throw validation_error("crossing " + c.id + ": slot " + std::to_string(s) + " unused", c.line);
      }
    }
  }
}

inline void SurfaceLinkDiagram::finalize(const std::vector<std::tuple<int, int, int>>& seeds) {
  index_slots();

  // orientation propagation along straight-through components
  std::vector<int> comp_of(edges.size(), -1);
  std::vector<int> rel(edges.size(), 0);  // direction relative to component start
  int ncomp = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (comp_of[e] >= 0) continue;
    const int start = 2 * static_cast<int>(e);
    int dart = start;
    do {
      const int k = dart / 2;
      const int dir = dart % 2 == 0 ? 1 : -1;
      if (comp_of[k] >= 0) {
        throw validation_error("edge " + edges[k].id + " traversed twice by one component",
                               edges[k].line);
      }
      comp_of[k] = ncomp;
      rel[k] = dir;
      dart = detail::straight_next(*this, dart);
    } while (dart != start);
    ++ncomp;
  }
  std::vector<int> comp_dir(static_cast<std::size_t>(ncomp), 0);
  std::vector<int> comp_line(static_cast<std::size_t>(ncomp), 0);
  for (const auto& [e, sign, line] : seeds) {
    if (e < 0 || e >= static_cast<int>(edges.size())) throw validation_error("orient: unknown edge", line);
    if (sign != 1 && sign != -1) throw validation_error("orient: sign must be + or -", line);
    const int c = comp_of[e];
    const int want = sign * rel[e];
    if (comp_dir[c] != 0 && comp_dir[c] != want) {
      throw validation_error("orientation seed for edge " + edges[e].id +
                                 " conflicts with seed on line " + std::to_string(comp_line[c]),
                             line);
    }
    comp_dir[c] = want;
    comp_line[c] = line;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int c = comp_of[e];
    if (comp_dir[c] == 0) {
      throw validation_error("component through edge " + edges[e].id + " has no orientation seed",
                             edges[e].line);
    }
    edges[e].orientation = comp_dir[c] * rel[e];
  }

  for (auto& c : crossings) {
    auto outgoing = [&](int slot) {
      const SlotUse& u = c.slots[slot];
      const int o = edges[u.edge].orientation;
      return (u.end == 0) == (o > 0);
    };
    const int over_out = outgoing(0) ? 0 : 2;
    const int under_out = outgoing(1) ? 1 : 3;
    if (outgoing(0) == outgoing(2) || outgoing(1) == outgoing(3)) {
      throw validation_error("crossing " + c.id + ": inconsistent strand orientation", c.line);
    }
    c.sign = under_out == (over_out + 1) % 4 ? 1 : -1;
  }
}

// Seeds reproducing the current orientation: the first edge of every component.
inline std::vector<std::tuple<int, int, int>> orientation_seeds(const SurfaceLinkDiagram& d) {
  std::vector<std::tuple<int, int, int>> seeds;
  for (const auto& comp : d.components()) {
    const int e = *std::min_element(comp.begin(), comp.end());
    seeds.emplace_back(e, d.edges[e].orientation, 0);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

inline SurfaceLinkDiagram reverse_orientation(SurfaceLinkDiagram d) {
  auto seeds = orientation_seeds(d);
  for (auto& s : seeds) std::get<1>(s) = -std::get<1>(s);
  d.finalize(seeds);
  return d;
}

// New crossing order: position i of the result is crossing perm[i] of d.
inline SurfaceLinkDiagram reorder_crossings(const SurfaceLinkDiagram& d, const std::vector<int>& perm) {
  if (perm.size() != d.crossings.size()) throw domain_error("permutation size mismatch");
  std::vector<int> where(perm.size(), -1);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] < 0 || perm[i] >= static_cast<int>(perm.size()) || where[perm[i]] >= 0) {
      throw domain_error("not a permutation");
    }
    where[perm[i]] = static_cast<int>(i);
  }
  SurfaceLinkDiagram out;
  out.genus = d.genus;
  for (int p : perm) out.crossings.push_back(d.crossings[p]);
  out.edges = d.edges;
  for (auto& e : out.edges) {
    if (e.closed) continue;
    e.from.crossing = where[e.from.crossing];
    e.to.crossing = where[e.to.crossing];
  }
  out.finalize(orientation_seeds(d));
  return out;
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits a line into whitespace-separated tokens, keeping "quoted strings" whole.
inline std::vector<std::string> tokenize(std::string_view line, int lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    if (line[i] == '"') {
      const std::size_t j = line.find('"', i + 1);
      if (j == std::string_view::npos) throw format_error("line " + std::to_string(lineno) + ": unterminated string");
      out.emplace_back("\"" + std::string(line.substr(i + 1, j - i - 1)));
      i = j + 1;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '"') ++j;
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct RawEndpoint {
  std::string crossing;
  int slot = -1;
};

inline RawEndpoint parse_endpoint(const std::string& tok, int lineno) {
  const auto dot = tok.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= tok.size()) {
    throw format_error("line " + std::to_string(lineno) + ": endpoint '" + tok + "' is not <crossing>.<slot>");
  }
  const std::string s = tok.substr(dot + 1);
  if (s.size() != 1 || s[0] < '0' || s[0] > '9') {
    throw format_error("line " + std::to_string(lineno) + ": bad slot in '" + tok + "'");
  }
  return {tok.substr(0, dot), s[0] - '0'};
}

struct RawEdge {
  std::string id;
  bool closed = false;
  RawEndpoint from, to;
  std::string holonomy;
  int line = 0;
};

struct RawDiagram {
  int genus = -1;
  int genus_line = 0;
  std::vector<std::pair<std::string, int>> crossings;
  std::vector<RawEdge> edges;
  std::vector<std::tuple<std::string, int, int>> orients;
};

inline SurfaceLinkDiagram build_diagram(const RawDiagram& raw) {
  if (raw.genus < 0) throw validation_error("missing genus header", raw.genus_line);
  SurfaceLinkDiagram d;
  d.genus = raw.genus;
  std::map<std::string, int> cidx;
  for (const auto& [id, line] : raw.crossings) {
    if (!cidx.emplace(id, static_cast<int>(d.crossings.size())).second) {
      throw validation_error("duplicate crossing id " + id, line);
    }
    Crossing c;
    c.id = id;
    c.line = line;
    d.crossings.push_back(c);
  }
  std::map<std::string, int> eidx;
  for (const auto& re : raw.edges) {
    if (!eidx.emplace(re.id, static_cast<int>(d.edges.size())).second) {
      throw validation_error("duplicate edge id " + re.id, re.line);
    }
    Edge e;
    e.id = re.id;
    e.closed = re.closed;
    e.line = re.line;
    try {
      e.holonomy = parse_word(re.holonomy, raw.genus);
    } catch (const format_error& err) {
      throw validation_error("edge " + re.id + ": " + err.what(), re.line);
    }
    if (!re.closed) {
      auto resolve = [&](const RawEndpoint& p) {
        auto it = cidx.find(p.crossing);
        if (it == cidx.end()) throw validation_error("edge " + re.id + ": unknown crossing " + p.crossing, re.line);
        return Endpoint{it->second, p.slot};
      };
      e.from = resolve(re.from);
      e.to = resolve(re.to);
    }
    d.edges.push_back(std::move(e));
  }
  std::vector<std::tuple<int, int, int>> seeds;
  for (const auto& [id, sign, line] : raw.orients) {
    auto it = eidx.find(id);
    if (it == eidx.end()) throw validation_error("orient: unknown edge " + id, line);
    seeds.emplace_back(it->second, sign, line);
  }
  d.finalize(seeds);
  return d;
}

inline SurfaceLinkDiagram parse_sld(std::string_view text) {
  RawDiagram raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line, lineno);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    auto fail = [&](const std::string& msg) { throw format_error("line " + std::to_string(lineno) + ": " + msg); };
    if (kw == "genus") {
      if (tok.size() != 2) fail("expected 'genus <g>'");
      if (raw.genus >= 0) fail("genus given twice");
      try {
        std::size_t used = 0;
        raw.genus = std::stoi(tok[1], &used);
        if (used != tok[1].size() || raw.genus < 0) fail("bad genus '" + tok[1] + "'");
      } catch (const std::logic_error&) {
        fail("bad genus '" + tok[1] + "'");
      }
      raw.genus_line = lineno;
    } else if (kw == "crossing") {
      if (tok.size() != 2) fail("expected 'crossing <id>'");
      raw.crossings.emplace_back(tok[1], lineno);
    } else if (kw == "edge") {
      RawEdge e;
      e.line = lineno;
      if (tok.size() < 3) fail("expected 'edge <id> <c.slot> <c.slot> holonomy \"<word>\"'");
      e.id = tok[1];
      std::size_t k = 2;
      if (tok[2] == "closed") {
        e.closed = true;
        k = 3;
      } else {
        if (tok.size() < 4) fail("edge needs two endpoints");
        e.from = parse_endpoint(tok[2], lineno);
        e.to = parse_endpoint(tok[3], lineno);
        k = 4;
      }
      if (k < tok.size()) {
        if (tok[k] != "holonomy" || k + 2 != tok.size() || tok[k + 1].empty() || tok[k + 1][0] != '"') {
          fail("expected holonomy \"<word>\"");
        }
        e.holonomy = tok[k + 1].substr(1);
      }
      raw.edges.push_back(std::move(e));
    } else if (kw == "orient") {
      if (tok.size() != 3 || (tok[2] != "+" && tok[2] != "-")) fail("expected 'orient <edge-id> <+|->'");
      raw.orients.emplace_back(tok[1], tok[2] == "+" ? 1 : -1, lineno);
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  if (raw.genus < 0) throw format_error("missing 'genus <g>' header");
  return build_diagram(raw);
}

inline SurfaceLinkDiagram parse_json_diagram(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(std::string("json: ") + e.what());
  }
  RawDiagram raw;
  try {
    raw.genus = j.at("genus").get<int>();
    for (const auto& c : j.at("crossings")) raw.crossings.emplace_back(c.get<std::string>(), 0);
    for (const auto& e : j.at("edges")) {
      RawEdge re;
      re.id = e.at("id").get<std::string>();
      re.closed = e.value("closed", false);
      if (!re.closed) {
        re.from = parse_endpoint(e.at("from").get<std::string>(), 0);
        re.to = parse_endpoint(e.at("to").get<std::string>(), 0);
      }
      re.holonomy = e.value("holonomy", std::string());
      raw.edges.push_back(std::move(re));
    }
    if (j.contains("orient")) {
      for (const auto& [id, s] : j.at("orient").items()) {
        const auto sign = s.get<std::string>();
        if (sign != "+" && sign != "-") throw format_error("orient sign must be + or -");
        raw.orients.emplace_back(id, sign == "+" ? 1 : -1, 0);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("json: ") + e.what());
  }
  return build_diagram(raw);
}

}  // namespace detail

// Accepts the line format or a JSON document (detected by a leading '{').
inline SurfaceLinkDiagram parse_diagram(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return detail::parse_json_diagram(text);
  return detail::parse_sld(text);
}

inline SurfaceLinkDiagram load_diagram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_diagram(ss.str());
}

inline std::string format_endpoint(const SurfaceLinkDiagram& d, const Endpoint& p) {
  return d.crossings[p.crossing].id + "." + std::to_string(p.slot);
}

inline std::string serialize_sld(const SurfaceLinkDiagram& d) {
  std::ostringstream out;
  out << "genus " << d.genus << "\n";
  for (const auto& c : d.crossings) out << "crossing " << c.id << "\n";
  for (const auto& e : d.edges) {
    out << "edge " << e.id << " ";
    if (e.closed) {
      out << "closed";
    } else {
      out << format_endpoint(d, e.from) << " " << format_endpoint(d, e.to);
    }
    out << " holonomy \"" << format_word(e.holonomy) << "\"\n";
  }
  for (const auto& [e, sign, line] : orientation_seeds(d)) {
    (void)line;
    out << "orient " << d.edges[e].id << " " << (sign > 0 ? "+" : "-") << "\n";
  }
  return out.str();
}

inline nlohmann::json diagram_to_json(const SurfaceLinkDiagram& d) {
  nlohmann::json j;
  j["genus"] = d.genus;
  j["crossings"] = nlohmann::json::array();
  for (const auto& c : d.crossings) j["crossings"].push_back(c.id);
  j["edges"] = nlohmann::json::array();
  for (const auto& e : d.edges) {
    nlohmann::json je;
    je["id"] = e.id;
    if (e.closed) {
      je["closed"] = true;
    } else {
      je["from"] = format_endpoint(d, e.from);
      je["to"] = format_endpoint(d, e.to);
    }
    je["holonomy"] = format_word(e.holonomy);
    j["edges"].push_back(je);
  }
  nlohmann::json o = nlohmann::json::object();
  for (const auto& [e, sign, line] : orientation_seeds(d)) {
    (void)line;
    o[d.edges[e].id] = sign > 0 ? "+" : "-";
  }
  j["orient"] = o;
  return j;
}

}  // namespace surfkh
