#pragma once

// Resolution configurations of a diagram: circles traced through chosen
// smoothings, arcs at 0-resolved crossings, embedded surgery, and the
// index-2 ladybug shapes.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "surfkh/diagram.hpp"
#include "surfkh/errors.hpp"
#include "surfkh/surface_group.hpp"

namespace surfkh {

using State = std::uint64_t;

inline constexpr int state_bit(State v, int i) { return static_cast<int>((v >> i) & 1U); }
inline int popcount(State v) { return __builtin_popcountll(v); }

enum class ArcKind { m_arc, c_arc, scs };
enum class Side { left, right };
enum class Index2Kind { ladybug, quasi_ladybug, other };
enum class Pairing { right, left };

inline const char* to_string(ArcKind k) {
  switch (k) {
    case ArcKind::m_arc: return "m-arc";
    case ArcKind::c_arc: return "c-arc";
    case ArcKind::scs: return "scs";
  }
  return "?";
}
inline const char* to_string(Index2Kind k) {
  switch (k) {
    case Index2Kind::ladybug: return "ladybug";
    case Index2Kind::quasi_ladybug: return "quasi-ladybug";
    case Index2Kind::other: return "other";
  }
  return "?";
}
inline const char* to_string(Pairing p) { return p == Pairing::right ? "right" : "left"; }
inline const char* to_string(Side s) { return s == Side::right ? "right" : "left"; }

// A circle as a cyclic sequence of darts (dart = 2*edge + reversed).
struct Circle {
  std::vector<int> darts;
  std::vector<int> edges;                     // sorted
  std::vector<std::pair<int, int>> passages;  // sorted (crossing, smoothing bit)
  SurfaceWord word;
  LoopClass cls;

  bool is_contractible() const noexcept { return cls.is_contractible(); }
  bool contains_edge(int e) const { return std::binary_search(edges.begin(), edges.end(), e); }
  // Same embedded circle: same edges and same smoothings where it passes.
  bool same_as(const Circle& o) const { return edges == o.edges && passages == o.passages; }
};

struct ArcEnd {
  int circle = -1;
  int position = -1;  // the passage follows darts[position]
  Side side = Side::left;
};

// Arc at a 0-resolved crossing; ends[0] sits on the strand through slots 1,2.
struct Arc {
  int crossing = -1;
  std::array<ArcEnd, 2> ends{};
};

struct ResolutionConfiguration {
  State state = 0;
  std::vector<Circle> circles;  // ordered by least edge
  std::vector<Arc> arcs;        // ordered by crossing order

  int index() const noexcept { return static_cast<int>(arcs.size()); }
  State arc_mask() const {
    State m = 0;
    for (const auto& a : arcs) m |= State{1} << a.crossing;
    return m;
  }
  int arc_position(int crossing) const {
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].crossing == crossing) return static_cast<int>(i);
    }
    return -1;
  }
  int find_circle(const Circle& c) const {
    for (std::size_t i = 0; i < circles.size(); ++i) {
      if (circles[i].same_as(c)) return static_cast<int>(i);
    }
    return -1;
  }
  int circle_with_edge(int e) const {
    for (std::size_t i = 0; i < circles.size(); ++i) {
      if (circles[i].contains_edge(e)) return static_cast<int>(i);
    }
    return -1;
  }
  // Same circles and same arcs.
  bool same_as(const ResolutionConfiguration& o) const {
    if (circles.size() != o.circles.size() || arc_mask() != o.arc_mask()) return false;
    for (std::size_t i = 0; i < circles.size(); ++i) {
      if (!circles[i].same_as(o.circles[i])) return false;
    }
    return true;
  }
};

struct LabeledResolutionConfiguration {
  ResolutionConfiguration config;
  std::vector<bool> plus;  // plus[i]: circle i labeled x+
};

class ResolutionEngine {
 public:
  explicit ResolutionEngine(SurfaceLinkDiagram d) : d_(std::move(d)) {
    if (d_.crossing_count() > 63) throw unsupported_error("at most 63 crossings are supported");
  }

  const SurfaceLinkDiagram& diagram() const noexcept { return d_; }
  int crossing_count() const noexcept { return d_.crossing_count(); }
  int genus() const noexcept { return d_.genus; }
  State full_state() const { return crossing_count() == 0 ? 0 : ((State{1} << crossing_count()) - 1); }

  ResolutionConfiguration resolve(State v) const {
    if ((v & ~full_state()) != 0) throw domain_error("resolution vector longer than crossing count");
    ResolutionConfiguration c;
    c.state = v;
    std::vector<char> seen(d_.edges.size(), 0);
    for (std::size_t e = 0; e < d_.edges.size(); ++e) {
      if (seen[e]) continue;
      c.circles.push_back(trace(2 * static_cast<int>(e), v, seen));
    }
    for (int i = 0; i < crossing_count(); ++i) {
      if (state_bit(v, i) == 0) c.arcs.push_back(Arc{i, {}});
    }
    attach_arcs(c);
    return c;
  }

  ResolutionConfiguration resolve(const std::vector<int>& bits) const {
    if (static_cast<int>(bits.size()) != crossing_count()) {
      throw domain_error("resolution vector has " + std::to_string(bits.size()) + " entries, expected " +
                         std::to_string(crossing_count()));
    }
    State v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != 0 && bits[i] != 1) throw domain_error("resolution vector entries must be 0 or 1");
      if (bits[i]) v |= State{1} << i;
    }
    return resolve(v);
  }

  // Embedded surgery along the arcs at the crossings in `mask`.
  ResolutionConfiguration surger(const ResolutionConfiguration& c, State mask) const {
    if ((mask & ~c.arc_mask()) != 0) throw domain_error("surgery along an arc not in the configuration");
    ResolutionConfiguration out;
    out.state = c.state | mask;
    std::vector<char> seen(d_.edges.size(), 1);
    std::vector<int> touched_edges;
    for (const auto& circ : c.circles) {
      bool touched = false;
      for (const auto& [x, bit] : circ.passages) {
        if ((mask >> x) & 1U) touched = true;
      }
      if (touched) {
        for (int e : circ.edges) {
          seen[e] = 0;
          touched_edges.push_back(e);
        }
      } else {
        out.circles.push_back(circ);
      }
    }
    std::sort(touched_edges.begin(), touched_edges.end());
    for (int e : touched_edges) {
      if (!seen[e]) out.circles.push_back(trace(2 * e, out.state, seen));
    }
    std::sort(out.circles.begin(), out.circles.end(),
              [](const Circle& a, const Circle& b) { return a.edges.front() < b.edges.front(); });
    for (const auto& a : c.arcs) {
      if (!((mask >> a.crossing) & 1U)) out.arcs.push_back(Arc{a.crossing, {}});
    }
    attach_arcs(out);
    return out;
  }

  ResolutionConfiguration surger_arc(const ResolutionConfiguration& c, int crossing) const {
    return surger(c, State{1} << crossing);
  }

  ArcKind classify_arc(const ResolutionConfiguration& c, int crossing) const {
    const auto s = surger_arc(c, crossing);
    const auto before = c.circles.size(), after = s.circles.size();
    if (after + 1 == before) return ArcKind::m_arc;
    if (after == before + 1) return ArcKind::c_arc;
    if (after == before) return ArcKind::scs;
    throw invariant_error("single surgery changed circle count by more than one");
  }

  LoopClass class_of(const SurfaceWord& w) const {
    if (w.genus == 0) return LoopClass::contractible(0);
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(w.letters);
    if (it != cache_.end()) return it->second;
    auto cls = loop_class(w);
    cache_.emplace(w.letters, cls);
    return cls;
  }

  // Recompute arc endpoints and sides after circles changed.
  void attach_arcs(ResolutionConfiguration& c) const {
    std::map<std::pair<int, int>, std::pair<int, int>> at;  // (crossing, entry slot) -> (circle, pos)
    for (std::size_t ci = 0; ci < c.circles.size(); ++ci) {
      const auto& darts = c.circles[ci].darts;
      for (std::size_t k = 0; k < darts.size(); ++k) {
        const Edge& e = d_.edges[darts[k] / 2];
        if (e.closed) continue;
        const Endpoint& head = darts[k] % 2 == 0 ? e.to : e.from;
        at[{head.crossing, head.slot}] = {static_cast<int>(ci), static_cast<int>(k)};
      }
    }
    for (auto& arc : c.arcs) {
      if (state_bit(c.state, arc.crossing) != 0) throw invariant_error("arc at a 1-resolved crossing");
      const std::array<std::array<int, 2>, 2> strands{{{1, 2}, {3, 0}}};
      for (int s = 0; s < 2; ++s) {
        ArcEnd end;
        for (int slot : strands[s]) {
          auto it = at.find({arc.crossing, slot});
          if (it == at.end()) continue;
          end.circle = it->second.first;
          end.position = it->second.second;
          const int out = smoothing_partner(slot, 0);
          end.side = out == (slot + 1) % 4 ? Side::left : Side::right;
          break;
        }
        if (end.circle < 0) throw invariant_error("arc endpoint not on a circle of the configuration");
        arc.ends[s] = end;
      }
    }
  }

 private:
  Circle trace(int start, State v, std::vector<char>& seen) const {
    Circle c;
    int dart = start;
    do {
      c.darts.push_back(dart);
      seen[dart / 2] = 1;
      const Edge& e = d_.edges[dart / 2];
      if (e.closed) break;
      const Endpoint& head = dart % 2 == 0 ? e.to : e.from;
      const int bit = state_bit(v, head.crossing);
      c.passages.emplace_back(head.crossing, bit);
      const SlotUse& out = d_.crossings[head.crossing].slots[smoothing_partner(head.slot, bit)];
      dart = 2 * out.edge + (out.end == 0 ? 0 : 1);
    } while (dart != start);
    for (int x : c.darts) c.edges.push_back(x / 2);
    std::sort(c.edges.begin(), c.edges.end());
    std::sort(c.passages.begin(), c.passages.end());
    c.word = SurfaceWord{d_.genus, {}};
    for (int x : c.darts) {
      const SurfaceWord& w = d_.edges[x / 2].holonomy;
      c.word = concat(c.word, x % 2 == 0 ? w : inverse(w));
    }
    c.word = free_reduce(c.word);
    c.cls = class_of(c.word);
    return c;
  }

  SurfaceLinkDiagram d_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::vector<Letter>, LoopClass> cache_;
};

inline ArcKind classify_arc_by_sides(const ResolutionConfiguration& c, int crossing) {
  const int k = c.arc_position(crossing);
  if (k < 0) throw domain_error("no arc at that crossing");
  const Arc& a = c.arcs[k];
  if (a.ends[0].circle != a.ends[1].circle) return ArcKind::m_arc;
  return a.ends[0].side == a.ends[1].side ? ArcKind::c_arc : ArcKind::scs;
}

namespace detail {

// Keep only the listed circles; arcs survive when `keep_arc` says so and both
// ends remain.
inline ResolutionConfiguration restrict_config(const ResolutionConfiguration& d, const std::vector<char>& keep_circle,
                                               const std::vector<char>& keep_arc) {
  ResolutionConfiguration out;
  out.state = d.state;
  std::vector<int> remap(d.circles.size(), -1);
  for (std::size_t i = 0; i < d.circles.size(); ++i) {
    if (keep_circle[i]) {
      remap[i] = static_cast<int>(out.circles.size());
      out.circles.push_back(d.circles[i]);
    }
  }
  for (std::size_t k = 0; k < d.arcs.size(); ++k) {
    const Arc& a = d.arcs[k];
    if (!keep_arc[k] || remap[a.ends[0].circle] < 0 || remap[a.ends[1].circle] < 0) continue;
    Arc b = a;
    for (auto& e : b.ends) e.circle = remap[e.circle];
    out.arcs.push_back(b);
  }
  return out;
}

}  // namespace detail

// Circles of d not in e; arcs of d whose endpoints avoid every circle of e.
inline ResolutionConfiguration difference(const ResolutionConfiguration& d, const ResolutionConfiguration& e) {
  std::vector<char> keep_circle(d.circles.size(), 1), keep_arc(d.arcs.size(), 1);
  for (std::size_t i = 0; i < d.circles.size(); ++i) keep_circle[i] = e.find_circle(d.circles[i]) < 0;
  for (std::size_t k = 0; k < d.arcs.size(); ++k) {
    const int x = d.arcs[k].crossing;
    for (const auto& c : e.circles) {
      if (std::binary_search(c.passages.begin(), c.passages.end(), std::make_pair(x, 0))) keep_arc[k] = 0;
    }
  }
  return detail::restrict_config(d, keep_circle, keep_arc);
}

inline ResolutionConfiguration intersect(const ResolutionConfiguration& d, const ResolutionConfiguration& e) {
  return difference(d, difference(d, e));
}

inline ResolutionConfiguration core(const ResolutionConfiguration& d) {
  std::vector<char> keep_circle(d.circles.size(), 0), keep_arc(d.arcs.size(), 1);
  for (const auto& a : d.arcs) {
    keep_circle[a.ends[0].circle] = 1;
    keep_circle[a.ends[1].circle] = 1;
  }
  return detail::restrict_config(d, keep_circle, keep_arc);
}

inline bool is_basic(const ResolutionConfiguration& d) { return core(d).circles.size() == d.circles.size(); }

// The basic configuration carried by the arcs at the crossings in `arcs`.
inline ResolutionConfiguration sub_configuration(const ResolutionConfiguration& d, State arcs) {
  if ((arcs & ~d.arc_mask()) != 0) throw domain_error("crossing without an arc in the configuration");
  std::vector<char> keep_circle(d.circles.size(), 1), keep_arc(d.arcs.size(), 0);
  for (std::size_t k = 0; k < d.arcs.size(); ++k) keep_arc[k] = (arcs >> d.arcs[k].crossing) & 1U;
  return core(detail::restrict_config(d, keep_circle, keep_arc));
}

namespace detail {

struct LadybugWalk {
  // passage positions in walk order with the arc index (0 or 1) met there
  std::array<std::pair<int, int>, 4> passages{};
  std::array<Side, 2> side{};
};

inline std::optional<LadybugWalk> ladybug_walk(const ResolutionConfiguration& d) {
  if (d.circles.size() != 1 || d.arcs.size() != 2) return std::nullopt;
  LadybugWalk w;
  std::vector<std::pair<int, int>> ps;
  for (int k = 0; k < 2; ++k) {
    const Arc& a = d.arcs[k];
    if (a.ends[0].side != a.ends[1].side) return std::nullopt;  // not a c-arc
    w.side[k] = a.ends[0].side;
    ps.emplace_back(a.ends[0].position, k);
    ps.emplace_back(a.ends[1].position, k);
  }
  std::sort(ps.begin(), ps.end());
  for (int i = 0; i < 4; ++i) {
    if (ps[i].second == ps[(i + 1) % 4].second) return std::nullopt;  // endpoints do not alternate
    w.passages[i] = ps[i];
  }
  return w;
}

}  // namespace detail

inline Index2Kind classify_index2(const ResolutionConfiguration& d) {
  auto w = detail::ladybug_walk(d);
  if (!w) return Index2Kind::other;
  return w->side[0] == w->side[1] ? Index2Kind::quasi_ladybug : Index2Kind::ladybug;
}

// Bijection between the circles of s_{A1}(d) and s_{A2}(d) (A1 the earlier arc).
struct LadybugMatching {
  ResolutionConfiguration first, second;      // s_{A1}(d), s_{A2}(d)
  std::array<std::pair<int, int>, 2> pairs{};  // (circle of first, circle of second)

  int image(int i) const { return pairs[0].first == i ? pairs[0].second : pairs[1].second; }
};

namespace detail {

// Matching induced by the two pieces that begin right after the passages of
// arc `start_arc`.
inline LadybugMatching matching_from_pieces(const ResolutionEngine& eng, const ResolutionConfiguration& d,
                                            const LadybugWalk& w, int start_arc) {
  LadybugMatching m;
  m.first = eng.surger_arc(d, d.arcs[0].crossing);
  m.second = eng.surger_arc(d, d.arcs[1].crossing);
  const auto& darts = d.circles[0].darts;
  int found = 0;
  for (int i = 0; i < 4; ++i) {
    if (w.passages[i].second != start_arc) continue;
    const int pos = (w.passages[i].first + 1) % static_cast<int>(darts.size());
    const int edge = darts[pos] / 2;
    const int a = m.first.circle_with_edge(edge), b = m.second.circle_with_edge(edge);
    if (a < 0 || b < 0 || found >= 2) throw invariant_error("ladybug piece lost after surgery");
    m.pairs[found++] = {a, b};
  }
  if (found != 2 || m.pairs[0].first == m.pairs[1].first || m.pairs[0].second == m.pairs[1].second) {
    throw invariant_error("ladybug pieces do not induce a bijection");
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

}  // namespace detail

// Right pair: the two pieces running from an endpoint of the right-hand arc
// to an endpoint of the left-hand arc.
inline LadybugMatching ladybug_pairs(const ResolutionEngine& eng, const ResolutionConfiguration& d,
                                     Pairing pairing = Pairing::right) {
  auto w = detail::ladybug_walk(d);
  if (!w || w->side[0] == w->side[1]) throw domain_error("configuration is not a ladybug");
  const Side want = pairing == Pairing::right ? Side::right : Side::left;
  const int start_arc = w->side[0] == want ? 0 : 1;
  return detail::matching_from_pieces(eng, d, *w, start_arc);
}

// Quasi-ladybugs have no intrinsic right pair; the two candidate matchings
// are indexed by the arc the walk starts from.
inline LadybugMatching quasi_ladybug_pairs(const ResolutionEngine& eng, const ResolutionConfiguration& d,
                                           int start_arc) {
  auto w = detail::ladybug_walk(d);
  if (!w || w->side[0] != w->side[1]) throw domain_error("configuration is not a quasi-ladybug");
  if (start_arc != 0 && start_arc != 1) throw domain_error("start arc must be 0 or 1");
  return detail::matching_from_pieces(eng, d, *w, start_arc);
}

}  // namespace surfkh
