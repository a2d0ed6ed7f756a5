#pragma once

// Posets of decorated resolution configurations and the combinatorial checks
// behind the stable homotopy type: interval sizes, absence of single cycle
// arcs, surjectivity onto the cube, and the boundary graph of index-3
// intervals.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "surfkh/complex.hpp"
#include "surfkh/errors.hpp"
#include "surfkh/resolution.hpp"

namespace surfkh {

// (D, x, y): y labels Z(D), x labels Z(s(D)).
struct DecoratedResolutionConfiguration {
  ResolutionConfiguration config;
  std::vector<bool> y;
  std::vector<bool> x;

  int index() const { return config.index(); }
};

struct PosetElement {
  State surgered = 0;  // arcs of D already surgered
  LabeledResolutionConfiguration element;
  int rank = 0;
};

struct IntervalPoset {
  std::vector<PosetElement> elements;
  std::vector<std::pair<int, int>> covers;  // (lower, upper)
  bool empty = true;
  int bottom = -1;
  int top = -1;
  int index = 0;
  State arcs = 0;

  std::vector<int> ups(int i) const {
    std::vector<int> out;
    for (const auto& [a, b] : covers) {
      if (a == i) out.push_back(b);
    }
    return out;
  }
  std::vector<int> downs(int i) const {
    std::vector<int> out;
    for (const auto& [a, b] : covers) {
      if (b == i) out.push_back(a);
    }
    return out;
  }
};

namespace detail {

// Labelings of f reachable from (e, plus) by one admissible cover.
inline std::vector<std::vector<bool>> cover_labelings(const ResolutionConfiguration& e, const std::vector<bool>& plus,
                                                      const ResolutionConfiguration& f) {
  std::vector<int> before;
  std::vector<int> fixed(f.circles.size(), -1);  // index in e, or -1 when new
  for (std::size_t i = 0; i < e.circles.size(); ++i) {
    const int j = f.find_circle(e.circles[i]);
    if (j >= 0) {
      fixed[j] = static_cast<int>(i);
    } else {
      before.push_back(circle_token(e.circles[i].is_contractible(), plus[i]));
    }
  }
  std::vector<int> fresh;
  for (std::size_t j = 0; j < f.circles.size(); ++j) {
    if (fixed[j] < 0) fresh.push_back(static_cast<int>(j));
  }
  std::vector<std::vector<bool>> out;
  for (int t = 0; t < (1 << fresh.size()); ++t) {
    std::vector<bool> lab(f.circles.size());
    std::vector<int> after;
    for (std::size_t j = 0; j < f.circles.size(); ++j) {
      if (fixed[j] >= 0) lab[j] = plus[fixed[j]];
    }
    for (std::size_t s = 0; s < fresh.size(); ++s) {
      lab[fresh[s]] = ((t >> s) & 1) == 0;
      after.push_back(circle_token(f.circles[fresh[s]].is_contractible(), lab[fresh[s]]));
    }
    if (table_allows(before, after)) out.push_back(std::move(lab));
  }
  return out;
}

}  // namespace detail

inline ResolutionConfiguration surgery_of_all(const ResolutionEngine& eng, const ResolutionConfiguration& d) {
  return eng.surger(d, d.arc_mask());
}

// All labeled configurations between (D, y) and (s(D), x), by upward closure
// from the bottom followed by pruning to those below the top.
inline IntervalPoset build_poset(const ResolutionEngine& eng, const DecoratedResolutionConfiguration& dc) {
  IntervalPoset p;
  p.index = dc.index();
  p.arcs = dc.config.arc_mask();
  if (dc.y.size() != dc.config.circles.size()) throw domain_error("bottom labeling size mismatch");
  const auto top_config = surgery_of_all(eng, dc.config);
  if (dc.x.size() != top_config.circles.size()) throw domain_error("top labeling size mismatch");

  std::map<std::pair<State, std::vector<bool>>, int> id;
  std::vector<PosetElement> all;
  std::vector<std::pair<int, int>> edges;
  std::deque<int> queue;
  all.push_back({0, {dc.config, dc.y}, 0});
  id[{0, dc.y}] = 0;
  queue.push_back(0);
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    const State T = all[cur].surgered;
    const auto cfg = all[cur].element.config;
    const auto lab = all[cur].element.plus;
    for (const auto& arc : cfg.arcs) {
      const auto next_cfg = eng.surger_arc(cfg, arc.crossing);
      const State T2 = T | (State{1} << arc.crossing);
      for (auto& l2 : detail::cover_labelings(cfg, lab, next_cfg)) {
        auto [it, inserted] = id.try_emplace({T2, l2}, static_cast<int>(all.size()));
        if (inserted) {
          all.push_back({T2, {next_cfg, l2}, all[cur].rank + 1});
          queue.push_back(it->second);
        }
        edges.emplace_back(cur, it->second);
      }
    }
  }
  auto top_it = id.find({p.arcs, dc.x});
  if (top_it == id.end()) return p;  // empty
  // keep elements from which the top is reachable
  std::vector<char> keep(all.size(), 0);
  keep[top_it->second] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [a, b] : edges) {
      if (keep[b] && !keep[a]) keep[a] = changed = 1;
    }
  }
  std::vector<int> remap(all.size(), -1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (keep[i]) {
      remap[i] = static_cast<int>(p.elements.size());
      p.elements.push_back(all[i]);
    }
  }
  for (const auto& [a, b] : edges) {
    if (keep[a] && keep[b]) p.covers.emplace_back(remap[a], remap[b]);
  }
  p.empty = false;
  p.bottom = remap[0];
  p.top = remap[top_it->second];
  return p;
}

// The decorated configuration spanned by two generators of a complex.
inline std::optional<DecoratedResolutionConfiguration> decorated_between(const KhovanovComplex& k, int lower, int upper) {
  const auto& gl = k.generators[lower];
  const auto& gu = k.generators[upper];
  if ((gl.state & ~gu.state) != 0 || gl.state == gu.state) return std::nullopt;
  const auto& cl = k.vertices[gl.state];
  const auto& cu = k.vertices[gu.state];
  const auto ll = k.labeled(lower), lu = k.labeled(upper);
  for (std::size_t i = 0; i < cl.circles.size(); ++i) {
    const int j = cu.find_circle(cl.circles[i]);
    if (j >= 0 && ll.plus[i] != lu.plus[j]) return std::nullopt;
  }
  DecoratedResolutionConfiguration dc;
  dc.config = difference(cl, cu);
  for (const auto& c : dc.config.circles) dc.y.push_back(ll.plus[cl.find_circle(c)]);
  const auto top = surgery_of_all(*k.engine, dc.config);
  for (const auto& c : top.circles) {
    const int j = cu.find_circle(c);
    if (j < 0) throw invariant_error("surgered decorated configuration leaves the cube vertex");
    dc.x.push_back(lu.plus[j]);
  }
  return dc;
}

// ------------------------------------------------------------- reports

struct CensusReport {
  std::map<int, long> histogram;  // interval size -> number of intervals
  long ladybug_intervals = 0;
  long quasi_ladybug_intervals = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Counts elements strictly between every pair of generators two steps apart.
inline CensusReport interval_census(const KhovanovComplex& k, std::size_t max_reported = 10) {
  CensusReport rep;
  const int genus = k.genus();
  for (std::size_t a = 0; a < k.generators.size(); ++a) {
    std::map<int, int> count;
    for (const auto& e1 : k.delta[a]) {
      for (const auto& e2 : k.delta[e1.target]) ++count[e2.target];
    }
    for (const auto& [b, c] : count) {
      ++rep.histogram[c];
      auto report = [&](const std::string& why) {
        if (rep.violations.size() < max_reported) {
          rep.violations.push_back(why + ": " + k.describe(static_cast<int>(a)) + " -> " + k.describe(b));
        }
      };
      if (c != 2 && c != 4) {
        report("interval of size " + std::to_string(c));
        continue;
      }
      if (c != 4) continue;
      const auto d2 = core(difference(k.vertices[k.generators[a].state], k.vertices[k.generators[b].state]));
      const auto kind = classify_index2(d2);
      if (kind == Index2Kind::ladybug) ++rep.ladybug_intervals;
      if (kind == Index2Kind::quasi_ladybug) ++rep.quasi_ladybug_intervals;
      if (genus >= 2 || genus == 0) {
        if (kind != Index2Kind::ladybug) report("four-element interval that is not a ladybug");
        if (genus >= 2 && !d2.circles.empty() && !d2.circles[0].is_contractible()) {
          report("four-element ladybug interval on a non-contractible circle");
        }
      } else if (kind == Index2Kind::other) {
        report("four-element interval that is neither a ladybug nor a quasi-ladybug");
      }
    }
  }
  return rep;
}

struct ScsReport {
  long arcs_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Every arc still to be surgered inside a nonvacuous interval must change the
// number of circles.
inline ScsReport scs_freeness(const KhovanovComplex& k, std::size_t max_reported = 10) {
  ScsReport rep;
  const std::size_t N = k.generators.size();
  // states of everything strictly above each generator, folded together
  std::vector<State> above(N, 0);
  std::vector<std::size_t> order(N);
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return k.generators[a].gr_h > k.generators[b].gr_h; });
  for (std::size_t g : order) {
    for (const auto& e : k.delta[g]) above[g] |= k.generators[e.target].state | above[e.target];
  }
  std::map<std::pair<State, int>, ArcKind> kinds;
  for (std::size_t g = 0; g < N; ++g) {
    const State w = k.generators[g].state;
    const State pending = above[g] & ~w;
    for (int c = 0; c < k.engine->crossing_count(); ++c) {
      if (!((pending >> c) & 1U)) continue;
      auto it = kinds.find({w, c});
      if (it == kinds.end()) it = kinds.emplace(std::make_pair(w, c), k.engine->classify_arc(k.vertices[w], c)).first;
      ++rep.arcs_checked;
      if (it->second == ArcKind::scs && rep.violations.size() < max_reported) {
        rep.violations.push_back("scs arc at crossing " + k.diagram().crossings[c].id + " below " +
                                 k.describe(static_cast<int>(g)));
      }
    }
  }
  return rep;
}

struct SurjectivityReport {
  int vertices_expected = 0;
  int vertices_hit = 0;
  bool ok() const { return vertices_hit == vertices_expected; }
};

inline SurjectivityReport pi_surjectivity(const DecoratedResolutionConfiguration& dc, const IntervalPoset& p) {
  if (p.empty) throw domain_error("projection of an empty poset");
  SurjectivityReport rep;
  rep.vertices_expected = 1 << dc.index();
  std::set<State> hit;
  for (const auto& e : p.elements) hit.insert(e.surgered);
  rep.vertices_hit = static_cast<int>(hit.size());
  return rep;
}

struct BoundaryGraphReport {
  int chains = 0;
  std::vector<int> cycle_lengths;  // sorted
  bool all_cycles = true;
  bool hexagons_only = false;
  bool dodecagon = false;
  bool quasi_ladybug = false;
  int ladybug_faces = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

// Within the index-2 interval [lo, hi] of p with middles mids (4 of them),
// pair the middles through the ladybug matching.
inline std::vector<std::pair<int, int>> ladybug_face_pairs(const ResolutionEngine& eng, const IntervalPoset& p, int lo,
                                                           int hi, const std::vector<int>& mids, Pairing pairing,
                                                           BoundaryGraphReport& rep) {
  const auto& elo = p.elements[lo].element;
  const auto& ehi = p.elements[hi].element;
  const auto d2 = core(difference(elo.config, ehi.config));
  const auto kind = classify_index2(d2);
  LadybugMatching m;
  if (kind == Index2Kind::ladybug) {
    m = ladybug_pairs(eng, d2, pairing);
  } else if (kind == Index2Kind::quasi_ladybug) {
    rep.quasi_ladybug = true;
    m = quasi_ladybug_pairs(eng, d2, pairing == Pairing::right ? 0 : 1);
  } else {
    throw invariant_error("four-element interval without a ladybug shape");
  }
  const int first_arc = d2.arcs[0].crossing;
  // the circle of s_A(d2) labeled x+ in a middle element
  auto plus_circle = [&](int mid, const ResolutionConfiguration& side) {
    const auto& e = p.elements[mid].element;
    for (std::size_t i = 0; i < side.circles.size(); ++i) {
      const int j = e.config.find_circle(side.circles[i]);
      if (j >= 0 && e.plus[j]) return static_cast<int>(i);
    }
    return -1;
  };
  std::vector<int> via_first, via_second;
  for (int mid : mids) {
    const State step = p.elements[mid].surgered & ~p.elements[lo].surgered;
    (step == (State{1} << first_arc) ? via_first : via_second).push_back(mid);
  }
  if (via_first.size() != 2 || via_second.size() != 2) throw invariant_error("ladybug interval is not 2 + 2");
  std::vector<std::pair<int, int>> out;
  for (int a : via_first) {
    const int ca = plus_circle(a, m.first);
    if (ca < 0) throw invariant_error("ladybug middle element has no x+ circle");
    const int want = m.image(ca);
    int match = -1;
    for (int b : via_second) {
      if (plus_circle(b, m.second) == want) match = b;
    }
    if (match < 0) throw invariant_error("ladybug matching has no partner");
    out.emplace_back(a, match);
  }
  return out;
}

}  // namespace detail

// Vertices are maximal chains bottom < p < q < top. Replacing p (inside
// [bottom, q]) or q (inside [p, top]) gives the two boundary edges at a chain;
// four-element subintervals are resolved by the ladybug matching.
inline BoundaryGraphReport boundary_graph(const ResolutionEngine& eng, const IntervalPoset& p,
                                          Pairing pairing = Pairing::right, int genus = -1) {
  if (p.empty) throw domain_error("boundary graph of an empty poset");
  if (p.index != 3) throw domain_error("boundary graph needs an index-3 poset");
  if (genus < 0) genus = eng.genus();
  BoundaryGraphReport rep;
  std::vector<std::array<int, 2>> chains;
  std::map<std::array<int, 2>, int> chain_id;
  for (int a : p.ups(p.bottom)) {
    for (int b : p.ups(a)) {
      const auto u = p.ups(b);
      if (std::find(u.begin(), u.end(), p.top) == u.end()) continue;
      chain_id[{a, b}] = static_cast<int>(chains.size());
      chains.push_back({a, b});
    }
  }
  rep.chains = static_cast<int>(chains.size());
  std::vector<std::vector<int>> adj(chains.size());
  auto link = [&](int c1, int c2) {
    adj[c1].push_back(c2);
    adj[c2].push_back(c1);
  };
  auto middles = [&](int lo, int hi) {
    std::vector<int> out;
    for (int m : p.ups(lo)) {
      const auto u = p.ups(m);
      if (std::find(u.begin(), u.end(), hi) != u.end()) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  auto face = [&](int lo, int hi, bool lower_face) {
    const auto mids = middles(lo, hi);
    auto chain_of = [&](int mid) {
      return lower_face ? chain_id.at({mid, hi}) : chain_id.at({lo, mid});
    };
    if (mids.size() == 2) {
      link(chain_of(mids[0]), chain_of(mids[1]));
    } else if (mids.size() == 4) {
      ++rep.ladybug_faces;
      for (const auto& [a, b] : detail::ladybug_face_pairs(eng, p, lo, hi, mids, pairing, rep)) {
        link(chain_of(a), chain_of(b));
      }
    } else {
      rep.errors.push_back("index-2 subinterval with " + std::to_string(mids.size()) + " middle elements");
    }
  };
  std::set<std::pair<int, int>> done_lower, done_upper;
  for (const auto& [a, b] : chains) {
    if (done_lower.insert({p.bottom, b}).second) face(p.bottom, b, true);
    if (done_upper.insert({a, p.top}).second) face(a, p.top, false);
  }
  if (!rep.errors.empty()) {
    rep.all_cycles = false;
    return rep;
  }
  std::vector<char> seen(chains.size(), 0);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    if (adj[c].size() != 2) {
      rep.all_cycles = false;
      rep.errors.push_back("chain with " + std::to_string(adj[c].size()) + " boundary edges");
    }
  }
  if (!rep.all_cycles) return rep;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    if (seen[c]) continue;
    int len = 0;
    std::deque<int> q{static_cast<int>(c)};
    seen[c] = 1;
    while (!q.empty()) {
      const int x = q.front();
      q.pop_front();
      ++len;
      for (int y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          q.push_back(y);
        }
      }
    }
    rep.cycle_lengths.push_back(len);
  }
  std::sort(rep.cycle_lengths.begin(), rep.cycle_lengths.end());
  rep.hexagons_only = std::all_of(rep.cycle_lengths.begin(), rep.cycle_lengths.end(), [](int l) { return l == 6; });
  rep.dodecagon = std::find(rep.cycle_lengths.begin(), rep.cycle_lengths.end(), 12) != rep.cycle_lengths.end();
  if (!rep.hexagons_only) {
    if (genus == 1 && rep.quasi_ladybug) {
      rep.warnings.push_back(rep.dodecagon ? "dodecagon boundary component on the torus"
                                           : "non-hexagonal boundary component on the torus");
    } else {
      rep.errors.push_back("boundary component that is not a hexagon");
    }
  }
  return rep;
}

// ------------------------------------------------ whole-complex audit

struct AuditOptions {
  Pairing pairing = Pairing::right;
  int max_poset_index = 3;  // harvest comparable pairs up to this gap
  std::size_t max_reported = 10;
};

struct AuditReport {
  CensusReport census;
  ScsReport scs;
  long posets_checked = 0;
  long posets_nonvacuous = 0;
  long surjectivity_failures = 0;
  long poset_mismatches = 0;  // poset size disagreeing with the complex interval
  long boundary_graphs = 0;
  std::map<int, long> boundary_cycle_lengths;
  long dodecagons = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty() && census.ok() && scs.ok(); }
};

inline AuditReport audit_complex(const KhovanovComplex& k, const AuditOptions& opt = {}) {
  AuditReport rep;
  rep.census = interval_census(k, opt.max_reported);
  rep.scs = scs_freeness(k, opt.max_reported);
  auto fail = [&](const std::string& s) {
    if (rep.failures.size() < opt.max_reported) rep.failures.push_back(s);
  };
  const std::size_t N = k.generators.size();
  for (std::size_t y = 0; y < N; ++y) {
    // generators above y, by distance, with the number of them in between
    std::map<int, int> dist{{static_cast<int>(y), 0}};
    std::deque<int> q{static_cast<int>(y)};
    while (!q.empty()) {
      const int a = q.front();
      q.pop_front();
      if (dist[a] >= opt.max_poset_index) continue;
      for (const auto& e : k.delta[a]) {
        if (dist.emplace(e.target, dist[a] + 1).second) q.push_back(e.target);
      }
    }
    for (const auto& [x, d] : dist) {
      if (d == 0) continue;
      ++rep.posets_checked;
      auto dc = decorated_between(k, static_cast<int>(y), x);
      if (!dc) {
        fail("comparable pair without a decorated configuration: " + k.describe(static_cast<int>(y)));
        continue;
      }
      const auto p = build_poset(*k.engine, *dc);
      if (p.empty) {
        fail("comparable pair with empty poset: " + k.describe(static_cast<int>(y)) + " -> " + k.describe(x));
        continue;
      }
      ++rep.posets_nonvacuous;
      if (!pi_surjectivity(*dc, p).ok()) {
        ++rep.surjectivity_failures;
        fail("projection misses a cube vertex: " + k.describe(static_cast<int>(y)) + " -> " + k.describe(x));
      }
      if (p.index == 3) {
        ++rep.boundary_graphs;
        try {
          auto bg = boundary_graph(*k.engine, p, opt.pairing, k.genus());
          for (int l : bg.cycle_lengths) ++rep.boundary_cycle_lengths[l];
          if (bg.dodecagon) ++rep.dodecagons;
          for (const auto& w : bg.warnings) {
            if (rep.warnings.size() < opt.max_reported) rep.warnings.push_back(w + " at " + k.describe(static_cast<int>(y)));
          }
          for (const auto& e : bg.errors) fail(e + " at " + k.describe(static_cast<int>(y)) + " -> " + k.describe(x));
        } catch (const std::exception& e) {
          fail(std::string("boundary graph: ") + e.what());
        }
      }
    }
  }
  return rep;
}

}  // namespace surfkh
