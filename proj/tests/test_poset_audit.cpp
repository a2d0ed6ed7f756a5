#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "support/random_diagram.hpp"
#include "surfkh/poset_audit.hpp"

using namespace surfkh;
using surfkh::testing::load_fixture;
using surfkh::testing::load_manifest;

namespace {

std::vector<SurfaceLinkDiagram> random_suite(int count, std::uint64_t seed, int min_genus = 0, int max_n = 5) {
  std::mt19937_64 rng(seed);
  std::vector<SurfaceLinkDiagram> out;
  for (int i = 0; i < count; ++i) {
    surfkh::testing::RandomDiagramOptions opt;
    opt.genus = min_genus + i % (4 - min_genus);
    opt.crossings = 1 + i % max_n;
    out.push_back(surfkh::testing::random_diagram(opt, rng));
  }
  return out;
}

std::vector<bool> labels_of(std::uint64_t bits, std::size_t n) {
  std::vector<bool> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(((bits >> i) & 1U) == 0);
  return out;
}

struct BruteInterval {
  bool empty = true;
  std::map<int, int> per_rank;  // number of surgered arcs -> elements
  int cover_count = 0;
};

// Every labeled configuration obtained from D by surgering a subset of its arcs,
// ordered by single-arc covers, cut down to the interval between the two labelings.
BruteInterval brute_interval(const ResolutionEngine& eng, const DecoratedResolutionConfiguration& dc) {
  const auto& d = dc.config;
  std::vector<int> arcs;
  for (const auto& a : d.arcs) arcs.push_back(a.crossing);
  struct Node {
    State subset;
    LabeledResolutionConfiguration l;
  };
  std::vector<Node> nodes;
  const int k = static_cast<int>(arcs.size());
  for (int s = 0; s < (1 << k); ++s) {
    State mask = 0;
    for (int i = 0; i < k; ++i) {
      if ((s >> i) & 1) mask |= State{1} << arcs[i];
    }
    const auto cfg = eng.surger(d, mask);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << cfg.circles.size()); ++m) {
      nodes.push_back({mask, {cfg, labels_of(m, cfg.circles.size())}});
    }
  }
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<int>> up(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const State extra = nodes[b].subset & ~nodes[a].subset;
      if ((nodes[a].subset & ~nodes[b].subset) || popcount(extra) != 1) continue;
      if (covers(eng, nodes[a].l, nodes[b].l)) up[a].push_back(b);
    }
  }
  auto reach = [&](int from, bool forward) {
    std::vector<char> seen(n, 0);
    seen[from] = 1;
    for (bool changed = true; changed;) {
      changed = false;
      for (int a = 0; a < n; ++a) {
        for (int b : up[a]) {
          if (forward && seen[a] && !seen[b]) seen[b] = changed = 1;
          if (!forward && seen[b] && !seen[a]) seen[a] = changed = 1;
        }
      }
    }
    return seen;
  };
  int bottom = -1, top = -1;
  for (int a = 0; a < n; ++a) {
    if (nodes[a].subset == 0 && nodes[a].l.plus == dc.y) bottom = a;
    if (nodes[a].subset == d.arc_mask() && nodes[a].l.plus == dc.x) top = a;
  }
  BruteInterval out;
  const auto below = reach(top, false), above = reach(bottom, true);
  if (!below[bottom]) return out;
  out.empty = false;
  for (int a = 0; a < n; ++a) {
    if (!(below[a] && above[a])) continue;
    ++out.per_rank[popcount(nodes[a].subset)];
    for (int b : up[a]) out.cover_count += (below[b] && above[b]) ? 1 : 0;
  }
  return out;
}

std::map<int, int> per_rank(const IntervalPoset& p) {
  std::map<int, int> out;
  for (const auto& e : p.elements) ++out[popcount(e.surgered)];
  return out;
}

DecoratedResolutionConfiguration decorate(const ResolutionEngine& eng, const ResolutionConfiguration& d,
                                          std::uint64_t y, std::uint64_t x) {
  const auto top = eng.surger(d, d.arc_mask());
  return {d, labels_of(y, d.circles.size()), labels_of(x, top.circles.size())};
}

bool any_nonempty(const ResolutionEngine& eng, const ResolutionConfiguration& d) {
  const auto top = eng.surger(d, d.arc_mask());
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << d.circles.size()); ++y) {
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << top.circles.size()); ++x) {
      if (!build_poset(eng, decorate(eng, d, y, x)).empty) return true;
    }
  }
  return false;
}

// Generators z of the complex with lower <= z <= upper.
int complex_interval_size(const KhovanovComplex& k, int lower, int upper) {
  std::set<int> above{lower};
  std::vector<int> stack{lower};
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (const auto& e : k.delta[a]) {
      if (above.insert(e.target).second) stack.push_back(e.target);
    }
  }
  int count = 0;
  for (int z : above) {
    std::set<int> seen{z};
    std::vector<int> st{z};
    bool hit = false;
    while (!st.empty() && !hit) {
      const int a = st.back();
      st.pop_back();
      if (a == upper) hit = true;
      for (const auto& e : k.delta[a]) {
        if (seen.insert(e.target).second) st.push_back(e.target);
      }
    }
    count += hit ? 1 : 0;
  }
  return count;
}

struct Index3Case {
  nlohmann::json entry;
  SurfaceLinkDiagram diagram;
  KhovanovComplex complex;
  DecoratedResolutionConfiguration dc;
  IntervalPoset poset;
};

Index3Case index3_case(const nlohmann::json& entry) {
  Index3Case c{entry, load_fixture("index3/" + entry.at("file").get<std::string>()), {}, {}, {}};
  c.complex = build_complex(c.diagram);
  const int lo = surfkh::testing::find_generator(c.complex, entry.at("bottom"));
  const int hi = surfkh::testing::find_generator(c.complex, entry.at("top"));
  auto dc = decorated_between(c.complex, lo, hi);
  if (!dc) throw std::runtime_error("no decorated configuration for " + entry.at("file").get<std::string>());
  c.dc = *dc;
  c.poset = build_poset(*c.complex.engine, c.dc);
  return c;
}

}  // namespace

TEST(IntervalPoset, AgreesWithBruteForceOnRandomConfigurations) {
  std::mt19937_64 rng(51);
  int nonempty = 0, checked = 0;
  for (const auto& d : random_suite(60, 52)) {
    const ResolutionEngine eng(d);
    for (int trial = 0; trial < 6; ++trial) {
      const auto vertex = eng.resolve(rng() & eng.full_state());
      State arcs = 0;
      for (const auto& a : vertex.arcs) {
        if (rng() % 2 && popcount(arcs) < 3) arcs |= State{1} << a.crossing;
      }
      if (!arcs) continue;
      const auto sub = sub_configuration(vertex, arcs);
      const auto top = eng.surger(sub, sub.arc_mask());
      const auto dc = decorate(eng, sub, rng() % (1U << sub.circles.size()), rng() % (1U << top.circles.size()));
      const auto p = build_poset(eng, dc);
      const auto want = brute_interval(eng, dc);
      ++checked;
      ASSERT_EQ(p.empty, want.empty) << serialize_sld(d);
      if (p.empty) continue;
      ++nonempty;
      EXPECT_EQ(per_rank(p), want.per_rank);
      EXPECT_EQ(static_cast<int>(p.covers.size()), want.cover_count);
      EXPECT_EQ(p.elements[p.bottom].surgered, 0U);
      EXPECT_EQ(p.elements[p.top].surgered, sub.arc_mask());
    }
  }
  EXPECT_GT(checked, 150);
  EXPECT_GT(nonempty, 20);
}

TEST(IntervalPoset, MatchesIntervalsOfTheComplex) {
  for (const auto& d : random_suite(40, 53, 0, 4)) {
    const auto k = build_complex(d);
    for (int lo = 0; lo < static_cast<int>(k.generators.size()); ++lo) {
      for (int hi = 0; hi < static_cast<int>(k.generators.size()); ++hi) {
        const int gap = k.generators[hi].gr_h - k.generators[lo].gr_h;
        if (gap < 1 || gap > 3) continue;
        const int size = complex_interval_size(k, lo, hi);
        if (size == 0) continue;
        const auto dc = decorated_between(k, lo, hi);
        ASSERT_TRUE(dc.has_value());
        const auto p = build_poset(*k.engine, *dc);
        EXPECT_FALSE(p.empty);
        EXPECT_EQ(static_cast<int>(p.elements.size()), size) << k.describe(lo) << " -> " << k.describe(hi);
        EXPECT_EQ(p.index, gap);
      }
    }
  }
}

TEST(IntervalPoset, GradingsAreConstant) {
  for (const auto& d : random_suite(40, 54, 1)) {
    const ResolutionEngine eng(d);
    const auto k = build_complex(d);
    for (std::size_t g = 0; g < k.generators.size(); g += 3) {
      for (const auto& e : k.delta[g]) {
        for (const auto& f : k.delta[e.target]) {
          const auto dc = decorated_between(k, static_cast<int>(g), f.target);
          ASSERT_TRUE(dc.has_value());
          const auto p = build_poset(eng, *dc);
          std::set<std::pair<int, std::string>> gradings;
          for (const auto& el : p.elements) {
            int q = popcount(el.surgered);
            HGradingElement h(d.genus);
            for (std::size_t i = 0; i < el.element.plus.size(); ++i) {
              const int s = el.element.plus[i] ? 1 : -1;
              q += s;
              h += HGradingElement::of(el.element.config.circles[i].cls, s);
            }
            gradings.emplace(q, h.to_string());
          }
          EXPECT_EQ(gradings.size(), 1U);
        }
      }
    }
  }
}

TEST(IntervalPoset, RejectsMismatchedLabelings) {
  const auto d = load_fixture("u_case3.sld");
  const ResolutionEngine eng(d);
  const auto c = eng.resolve(0);
  EXPECT_THROW(build_poset(eng, DecoratedResolutionConfiguration{c, {true, true}, {true, true}}), domain_error);
  EXPECT_THROW(build_poset(eng, DecoratedResolutionConfiguration{c, {true}, {true}}), domain_error);
  const IntervalPoset empty;
  EXPECT_THROW(pi_surjectivity(DecoratedResolutionConfiguration{c, {true}, {true, true}}, empty), domain_error);
}

TEST(IntervalPoset, SingleCycleArcGivesEmptyPoset) {
  const auto d = load_fixture("link3.sld");
  const ResolutionEngine eng(d);
  int scs_found = 0;
  for (State v = 0; v <= eng.full_state(); ++v) {
    const auto cfg = eng.resolve(v);
    for (const auto& a : cfg.arcs) {
      if (eng.classify_arc(cfg, a.crossing) != ArcKind::scs) continue;
      ++scs_found;
      EXPECT_FALSE(any_nonempty(eng, sub_configuration(cfg, State{1} << a.crossing)));
    }
  }
  EXPECT_EQ(scs_found, 6);
}

TEST(Index2Fixtures, NonemptinessMatchesRecord) {
  const auto manifest = load_manifest("index2/manifest.json");
  ASSERT_EQ(manifest.size(), 8U);
  for (const auto& entry : manifest) {
    const auto name = entry.at("file").get<std::string>();
    const auto d = load_fixture("index2/" + name);
    EXPECT_EQ(d.genus, entry.at("genus").get<int>()) << name;
    const ResolutionEngine eng(d);
    const auto sub = core(surfkh::testing::recorded_sub_configuration(eng, entry));
    ASSERT_EQ(sub.index(), 2) << name;
    EXPECT_EQ(to_string(classify_index2(sub)), entry.at("kind").get<std::string>()) << name;
    ASSERT_EQ(sub.circles.size(), 1U) << name;
    EXPECT_EQ(sub.circles[0].is_contractible(), entry.at("contractible").get<bool>()) << name;
    EXPECT_EQ(any_nonempty(eng, sub), entry.at("expected_nonempty").get<bool>()) << name;
  }
}

TEST(Index2Fixtures, PlanarLadybugHasFourMiddles) {
  const auto manifest = load_manifest("index2/manifest.json");
  const auto d = load_fixture("index2/planar_ladybug.sld");
  const ResolutionEngine eng(d);
  const auto sub = core(surfkh::testing::recorded_sub_configuration(eng, manifest.at(0)));
  // bottom x+, top x-
  const auto dc = decorate(eng, sub, 0, ~std::uint64_t{0} >> 32);
  const auto p = build_poset(eng, dc);
  ASSERT_FALSE(p.empty);
  EXPECT_EQ(per_rank(p), (std::map<int, int>{{0, 1}, {1, 4}, {2, 1}}));
  EXPECT_EQ(p.covers.size(), 8U);
  const auto s = pi_surjectivity(dc, p);
  EXPECT_EQ(s.vertices_expected, 4);
  EXPECT_EQ(s.vertices_hit, 4);
  EXPECT_THROW(boundary_graph(eng, p), domain_error);
}

TEST(Index3Fixtures, BoundaryGraphsUnderBothPairings) {
  const auto manifest = load_manifest("index3/manifest.json");
  ASSERT_EQ(manifest.size(), 21U);
  int genus_two = 0;
  for (const auto& entry : manifest) {
    const auto c = index3_case(entry);
    const auto name = entry.at("file").get<std::string>();
    ASSERT_FALSE(c.poset.empty) << name;
    ASSERT_EQ(c.poset.index, 3) << name;
    EXPECT_TRUE(is_basic(c.dc.config)) << name;
    const auto s = pi_surjectivity(c.dc, c.poset);
    EXPECT_TRUE(s.ok()) << name;
    EXPECT_EQ(s.vertices_hit, 8) << name;
    const auto expected = entry.at("expected").get<std::string>();
    for (Pairing pairing : {Pairing::right, Pairing::left}) {
      const auto bg = boundary_graph(*c.complex.engine, c.poset, pairing);
      const std::string where = name + " " + to_string(pairing);
      EXPECT_TRUE(bg.all_cycles) << where;
      EXPECT_EQ(std::accumulate(bg.cycle_lengths.begin(), bg.cycle_lengths.end(), 0), bg.chains) << where;
      EXPECT_EQ(bg.ladybug_faces > 0, entry.at("ladybug_bearing").get<bool>()) << where;
      if (expected == "one_hexagon") {
        EXPECT_EQ(bg.cycle_lengths, (std::vector<int>{6})) << where;
      } else if (expected == "two_hexagons") {
        EXPECT_EQ(bg.cycle_lengths, (std::vector<int>{6, 6})) << where;
      }
      if (expected != "dodecagon") {
        EXPECT_TRUE(bg.ok()) << where;
        EXPECT_TRUE(bg.warnings.empty()) << where;
        EXPECT_FALSE(bg.quasi_ladybug) << where;
      } else {
        EXPECT_EQ(c.diagram.genus, 1) << where;
        EXPECT_TRUE(bg.quasi_ladybug) << where;
        EXPECT_TRUE(bg.ok()) << where;
      }
    }
    if (expected == "dodecagon") {
      const auto bg = boundary_graph(*c.complex.engine, c.poset, Pairing::right);
      EXPECT_EQ(bg.cycle_lengths, (std::vector<int>{12})) << name;
      EXPECT_TRUE(bg.dodecagon) << name;
      ASSERT_EQ(bg.warnings.size(), 1U) << name;
      EXPECT_NE(bg.warnings[0].find("dodecagon"), std::string::npos);
    } else {
      ++genus_two;
      EXPECT_EQ(c.diagram.genus, 2) << name;
      for (const auto& circle : c.dc.config.circles) EXPECT_TRUE(circle.is_contractible()) << name;
    }
  }
  EXPECT_EQ(genus_two, 19);
}

TEST(Index3Fixtures, ChainCountMatchesPoset) {
  // maximal chains counted directly from the rank function
  const auto manifest = load_manifest("index3/manifest.json");
  for (const auto& entry : manifest) {
    const auto c = index3_case(entry);
    int chains = 0;
    for (int a : c.poset.ups(c.poset.bottom)) {
      for (int b : c.poset.ups(a)) {
        for (int t : c.poset.ups(b)) chains += t == c.poset.top ? 1 : 0;
      }
    }
    EXPECT_EQ(boundary_graph(*c.complex.engine, c.poset).chains, chains);
    const auto want = brute_interval(*c.complex.engine, c.dc);
    EXPECT_EQ(per_rank(c.poset), want.per_rank) << entry.at("file");
  }
}

TEST(Census, OneCrossingAndGenusTwoLink) {
  for (const char* f : {"u_case3.sld", "link3.sld"}) {
    const auto r = interval_census(build_complex(load_fixture(f)));
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.histogram.empty()) << f;
  }
}

TEST(Census, MatchesDirectCount) {
  for (const auto& d : random_suite(60, 55, 0, 6)) {
    const auto k = build_complex(d);
    const auto r = interval_census(k);
    EXPECT_TRUE(r.ok()) << serialize_sld(d) << (r.violations.empty() ? "" : r.violations[0]);
    std::map<int, long> want;
    for (int lo = 0; lo < static_cast<int>(k.generators.size()); ++lo) {
      std::map<int, int> mids;
      for (int m : k.covers_of(lo)) {
        for (int hi : k.covers_of(m)) ++mids[hi];
      }
      for (const auto& [hi, count] : mids) ++want[count];
    }
    EXPECT_EQ(r.histogram, want);
    for (const auto& [size, n] : r.histogram) EXPECT_TRUE(size == 2 || size == 4) << size;
  }
}

TEST(ScsFreeness, GenusTwoComplexes) {
  const auto link = scs_freeness(build_complex(load_fixture("link3.sld")));
  EXPECT_TRUE(link.ok());
  EXPECT_EQ(link.arcs_checked, 0);
  long checked = 0;
  for (const auto& d : random_suite(30, 56, 2, 6)) {
    const auto r = scs_freeness(build_complex(d));
    EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations[0]);
    checked += r.arcs_checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Audit, RandomComplexesPass) {
  for (const auto& d : random_suite(30, 57, 0, 5)) {
    const auto k = build_complex(d);
    for (Pairing pairing : {Pairing::right, Pairing::left}) {
      AuditOptions opt;
      opt.pairing = pairing;
      const auto r = audit_complex(k, opt);
      EXPECT_TRUE(r.ok()) << serialize_sld(d) << (r.failures.empty() ? "" : r.failures[0]);
      EXPECT_EQ(r.posets_checked, r.posets_nonvacuous);
      EXPECT_EQ(r.surjectivity_failures, 0);
      if (d.genus != 1) {
        EXPECT_EQ(r.dodecagons, 0);
      }
    }
  }
}

TEST(Audit, TorusQuasiLadybugComplexWarns) {
  const auto k = build_complex(load_fixture("index3/torus_012_021.sld"));
  const auto r = audit_complex(k);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures[0]);
  EXPECT_GT(r.dodecagons, 0);
  EXPECT_FALSE(r.warnings.empty());
}
