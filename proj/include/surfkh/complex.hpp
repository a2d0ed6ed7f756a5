#pragma once

// The homotopical Khovanov complex: labeled resolutions of every cube vertex,
// the partial order generated by admissible single-arc surgeries, the signed
// differential and its integral homology split by (quantum, homotopical)
// grading.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "surfkh/errors.hpp"
#include "surfkh/resolution.hpp"
#include "surfkh/snf.hpp"
#include "surfkh/surface_group.hpp"

namespace surfkh {

// c/n status and label of one circle: 0 = c+, 1 = c-, 2 = n+, 3 = n-.
inline int circle_token(bool contractible, bool plus) { return (contractible ? 0 : 2) + (plus ? 0 : 1); }

// Whether replacing the circles with tokens `before` by circles with tokens
// `after` is one of the admissible splits or merges.
inline bool table_allows(std::vector<int> before, std::vector<int> after) {
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  using V = std::vector<int>;
  static const std::vector<std::pair<V, V>> rows = {
      // one circle splits
      {{0}, {0, 1}},
      {{1}, {1, 1}},
      {{2}, {1, 2}},
      {{3}, {1, 3}},
      {{0}, {2, 3}},
      // two circles merge
      {{0, 1}, {1}},
      {{0, 0}, {0}},
      {{0, 2}, {2}},
      {{0, 3}, {3}},
      {{2, 3}, {1}},
  };
  for (const auto& [b, a] : rows) {
    if (b == before && a == after) return true;
  }
  return false;
}

namespace detail {

inline std::vector<int> tokens_of(const std::vector<const Circle*>& cs, const std::vector<bool>& plus) {
  std::vector<int> t;
  for (std::size_t i = 0; i < cs.size(); ++i) t.push_back(circle_token(cs[i]->is_contractible(), plus[i]));
  return t;
}

}  // namespace detail

// (E, e) covers-below (D, d): D is E surgered along one arc, the labels agree
// on the common circles, and the changed circles match a table row.
inline bool covers(const ResolutionEngine& eng, const LabeledResolutionConfiguration& e,
                   const LabeledResolutionConfiguration& d) {
  const auto diff = e.config.arc_mask() & ~d.config.arc_mask();
  if (popcount(diff) != 1 || (d.config.arc_mask() & ~e.config.arc_mask()) != 0) return false;
  const int x = __builtin_ctzll(diff);
  if (!eng.surger_arc(e.config, x).same_as(d.config)) return false;
  std::vector<const Circle*> before, after;
  std::vector<bool> lb, la;
  for (std::size_t i = 0; i < e.config.circles.size(); ++i) {
    const int j = d.config.find_circle(e.config.circles[i]);
    if (j >= 0) {
      if (e.plus[i] != d.plus[j]) return false;
    } else {
      before.push_back(&e.config.circles[i]);
      lb.push_back(e.plus[i]);
    }
  }
  for (std::size_t j = 0; j < d.config.circles.size(); ++j) {
    if (e.config.find_circle(d.config.circles[j]) < 0) {
      after.push_back(&d.config.circles[j]);
      la.push_back(d.plus[j]);
    }
  }
  return table_allows(detail::tokens_of(before, lb), detail::tokens_of(after, la));
}

// Sign exponent for the cube edge v -> v + e_i: number of 1s of v before i.
inline int sign_exponent(State v, int i) { return popcount(v & ((State{1} << i) - 1)); }

struct Grading {
  int h = 0;
  int q = 0;
  HGradingElement H;

  friend bool operator==(const Grading& a, const Grading& b) { return a.h == b.h && a.q == b.q && a.H == b.H; }
};

struct Generator {
  State state = 0;
  std::uint64_t minus = 0;  // bit k set: circle k of the vertex labeled x-
  int gr_h = 0;
  int gr_q = 0;
  HGradingElement gr_H;
};

struct DifferentialEntry {
  int target = 0;
  int coefficient = 0;
};

inline constexpr std::size_t default_generator_limit = std::size_t{1} << 22;

class KhovanovComplex {
 public:
  std::shared_ptr<const ResolutionEngine> engine;
  std::vector<ResolutionConfiguration> vertices;  // indexed by state
  std::vector<std::size_t> first_generator;       // per state
  std::vector<Generator> generators;
  std::vector<std::vector<DifferentialEntry>> delta;  // delta[j] = sum coefficient * target

  const SurfaceLinkDiagram& diagram() const { return engine->diagram(); }
  int genus() const { return engine->genus(); }

  int generator_index(State v, std::uint64_t minus) const {
    return static_cast<int>(first_generator[v] + minus);
  }

  LabeledResolutionConfiguration labeled(int g) const {
    const Generator& gen = generators[g];
    LabeledResolutionConfiguration l{vertices[gen.state], {}};
    for (std::size_t k = 0; k < l.config.circles.size(); ++k) l.plus.push_back(((gen.minus >> k) & 1U) == 0);
    return l;
  }

  int coefficient(int from, int to) const {
    for (const auto& e : delta[from]) {
      if (e.target == to) return e.coefficient;
    }
    return 0;
  }

  // Generators covering g (one step up in the order).
  std::vector<int> covers_of(int g) const {
    std::vector<int> out;
    for (const auto& e : delta[g]) out.push_back(e.target);
    return out;
  }

  std::string describe(int g) const {
    const Generator& gen = generators[g];
    std::ostringstream s;
    s << "v=";
    for (int i = 0; i < engine->crossing_count(); ++i) s << state_bit(gen.state, i);
    s << " labels=";
    const auto& cs = vertices[gen.state].circles;
    for (std::size_t k = 0; k < cs.size(); ++k) s << (((gen.minus >> k) & 1U) ? '-' : '+');
    return s.str();
  }
};

namespace detail {

inline Grading grading_of(const ResolutionConfiguration& c, std::uint64_t minus, const Counts& counts, int genus) {
  Grading g;
  g.H = HGradingElement(genus);
  const int v = popcount(c.state);
  g.h = -counts.n_minus + v;
  int sum = 0;
  for (std::size_t k = 0; k < c.circles.size(); ++k) {
    const bool plus = ((minus >> k) & 1U) == 0;
    sum += plus ? 1 : -1;
    if (genus > 0) g.H.add_term(c.circles[k].cls, plus ? 1 : -1);
  }
  g.q = counts.n_plus - 2 * counts.n_minus + v + sum;
  return g;
}

}  // namespace detail

inline Grading grading_of(const KhovanovComplex& k, int g) {
  return {k.generators[g].gr_h, k.generators[g].gr_q, k.generators[g].gr_H};
}

inline KhovanovComplex build_complex(std::shared_ptr<const ResolutionEngine> eng,
                                     std::size_t generator_limit = default_generator_limit) {
  KhovanovComplex k;
  k.engine = eng;
  const int n = eng->crossing_count();
  if (n > 24) throw unsupported_error("cube too large: " + std::to_string(n) + " crossings");
  const State N = State{1} << n;
  const Counts counts = eng->diagram().counts();
  const int genus = eng->genus();
  k.vertices.reserve(N);
  k.first_generator.reserve(N);
  std::size_t total = 0;
  for (State v = 0; v < N; ++v) {
    k.vertices.push_back(eng->resolve(v));
    const std::size_t c = k.vertices.back().circles.size();
    if (c > 40) throw unsupported_error("too many circles in one resolution");
    k.first_generator.push_back(total);
    total += std::size_t{1} << c;
    if (total > generator_limit) {
      throw unsupported_error("complex exceeds " + std::to_string(generator_limit) + " generators");
    }
  }
  k.generators.resize(total);
  k.delta.resize(total);
  for (State v = 0; v < N; ++v) {
    const auto& c = k.vertices[v];
    const std::uint64_t L = std::uint64_t{1} << c.circles.size();
    for (std::uint64_t m = 0; m < L; ++m) {
      auto gr = detail::grading_of(c, m, counts, genus);
      Generator& g = k.generators[k.first_generator[v] + m];
      g.state = v;
      g.minus = m;
      g.gr_h = gr.h;
      g.gr_q = gr.q;
      g.gr_H = std::move(gr.H);
    }
  }

  for (State v = 0; v < N; ++v) {
    const auto& cv = k.vertices[v];
    for (int i = 0; i < n; ++i) {
      if (state_bit(v, i)) continue;
      const State u = v | (State{1} << i);
      const auto& cu = k.vertices[u];
      std::vector<std::pair<int, int>> kept;  // (bit in v, bit in u)
      std::vector<int> old_changed, new_changed;
      for (std::size_t a = 0; a < cv.circles.size(); ++a) {
        const int b = cu.find_circle(cv.circles[a]);
        if (b >= 0) {
          kept.emplace_back(static_cast<int>(a), b);
        } else {
          old_changed.push_back(static_cast<int>(a));
        }
      }
      for (std::size_t b = 0; b < cu.circles.size(); ++b) {
        if (cv.find_circle(cu.circles[b]) < 0) new_changed.push_back(static_cast<int>(b));
      }
      const int coef = (sign_exponent(v, i) % 2 == 0) ? 1 : -1;
      const std::uint64_t L = std::uint64_t{1} << cv.circles.size();
      const int nnew = static_cast<int>(new_changed.size());
      for (std::uint64_t m = 0; m < L; ++m) {
        std::vector<int> before;
        for (int a : old_changed) before.push_back(circle_token(cv.circles[a].is_contractible(), ((m >> a) & 1U) == 0));
        std::uint64_t base = 0;
        for (const auto& [a, b] : kept) {
          if ((m >> a) & 1U) base |= std::uint64_t{1} << b;
        }
        for (int t = 0; t < (1 << nnew); ++t) {
          std::vector<int> after;
          std::uint64_t target = base;
          for (int s = 0; s < nnew; ++s) {
            const bool plus = ((t >> s) & 1) == 0;
            after.push_back(circle_token(cu.circles[new_changed[s]].is_contractible(), plus));
            if (!plus) target |= std::uint64_t{1} << new_changed[s];
          }
          if (!table_allows(before, after)) continue;
          const int from = k.generator_index(v, m);
          const int to = k.generator_index(u, target);
          const Generator& gf = k.generators[from];
          const Generator& gt = k.generators[to];
          if (gf.gr_q != gt.gr_q || !(gf.gr_H == gt.gr_H) || gt.gr_h != gf.gr_h + 1) {
            throw invariant_error("differential breaks grading between " + k.describe(from) + " and " +
                                  k.describe(to));
          }
          if (cv.circles.size() == cu.circles.size()) {
            throw invariant_error("single cycle surgery carries a nonzero coefficient at " + k.describe(from));
          }
          k.delta[from].push_back({to, coef});
        }
      }
    }
  }
  for (auto& row : k.delta) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.target < b.target; });
  }
  return k;
}

inline KhovanovComplex build_complex(const SurfaceLinkDiagram& d, std::size_t generator_limit = default_generator_limit) {
  return build_complex(std::make_shared<const ResolutionEngine>(d), generator_limit);
}

struct DSquaredReport {
  bool ok = true;
  // offending (source, target, value of the square)
  std::vector<std::tuple<int, int, long long>> failures;
  std::vector<std::string> details;
};

inline DSquaredReport verify_d_squared(const KhovanovComplex& k, std::size_t max_reported = 5) {
  DSquaredReport rep;
  for (std::size_t j = 0; j < k.delta.size(); ++j) {
    std::map<int, long long> acc;
    for (const auto& e1 : k.delta[j]) {
      for (const auto& e2 : k.delta[e1.target]) acc[e2.target] += static_cast<long long>(e1.coefficient) * e2.coefficient;
    }
    for (const auto& [t, val] : acc) {
      if (val == 0) continue;
      rep.ok = false;
      if (rep.failures.size() < max_reported) {
        rep.failures.emplace_back(static_cast<int>(j), t, val);
        std::ostringstream s;
        s << "d^2 = " << val << " from " << k.describe(static_cast<int>(j)) << " to " << k.describe(t)
          << "; interval:";
        for (const auto& e1 : k.delta[j]) {
          if (k.coefficient(e1.target, t) != 0) s << " [" << k.describe(e1.target) << "]";
        }
        rep.details.push_back(s.str());
      }
    }
  }
  return rep;
}

struct BlockKey {
  int q = 0;
  HGradingElement H;
  friend bool operator<(const BlockKey& a, const BlockKey& b) {
    if (a.q != b.q) return a.q < b.q;
    return a.H < b.H;
  }
  friend bool operator==(const BlockKey& a, const BlockKey& b) { return a.q == b.q && a.H == b.H; }
};

struct HomologyKey {
  int h = 0;
  int q = 0;
  HGradingElement H;
  friend bool operator<(const HomologyKey& a, const HomologyKey& b) {
    if (a.h != b.h) return a.h < b.h;
    if (a.q != b.q) return a.q < b.q;
    return a.H < b.H;
  }
  friend bool operator==(const HomologyKey& a, const HomologyKey& b) {
    return a.h == b.h && a.q == b.q && a.H == b.H;
  }
};

struct HomologyGroup {
  int free_rank = 0;
  std::vector<BigInt> torsion;
  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

// Only nonzero groups are stored.
using HomologyResult = std::map<HomologyKey, HomologyGroup>;

// Generators grouped by (gr_q, gr_H) and then gr_h.
inline std::map<BlockKey, std::map<int, std::vector<int>>> grading_blocks(const KhovanovComplex& k) {
  std::map<BlockKey, std::map<int, std::vector<int>>> blocks;
  for (std::size_t g = 0; g < k.generators.size(); ++g) {
    const auto& gen = k.generators[g];
    blocks[BlockKey{gen.gr_q, gen.gr_H}][gen.gr_h].push_back(static_cast<int>(g));
  }
  return blocks;
}

inline HomologyResult homology(const KhovanovComplex& k) {
  HomologyResult result;
  for (const auto& [key, by_h] : grading_blocks(k)) {
    std::map<int, SmithResult> snf;  // d^h : C^h -> C^{h+1}
    for (const auto& [h, gens] : by_h) {
      auto next = by_h.find(h + 1);
      if (next == by_h.end()) continue;
      std::map<int, int> row_of;
      for (std::size_t r = 0; r < next->second.size(); ++r) row_of[next->second[r]] = static_cast<int>(r);
      SparseIntMatrix m;
      m.rows = static_cast<int>(next->second.size());
      m.cols = static_cast<int>(gens.size());
      for (std::size_t c = 0; c < gens.size(); ++c) {
        for (const auto& e : k.delta[gens[c]]) {
          auto it = row_of.find(e.target);
          if (it == row_of.end()) throw invariant_error("differential leaves its grading block");
          m.entries.emplace_back(it->second, static_cast<int>(c), e.coefficient);
        }
      }
      snf.emplace(h, smith_normal_form(m));
    }
    for (const auto& [h, gens] : by_h) {
      HomologyGroup grp;
      const int out_rank = snf.count(h) ? snf.at(h).rank : 0;
      const int in_rank = snf.count(h - 1) ? snf.at(h - 1).rank : 0;
      grp.free_rank = static_cast<int>(gens.size()) - out_rank - in_rank;
      if (snf.count(h - 1)) grp.torsion = snf.at(h - 1).torsion();
      if (grp.free_rank < 0) throw invariant_error("negative free rank: differential does not square to zero");
      if (grp.free_rank > 0 || !grp.torsion.empty()) result.emplace(HomologyKey{h, key.q, key.H}, std::move(grp));
    }
  }
  return result;
}

inline std::map<BlockKey, long> euler_characteristic(const KhovanovComplex& k) {
  std::map<BlockKey, long> chi;
  for (const auto& gen : k.generators) {
    chi[BlockKey{gen.gr_q, gen.gr_H}] += (gen.gr_h % 2 == 0) ? 1 : -1;
  }
  return chi;
}

inline std::map<BlockKey, long> euler_characteristic(const HomologyResult& h) {
  std::map<BlockKey, long> chi;
  for (const auto& [key, grp] : h) chi[BlockKey{key.q, key.H}] += (key.h % 2 == 0 ? 1 : -1) * grp.free_rank;
  for (auto it = chi.begin(); it != chi.end();) it = it->second == 0 ? chi.erase(it) : std::next(it);
  return chi;
}

// Free ranks summed per homological degree.
inline std::map<int, int> ranks_by_degree(const HomologyResult& h) {
  std::map<int, int> out;
  for (const auto& [key, grp] : h) {
    if (grp.free_rank) out[key.h] += grp.free_rank;
  }
  return out;
}

inline std::string format_key(const HomologyKey& k) {
  return "(" + std::to_string(k.h) + ", " + std::to_string(k.q) + ", " + k.H.to_string() + ")";
}

}  // namespace surfkh
