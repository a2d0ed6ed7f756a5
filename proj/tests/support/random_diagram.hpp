#pragma once

// Random diagrams that genuinely embed in the genus-g surface. A planar
// tangle is grown inside the 4g-gon net (boundary collapsed to one vertex so
// the picture is a map on the sphere), then the polygon sides are glued and
// each surface edge records the letters of the sides it exits through.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "surfkh/diagram.hpp"

namespace surfkh::testing {

struct RandomDiagramOptions {
  int genus = 2;
  int crossings = 3;
  int max_points_per_side = 2;  // boundary points on each side pair
  int max_holonomy = 4;         // reject diagrams with longer edge words
};

class PlanarMap {
 public:
  std::vector<int> vert, alpha, sigma;
  int vertices = 0;

  int add_half_edge(int v) {
    vert.push_back(v);
    alpha.push_back(-1);
    sigma.push_back(-1);
    return static_cast<int>(vert.size()) - 1;
  }
  int phi(int h) const { return sigma[alpha[h]]; }  // face on the right

  std::vector<std::vector<int>> faces() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(vert.size(), 0);
    for (std::size_t h = 0; h < vert.size(); ++h) {
      if (seen[h]) continue;
      std::vector<int> f;
      int x = static_cast<int>(h);
      while (!seen[x]) {
        seen[x] = 1;
        f.push_back(x);
        x = phi(x);
      }
      out.push_back(std::move(f));
    }
    return out;
  }
  int euler_characteristic() const {
    return vertices - static_cast<int>(vert.size()) / 2 + static_cast<int>(faces().size());
  }
};

namespace detail {

// Random noncrossing perfect matching of points lo..hi-1 (even count).
inline void random_noncrossing(int lo, int hi, std::mt19937_64& rng, std::vector<int>& mate) {
  if (lo >= hi) return;
  std::vector<int> options;
  for (int k = lo + 1; k < hi; k += 2) options.push_back(k);
  const int k = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  mate[lo] = k;
  mate[k] = lo;
  random_noncrossing(lo + 1, k, rng, mate);
  random_noncrossing(k + 1, hi, rng, mate);
}

// Letter read when leaving the polygon through side k = 4i + j.
inline Letter exit_letter(int side) {
  const int i = side / 4 + 1, j = side % 4;
  switch (j) {
    case 0: return gen_a(i);
    case 1: return -gen_b(i);
    case 2: return -gen_a(i);
    default: return gen_b(i);
  }
}

}  // namespace detail

inline std::optional<SurfaceLinkDiagram> try_random_diagram(const RandomDiagramOptions& opt, std::mt19937_64& rng) {
  const int g = opt.genus;
  const int sides = 4 * g;
  std::vector<int> per_side(static_cast<std::size_t>(std::max(sides, 0)), 0);
  std::uniform_int_distribution<int> pts(0, opt.max_points_per_side);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < 2; ++j) {
      const int m = pts(rng);
      per_side[4 * i + j] = m;
      per_side[4 * i + j + 2] = m;
    }
  }
  // boundary points in counterclockwise order around the polygon
  std::vector<int> side_of, index_on_side;
  std::vector<std::vector<int>> points_on_side(per_side.size());
  for (int k = 0; k < sides; ++k) {
    for (int j = 0; j < per_side[k]; ++j) {
      points_on_side[k].push_back(static_cast<int>(side_of.size()));
      side_of.push_back(k);
      index_on_side.push_back(j);
    }
  }
  if (g < 0) throw domain_error("genus must be nonnegative");
  // on the sphere the net is a single loop through two base vertices
  const int P = g == 0 ? 4 : static_cast<int>(side_of.size());
  if (P < 2) return std::nullopt;

  PlanarMap map;
  map.vertices = 1;  // collapsed boundary
  for (int p = 0; p < P; ++p) map.add_half_edge(0);
  for (int p = 0; p < P; ++p) map.sigma[p] = (p + P - 1) % P;
  std::vector<int> mate(P, -1);
  detail::random_noncrossing(0, P, rng, mate);
  if (g == 0) {
    map.vertices = 2;
    map.vert = {0, 1, 1, 0};
    mate = {1, 0, 3, 2};
    map.sigma = {3, 2, 1, 0};
  }
  for (int p = 0; p < P; ++p) map.alpha[p] = mate[p];

  std::vector<std::array<int, 4>> slots;  // crossing half-edges in slot order
  for (int c = 0; c < opt.crossings; ++c) {
    auto faces = map.faces();
    std::vector<std::size_t> eligible;
    auto edge_id = [&](int h) { return std::min(h, map.alpha[h]); };
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (int h : faces[f]) {
        if (edge_id(h) != edge_id(faces[f][0])) {
          eligible.push_back(f);
          break;
        }
      }
    }
    if (eligible.empty()) return std::nullopt;
    const auto& face = faces[eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)]];
    std::uniform_int_distribution<std::size_t> pick(0, face.size() - 1);
    int d1 = face[pick(rng)], d2 = face[pick(rng)];
    for (int tries = 0; edge_id(d1) == edge_id(d2) && tries < 64; ++tries) d2 = face[pick(rng)];
    if (edge_id(d1) == edge_id(d2)) return std::nullopt;

    const int X = map.vertices++;
    const int xu1 = map.add_half_edge(X), xw1 = map.add_half_edge(X);
    const int xu2 = map.add_half_edge(X), xw2 = map.add_half_edge(X);
    auto subdivide = [&](int d, int xu, int xw) {
      const int back = map.alpha[d];
      map.alpha[d] = xu;
      map.alpha[xu] = d;
      map.alpha[xw] = back;
      map.alpha[back] = xw;
    };
    subdivide(d1, xu1, xw1);
    subdivide(d2, xu2, xw2);
    const std::array<int, 4> ccw{xw1, xu1, xw2, xu2};
    for (int s = 0; s < 4; ++s) map.sigma[ccw[s]] = ccw[(s + 1) % 4];
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
      slots.push_back({xw1, xu1, xw2, xu2});
    } else {
      slots.push_back({xu1, xw2, xu2, xw1});
    }
    if (map.euler_characteristic() != 2) return std::nullopt;
  }

  // glue: partner of a boundary point
  auto partner = [&](int p) {
    if (g == 0) return 3 - p;
    const int k = side_of[p];
    const int pk = (k / 4) * 4 + (k % 4 + 2) % 4;
    const int m = per_side[k];
    return points_on_side[pk][m - 1 - index_on_side[p]];
  };

  std::vector<int> slot_crossing(map.vert.size(), -1), slot_index(map.vert.size(), -1);
  for (std::size_t c = 0; c < slots.size(); ++c) {
    for (int s = 0; s < 4; ++s) {
      slot_crossing[slots[c][s]] = static_cast<int>(c);
      slot_index[slots[c][s]] = s;
    }
  }

  SurfaceLinkDiagram d;
  d.genus = g;
  for (std::size_t c = 0; c < slots.size(); ++c) {
    Crossing x;
    x.id = "x" + std::to_string(c + 1);
    d.crossings.push_back(x);
  }
  std::vector<char> used(map.vert.size(), 0);
  auto walk = [&](int h, SurfaceWord& w) {
    // from half-edge h follow the strand until a crossing half-edge; returns it
    for (int guard = 0; guard < 10000; ++guard) {
      used[h] = 1;
      const int o = map.alpha[h];
      used[o] = 1;
      if (slot_crossing[o] >= 0) return o;
      if (g > 0) w.letters.push_back(detail::exit_letter(side_of[o]));
      h = partner(o);
      if (used[h]) return -2;
    }
    return -2;
  };
  for (std::size_t c = 0; c < slots.size(); ++c) {
    for (int s = 0; s < 4; ++s) {
      const int h = slots[c][s];
      if (used[h]) continue;
      SurfaceWord w{g, {}};
      const int end = walk(h, w);
      if (end < 0) return std::nullopt;
      Edge e;
      e.id = "e" + std::to_string(d.edges.size() + 1);
      e.from = {static_cast<int>(c), s};
      e.to = {slot_crossing[end], slot_index[end]};
      e.holonomy = free_reduce(w);
      d.edges.push_back(std::move(e));
    }
  }
  // strands meeting no crossing close up through the sides
  for (int p = 0; p < P; ++p) {
    if (used[p]) continue;
    SurfaceWord w{g, {}};
    int h = p;
    while (!used[h]) {
      used[h] = 1;
      const int o = map.alpha[h];
      if (slot_crossing[o] >= 0) return std::nullopt;
      used[o] = 1;
      if (g > 0) w.letters.push_back(detail::exit_letter(side_of[o]));
      h = partner(o);
    }
    Edge e;
    e.id = "e" + std::to_string(d.edges.size() + 1);
    e.closed = true;
    e.holonomy = free_reduce(w);
    d.edges.push_back(std::move(e));
  }
  for (const auto& e : d.edges) {
    if (static_cast<int>(e.holonomy.size()) > opt.max_holonomy) return std::nullopt;
  }
  d.index_slots();
  std::vector<std::tuple<int, int, int>> seeds;
  for (const auto& comp : d.components()) {
    seeds.emplace_back(comp.front(), std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1, 0);
  }
  d.finalize(seeds);
  return d;
}

// Retries until a diagram satisfying the options is produced.
inline SurfaceLinkDiagram random_diagram(const RandomDiagramOptions& opt, std::mt19937_64& rng) {
  for (;;) {
    if (auto d = try_random_diagram(opt, rng)) return *d;
  }
}

}  // namespace surfkh::testing
