#pragma once

// Structured and plain-text reports for diagrams, resolutions, complexes,
// homology and audits. Structured output is deterministic: keys are emitted
// in a fixed order and nothing depends on timing.

#include <sstream>
#include <string>

#include <json.hpp>

#include "surfkh/complex.hpp"
#include "surfkh/diagram.hpp"
#include "surfkh/poset_audit.hpp"
#include "surfkh/resolution.hpp"

namespace surfkh {

inline constexpr int report_format_version = 1;

using ojson = nlohmann::ordered_json;

inline std::string format_state(State v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += static_cast<char>('0' + state_bit(v, i));
  return s;
}

inline State parse_state(const std::string& bits, int n) {
  if (static_cast<int>(bits.size()) != n) {
    throw domain_error("resolution vector has " + std::to_string(bits.size()) + " entries, expected " +
                       std::to_string(n));
  }
  State v = 0;
  for (int i = 0; i < n; ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw domain_error("resolution vector entries must be 0 or 1");
    if (bits[i] == '1') v |= State{1} << i;
  }
  return v;
}

inline ojson envelope(const std::string& command) {
  ojson j;
  j["format_version"] = report_format_version;
  j["command"] = command;
  return j;
}

// ------------------------------------------------------------- diagram

inline ojson diagram_summary_json(const SurfaceLinkDiagram& d) {
  const auto c = d.counts();
  ojson j;
  j["genus"] = d.genus;
  j["crossings"] = c.n;
  j["edges"] = d.edges.size();
  j["components"] = d.components().size();
  j["n_plus"] = c.n_plus;
  j["n_minus"] = c.n_minus;
  return j;
}

// ---------------------------------------------------------- resolution

inline ojson circle_json(const SurfaceLinkDiagram& d, const Circle& c) {
  ojson j;
  ojson edges = ojson::array();
  for (int e : c.edges) edges.push_back(d.edges[e].id);
  j["edges"] = edges;
  j["word"] = format_word(c.word);
  j["class"] = format_class(c.cls);
  j["contractible"] = c.is_contractible();
  if (c.cls.inconclusive) j["inconclusive"] = true;
  return j;
}

inline ojson configuration_json(const ResolutionEngine& eng, const ResolutionConfiguration& c) {
  const auto& d = eng.diagram();
  ojson j;
  j["state"] = format_state(c.state, eng.crossing_count());
  ojson circles = ojson::array();
  for (const auto& circ : c.circles) circles.push_back(circle_json(d, circ));
  j["circles"] = circles;
  ojson arcs = ojson::array();
  for (const auto& a : c.arcs) {
    ojson aj;
    aj["crossing"] = d.crossings[a.crossing].id;
    aj["kind"] = to_string(eng.classify_arc(c, a.crossing));
    aj["circles"] = {a.ends[0].circle, a.ends[1].circle};
    aj["sides"] = {to_string(a.ends[0].side), to_string(a.ends[1].side)};
    arcs.push_back(aj);
  }
  j["arcs"] = arcs;
  return j;
}

inline std::string configuration_text(const ResolutionEngine& eng, const ResolutionConfiguration& c) {
  const auto& d = eng.diagram();
  std::ostringstream s;
  s << "state " << format_state(c.state, eng.crossing_count()) << ": " << c.circles.size() << " circle"
    << (c.circles.size() == 1 ? "" : "s") << ", " << c.arcs.size() << " arc" << (c.arcs.size() == 1 ? "" : "s")
    << "\n";
  for (std::size_t i = 0; i < c.circles.size(); ++i) {
    const auto& circ = c.circles[i];
    s << "  circle " << i << " " << format_class(circ.cls) << (circ.is_contractible() ? " contractible" : "")
      << " edges";
    for (int e : circ.edges) s << " " << d.edges[e].id;
    s << "\n";
  }
  for (const auto& a : c.arcs) {
    s << "  arc at " << d.crossings[a.crossing].id << " " << to_string(eng.classify_arc(c, a.crossing)) << " circles "
      << a.ends[0].circle << "," << a.ends[1].circle << "\n";
  }
  return s.str();
}

// ------------------------------------------------------------- complex

inline ojson generator_json(const KhovanovComplex& k, int g) {
  const auto& gen = k.generators[g];
  ojson j;
  j["index"] = g;
  j["state"] = format_state(gen.state, k.engine->crossing_count());
  std::string labels;
  for (std::size_t c = 0; c < k.vertices[gen.state].circles.size(); ++c) labels += ((gen.minus >> c) & 1U) ? '-' : '+';
  j["labels"] = labels;
  j["gr_h"] = gen.gr_h;
  j["gr_q"] = gen.gr_q;
  j["gr_H"] = gen.gr_H.to_string();
  return j;
}

inline ojson complex_json(const KhovanovComplex& k, bool with_entries) {
  ojson j;
  j["generators"] = k.generators.size();
  std::size_t nnz = 0;
  for (const auto& row : k.delta) nnz += row.size();
  j["differential_entries"] = nnz;
  const auto d2 = verify_d_squared(k);
  j["d_squared_zero"] = d2.ok;
  if (!d2.ok) j["d_squared_failures"] = d2.details;
  j["grading_blocks"] = grading_blocks(k).size();
  if (with_entries) {
    ojson gens = ojson::array();
    for (std::size_t g = 0; g < k.generators.size(); ++g) gens.push_back(generator_json(k, static_cast<int>(g)));
    j["generator_list"] = gens;
    ojson entries = ojson::array();
    for (std::size_t g = 0; g < k.delta.size(); ++g) {
      for (const auto& e : k.delta[g]) entries.push_back({g, e.target, e.coefficient});
    }
    j["differential"] = entries;
  }
  return j;
}

inline std::string complex_text(const KhovanovComplex& k, bool verbose) {
  std::ostringstream s;
  std::size_t nnz = 0;
  for (const auto& row : k.delta) nnz += row.size();
  const auto d2 = verify_d_squared(k);
  s << "generators: " << k.generators.size() << "\n";
  s << "differential entries: " << nnz << "\n";
  s << "grading blocks: " << grading_blocks(k).size() << "\n";
  s << "d^2 = 0: " << (d2.ok ? "yes" : "NO") << "\n";
  for (const auto& line : d2.details) s << "  " << line << "\n";
  if (verbose) {
    for (std::size_t g = 0; g < k.generators.size(); ++g) {
      const auto& gen = k.generators[g];
      s << "  [" << g << "] " << k.describe(static_cast<int>(g)) << " h=" << gen.gr_h << " q=" << gen.gr_q
        << " H=" << gen.gr_H.to_string();
      for (const auto& e : k.delta[g]) s << " " << (e.coefficient > 0 ? "+" : "-") << "[" << e.target << "]";
      s << "\n";
    }
  }
  return s.str();
}

// ------------------------------------------------------------ homology

inline ojson homology_json(const HomologyResult& h) {
  ojson j;
  ojson groups = ojson::array();
  for (const auto& [key, grp] : h) {
    ojson g;
    g["h"] = key.h;
    g["q"] = key.q;
    g["H"] = key.H.to_string();
    g["free_rank"] = grp.free_rank;
    ojson tors = ojson::array();
    for (const auto& t : grp.torsion) tors.push_back(t.str());
    g["torsion"] = tors;
    groups.push_back(g);
  }
  j["groups"] = groups;
  ojson ranks = ojson::object();
  for (const auto& [deg, r] : ranks_by_degree(h)) ranks[std::to_string(deg)] = r;
  j["ranks_by_degree"] = ranks;
  return j;
}

inline std::string homology_text(const HomologyResult& h) {
  std::ostringstream s;
  if (h.empty()) s << "homology vanishes\n";
  for (const auto& [key, grp] : h) {
    s << format_key(key) << ": ";
    bool first = true;
    if (grp.free_rank > 0) {
      s << "Z";
      if (grp.free_rank > 1) s << "^" << grp.free_rank;
      first = false;
    }
    for (const auto& t : grp.torsion) {
      s << (first ? "" : " + ") << "Z/" << t;
      first = false;
    }
    s << "\n";
  }
  s << "ranks by gr_h:";
  for (const auto& [deg, r] : ranks_by_degree(h)) s << " " << deg << ":" << r;
  s << "\n";
  return s.str();
}

// --------------------------------------------------------------- audit

inline ojson audit_json(const AuditReport& r, Pairing pairing) {
  ojson j;
  j["pairing"] = to_string(pairing);
  j["ok"] = r.ok();
  ojson census;
  ojson hist = ojson::object();
  for (const auto& [size, count] : r.census.histogram) hist[std::to_string(size)] = count;
  census["interval_sizes"] = hist;
  census["ladybug_intervals"] = r.census.ladybug_intervals;
  census["quasi_ladybug_intervals"] = r.census.quasi_ladybug_intervals;
  census["violations"] = r.census.violations;
  j["census"] = census;
  ojson scs;
  scs["arcs_checked"] = r.scs.arcs_checked;
  scs["violations"] = r.scs.violations;
  j["scs"] = scs;
  ojson posets;
  posets["checked"] = r.posets_checked;
  posets["nonvacuous"] = r.posets_nonvacuous;
  posets["surjectivity_failures"] = r.surjectivity_failures;
  j["posets"] = posets;
  ojson bg;
  bg["graphs"] = r.boundary_graphs;
  ojson lengths = ojson::object();
  for (const auto& [len, count] : r.boundary_cycle_lengths) lengths[std::to_string(len)] = count;
  bg["cycle_lengths"] = lengths;
  bg["dodecagons"] = r.dodecagons;
  j["boundary_graphs"] = bg;
  j["warnings"] = r.warnings;
  j["failures"] = r.failures;
  return j;
}

inline std::string audit_text(const AuditReport& r, Pairing pairing) {
  std::ostringstream s;
  s << "pairing: " << to_string(pairing) << "\n";
  s << "interval sizes:";
  for (const auto& [size, count] : r.census.histogram) s << " " << size << ":" << count;
  s << "\n";
  s << "ladybug intervals: " << r.census.ladybug_intervals
    << ", quasi-ladybug intervals: " << r.census.quasi_ladybug_intervals << "\n";
  s << "arcs checked for scs: " << r.scs.arcs_checked << "\n";
  s << "posets: " << r.posets_checked << " checked, " << r.posets_nonvacuous << " nonvacuous, "
    << r.surjectivity_failures << " projection failures\n";
  s << "boundary graphs: " << r.boundary_graphs << ", cycle lengths:";
  for (const auto& [len, count] : r.boundary_cycle_lengths) s << " " << len << "x" << count;
  s << "\n";
  if (r.dodecagons) s << "dodecagons: " << r.dodecagons << "\n";
  for (const auto& w : r.warnings) s << "warning: " << w << "\n";
  for (const auto& v : r.census.violations) s << "census violation: " << v << "\n";
  for (const auto& v : r.scs.violations) s << "scs violation: " << v << "\n";
  for (const auto& f : r.failures) s << "failure: " << f << "\n";
  s << "audit: " << (r.ok() ? "pass" : "FAIL") << "\n";
  return s.str();
}

}  // namespace surfkh
