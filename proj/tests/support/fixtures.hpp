#pragma once

// Locating frozen diagrams and the decorated configurations recorded next to
// them in manifest files.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "surfkh/complex.hpp"
#include "surfkh/diagram.hpp"
#include "surfkh/poset_audit.hpp"
#include "surfkh/report.hpp"

#ifndef SURFKH_SOURCE_DIR
#define SURFKH_SOURCE_DIR "."
#endif

namespace surfkh::testing {

inline std::string fixture_path(const std::string& rel) { return std::string(SURFKH_SOURCE_DIR) + "/diagrams/" + rel; }

inline SurfaceLinkDiagram load_fixture(const std::string& rel) { return load_diagram(fixture_path(rel)); }

inline nlohmann::json load_manifest(const std::string& rel) {
  std::ifstream in(fixture_path(rel));
  if (!in) throw format_error("cannot open manifest " + rel);
  return nlohmann::json::parse(in);
}

// Generator of k given as {"state": bits, "minus": [edge ids on x- circles]}.
inline int find_generator(const KhovanovComplex& k, const nlohmann::json& record) {
  const State v = parse_state(record.at("state").get<std::string>(), k.engine->crossing_count());
  const auto& cfg = k.vertices[v];
  std::uint64_t minus = 0;
  for (const auto& id : record.at("minus")) {
    const int e = k.diagram().edge_index(id.get<std::string>());
    const int c = e < 0 ? -1 : cfg.circle_with_edge(e);
    if (c < 0) throw domain_error("no circle through edge " + id.get<std::string>());
    minus |= std::uint64_t{1} << c;
  }
  return k.generator_index(v, minus);
}

// Index-2 configuration recorded as {"state": bits, "arcs": [crossing ids]}.
inline ResolutionConfiguration recorded_sub_configuration(const ResolutionEngine& eng, const nlohmann::json& record) {
  const State v = parse_state(record.at("state").get<std::string>(), eng.crossing_count());
  State arcs = 0;
  for (const auto& id : record.at("arcs")) {
    const int c = eng.diagram().crossing_index(id.get<std::string>());
    if (c < 0) throw domain_error("unknown crossing " + id.get<std::string>());
    arcs |= State{1} << c;
  }
  return sub_configuration(eng.resolve(v), arcs);
}

}  // namespace surfkh::testing
