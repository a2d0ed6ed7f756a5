#pragma once

// Command-line front end. `run` does all the work so it can be driven from
// tests with string streams; the executable's main only forwards to it.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surfkh/complex.hpp"
#include "surfkh/diagram.hpp"
#include "surfkh/errors.hpp"
#include "surfkh/poset_audit.hpp"
#include "surfkh/report.hpp"

namespace surfkh::cli {

enum exit_code : int { ok = 0, validation_failure = 1, invariant_failure = 2 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string format = "text";
  std::string out_path;
  std::string pairing = "right";
  std::string vector;
  int max_crossings = 16;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

namespace detail {

struct Outcome {
  std::string text;
  ojson json;
  int status = exit_code::ok;
};

inline Pairing parse_pairing(const std::string& s) {
  if (s == "right") return Pairing::right;
  if (s == "left") return Pairing::left;
  throw domain_error("pairing must be right or left");
}

inline SurfaceLinkDiagram prepare(const RunConfig& cfg) {
  auto d = load_diagram(cfg.input);
  if (d.crossing_count() > cfg.max_crossings) {
    throw validation_error("diagram has " + std::to_string(d.crossing_count()) + " crossings, above the limit of " +
                           std::to_string(cfg.max_crossings) + " (see --max-crossings)");
  }
  if (cfg.seed) {
    std::vector<int> perm(d.crossings.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(*cfg.seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    d = reorder_crossings(d, perm);
  }
  return d;
}

inline ojson crossing_order(const SurfaceLinkDiagram& d) {
  ojson j = ojson::array();
  for (const auto& c : d.crossings) j.push_back(c.id);
  return j;
}

inline Outcome cmd_validate(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  o.json = envelope("validate");
  o.json["input"] = cfg.input;
  o.json["valid"] = true;
  o.json["diagram"] = diagram_summary_json(d);
  const auto c = d.counts();
  std::ostringstream s;
  s << cfg.input << ": valid, genus " << d.genus << ", " << c.n << " crossings (" << c.n_plus << " positive, "
    << c.n_minus << " negative), " << d.edges.size() << " edges, " << d.components().size() << " components\n";
  o.text = s.str();
  return o;
}

inline Outcome cmd_resolve(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  ResolutionEngine eng(d);
  std::vector<State> states;
  if (!cfg.vector.empty()) {
    states.push_back(parse_state(cfg.vector, eng.crossing_count()));
  } else {
    for (State v = 0; v <= eng.full_state(); ++v) states.push_back(v);
  }
  o.json = envelope("resolve");
  o.json["input"] = cfg.input;
  o.json["crossing_order"] = crossing_order(d);
  ojson configs = ojson::array();
  std::ostringstream s;
  for (State v : states) {
    const auto c = eng.resolve(v);
    configs.push_back(configuration_json(eng, c));
    s << configuration_text(eng, c);
  }
  o.json["configurations"] = configs;
  o.text = s.str();
  return o;
}

inline Outcome cmd_complex(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  const auto k = build_complex(d);
  o.json = envelope("complex");
  o.json["input"] = cfg.input;
  o.json["crossing_order"] = crossing_order(d);
  o.json["diagram"] = diagram_summary_json(d);
  o.json["complex"] = complex_json(k, cfg.verbose);
  o.text = complex_text(k, cfg.verbose);
  if (!o.json["complex"]["d_squared_zero"].get<bool>()) o.status = exit_code::invariant_failure;
  return o;
}

inline Outcome cmd_homology(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  const auto k = build_complex(d);
  const auto d2 = verify_d_squared(k);
  o.json = envelope("homology");
  o.json["input"] = cfg.input;
  o.json["crossing_order"] = crossing_order(d);
  o.json["diagram"] = diagram_summary_json(d);
  if (!d2.ok) {
    o.json["d_squared_failures"] = d2.details;
    o.text = "d^2 != 0\n";
    for (const auto& line : d2.details) o.text += "  " + line + "\n";
    o.status = exit_code::invariant_failure;
    return o;
  }
  const auto h = homology(k);
  o.json["homology"] = homology_json(h);
  o.text = homology_text(h);
  return o;
}

inline Outcome cmd_poset_audit(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  const auto k = build_complex(d);
  AuditOptions opt;
  opt.pairing = parse_pairing(cfg.pairing);
  if (cfg.verbose) opt.max_reported = 1000;
  const auto r = audit_complex(k, opt);
  o.json = envelope("poset-audit");
  o.json["input"] = cfg.input;
  o.json["crossing_order"] = crossing_order(d);
  o.json["genus"] = d.genus;
  o.json["audit"] = audit_json(r, opt.pairing);
  o.text = audit_text(r, opt.pairing);
  if (!r.ok()) o.status = exit_code::invariant_failure;
  return o;
}

inline Outcome cmd_report(const RunConfig& cfg) {
  Outcome o;
  const auto d = prepare(cfg);
  const auto k = build_complex(d);
  o.json = envelope("report");
  o.json["input"] = cfg.input;
  o.json["crossing_order"] = crossing_order(d);
  o.json["diagram"] = diagram_summary_json(d);
  o.json["complex"] = complex_json(k, cfg.verbose);
  std::ostringstream s;
  s << "== diagram\n" << cmd_validate(cfg).text << "== complex\n" << complex_text(k, cfg.verbose);
  if (!o.json["complex"]["d_squared_zero"].get<bool>()) {
    o.status = exit_code::invariant_failure;
    o.text = s.str();
    return o;
  }
  const auto h = homology(k);
  o.json["homology"] = homology_json(h);
  s << "== homology\n" << homology_text(h);
  ojson audits = ojson::array();
  for (Pairing p : {Pairing::right, Pairing::left}) {
    AuditOptions opt;
    opt.pairing = p;
    const auto r = audit_complex(k, opt);
    audits.push_back(audit_json(r, p));
    s << "== poset audit\n" << audit_text(r, p);
    if (!r.ok()) o.status = exit_code::invariant_failure;
  }
  o.json["audits"] = audits;
  o.text = s.str();
  return o;
}

}  // namespace detail

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::Outcome o;
  try {
    if (cfg.format != "text" && cfg.format != "json") throw domain_error("format must be text or json");
    if (cfg.command == "validate") {
      o = detail::cmd_validate(cfg);
    } else if (cfg.command == "resolve") {
      o = detail::cmd_resolve(cfg);
    } else if (cfg.command == "complex") {
      o = detail::cmd_complex(cfg);
    } else if (cfg.command == "homology") {
      o = detail::cmd_homology(cfg);
    } else if (cfg.command == "poset-audit") {
      o = detail::cmd_poset_audit(cfg);
    } else if (cfg.command == "report") {
      o = detail::cmd_report(cfg);
    } else {
      throw domain_error("unknown command " + cfg.command);
    }
  } catch (const invariant_error& e) {
    err << "error: " << cfg.input << ": " << e.what() << "\n";
    return exit_code::invariant_failure;
  } catch (const std::exception& e) {
    err << "error: " << cfg.input << ": " << e.what() << "\n";
    return exit_code::validation_failure;
  }
  const std::string body = cfg.format == "json" ? o.json.dump(2) + "\n" : o.text;
  if (cfg.out_path.empty()) {
    out << body;
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << cfg.out_path << "\n";
      return exit_code::validation_failure;
    }
    f << body;
  }
  return o.status;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Khovanov homology of link diagrams in thickened surfaces", "surfkh"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "diagram file (line format or JSON)")->required();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", cfg.out_path, "write the report here instead of standard output");
    sub->add_option("--max-crossings", cfg.max_crossings, "refuse larger diagrams")
        ->envname("SURFKH_MAX_CROSSINGS")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "shuffle the crossing order with this seed first");
    sub->add_flag("--verbose,-v", cfg.verbose, "more detail");
  };
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry specs[] = {
      {"validate", "parse and check a diagram"},
      {"resolve", "trace the resolution configuration at a cube vertex"},
      {"complex", "build the chain complex and check d^2 = 0"},
      {"homology", "integer homology split by grading"},
      {"poset-audit", "interval census, scs-freeness and boundary graphs"},
      {"report", "homology and audits in one document"},
  };
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    if (std::string(s.name) == "resolve") {
      sub->add_option("--vector", cfg.vector, "resolution bits in crossing order, e.g. 010");
    }
    if (std::string(s.name) == "poset-audit") {
      sub->add_option("--pairing", cfg.pairing, "ladybug matching")->check(CLI::IsMember({"right", "left"}));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    std::ostringstream so, se;
    app.exit(e, so, se);
    err << so.str() << se.str();
    return exit_code::validation_failure;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (sub->count("--seed") > 0) cfg.seed = seed;
  }
  return execute(cfg, out, err);
}

}  // namespace surfkh::cli
