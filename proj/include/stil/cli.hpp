#pragma once

// The stil command line. run() is the whole program; tools/stil.cpp only
// forwards argv. Exit codes: 0 ok, 1 domain error, 2 usage error.

#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stil/analytic/encode.hpp"
#include "stil/data/config.hpp"
#include "stil/data/generators.hpp"
#include "stil/fluents.hpp"
#include "stil/qsr.hpp"

namespace stil::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Relations file for `consistency`:
///
///   # comment
///   entity a circle        (default kind: aarect)
///   ntpp(a,b)
///   x:precedes(a,b)
struct RelationsFile {
  std::vector<RelationTuple> relations;
  analytic::EntitySchema schema;
};

inline RelationsFile parse_relations_file(const std::string& text) {
  RelationsFile f;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (auto h = line.find_first_of("#%"); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    try {
      if (first == "entity") {
        std::string id, kind, extra;
        if (!(ls >> id >> kind) || (ls >> extra)) throw Error("parse-error", "expected: entity <id> <kind>");
        f.schema[id] = analytic::parse_entity_kind(kind);
        continue;
      }
      f.relations.push_back(parse_relation_tuple(line));
    } catch (const Error& e) {
      throw Error("parse-error", "line " + std::to_string(n) + ": " + e.detail());
    }
  }
  for (const auto& r : f.relations)
    for (const auto& a : r.args) f.schema.try_emplace(a, analytic::EntityKind::aarect);
  return f;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& it : items) {
    std::stringstream ss(it);
    std::string x;
    while (std::getline(ss, x, ','))
      if (!x.empty()) out.push_back(x);
  }
  return out;
}

inline std::vector<std::string> read_mode_lines(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream is(data::read_file(path));
  std::string line;
  while (std::getline(is, line)) {
    if (auto h = line.find('%'); h != std::string::npos) line.erase(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

/// Examples for learn/eval: labelled datasets, or any file forced to one
/// polarity with --pos/--neg.
inline data::Dataset gather(const std::vector<std::string>& labelled, const std::vector<std::string>& pos,
                            const std::vector<std::string>& neg, const data::LoadOptions& opt) {
  data::Dataset out;
  auto take = [&](const std::string& path, std::optional<bool> force) {
    auto doc = data::load_document(path, opt);
    if (auto* d = std::get_if<data::Dataset>(&doc)) {
      if (out.target.empty()) out.target = d->target;
      if (d->target != out.target) throw Error("mixed-targets", path + " has target " + d->target);
      for (auto& e : d->examples) {
        if (force) e.positive = *force;
        out.examples.push_back(std::move(e));
      }
    } else if (!force) {
      throw Error("invalid-argument", path + ": a single scene or episode needs --pos or --neg");
    } else if (auto* s = std::get_if<Scene>(&doc)) {
      out.examples.push_back({s->id, *force, std::move(*s)});
    } else {
      auto& e = std::get<Episode>(doc);
      out.examples.push_back({e.id, *force, std::move(e)});
    }
  };
  for (const auto& p : labelled) take(p, std::nullopt);
  for (const auto& p : pos) take(p, true);
  for (const auto& p : neg) take(p, false);
  std::set<std::string> ids;
  for (const auto& e : out.examples)
    if (!ids.insert(e.id).second) throw Error("invalid-argument", "duplicate example id " + e.id);
  return out;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatio-temporal relational learning with native qualitative spatial semantics", "stil"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Config file (default: $STIL_CONFIG, else built-in)");

  // qualify
  auto* qualify = app.add_subcommand("qualify", "Qualitative relations of a scene");
  std::string q_scene;
  std::vector<std::string> q_families;
  bool q_no_axis = false;
  qualify->add_option("scene", q_scene, "Scene file")->required();
  qualify->add_option("--families", q_families, "Families (comma separated); default all static families");
  qualify->add_flag("--no-axis", q_no_axis, "Do not inject the centre axis");

  // consistency
  auto* consistency = app.add_subcommand("consistency", "Decide a relation set by quantification");
  std::string c_file;
  double c_precision = 1e-6, c_budget = 1e6;
  consistency->add_option("relations", c_file, "Relations file")->required();
  consistency->add_option("--precision", c_precision, "Box width below which search stops")->check(CLI::PositiveNumber);
  consistency->add_option("--budget", c_budget, "Node budget")->check(CLI::PositiveNumber);

  // fluents
  auto* fluents_cmd = app.add_subcommand("fluents", "Fluent intervals of an episode");
  std::string f_episode;
  std::vector<std::string> f_groups;
  fluents_cmd->add_option("episode", f_episode, "Episode file")->required();
  fluents_cmd->add_option("--groups", f_groups, "Families or derived relations (default: mereotopology,gaze_on)");

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic case-study dataset");
  std::string g_kind, g_out;
  std::uint64_t g_seed = 0;
  int g_pos = 20, g_neg = 20, g_frames = 12;
  double g_width = 1280, g_height = 720, g_jitter = 0.01;
  generate->add_option("kind", g_kind, "symmetry or attention")->required()->check(CLI::IsMember({"symmetry", "attention"}));
  generate->add_option("--seed", g_seed, "Random seed");
  generate->add_option("--n-pos", g_pos, "Positive examples")->check(CLI::PositiveNumber);
  generate->add_option("--n-neg", g_neg, "Negative examples")->check(CLI::PositiveNumber);
  generate->add_option("--out", g_out, "Output file (default: stdout)");
  generate->add_option("--width", g_width, "Frame width")->check(CLI::PositiveNumber);
  generate->add_option("--height", g_height, "Frame height")->check(CLI::PositiveNumber);
  generate->add_option("--jitter", g_jitter, "Symmetry jitter")->check(CLI::NonNegativeNumber);
  generate->add_option("--frames", g_frames, "Attention episode length")->check(CLI::Range(3, 1000000));

  // learn
  auto* learn = app.add_subcommand("learn", "Induce a hypothesis");
  std::vector<std::string> l_examples, l_pos, l_neg;
  std::string l_modes, l_params, l_out;
  bool l_purge = false;
  learn->add_option("--examples", l_examples, "Labelled dataset file(s)");
  learn->add_option("--pos", l_pos, "Files whose examples are all positive");
  learn->add_option("--neg", l_neg, "Files whose examples are all negative");
  learn->add_option("--modes", l_modes, "Mode declarations, one per line");
  learn->add_option("--params", l_params, "Config file whose keys override the active config");
  learn->add_option("--out", l_out, "Hypothesis file (default: stdout)");
  learn->add_flag("--purge-facts", l_purge, "Drop pre-ground facts from the examples");

  // eval
  auto* eval = app.add_subcommand("eval", "Confusion counts of a hypothesis");
  std::string e_hyp;
  std::vector<std::string> e_examples, e_pos, e_neg;
  eval->add_option("--hypothesis", e_hyp, "Hypothesis file")->required();
  eval->add_option("--examples", e_examples, "Labelled dataset file(s)");
  eval->add_option("--pos", e_pos, "Files whose examples are all positive");
  eval->add_option("--neg", e_neg, "Files whose examples are all negative");

  // modes
  auto* modes_cmd = app.add_subcommand("config", "Print the active configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::Success&) {
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "stil: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    data::Config cfg = data::resolve_config(config_path);
    auto write_out = [&](const std::string& path, const std::string& text) {
      if (path.empty() || path == "-")
        out << text;
      else
        data::write_file_atomic(path, text);
    };

    if (*qualify) {
      data::LoadOptions opt;
      opt.inject_axis = !q_no_axis;
      const Scene s = data::load_scene(q_scene, opt);
      std::set<Family> fams;
      const auto names = detail::split_list(q_families);
      if (names.empty()) {
        for (Family f : kAllFamilies)
          if (f != Family::motion) fams.insert(f);
      }
      for (const auto& n : names) {
        auto f = parse_family(n);
        if (!f) {
          err << "stil: unknown family '" << n << "'\n";
          return kUsageError;
        }
        fams.insert(*f);
      }
      const auto ctx = cfg.factors.resolve(s.width, s.height);
      const auto res = qsr::qualify_scene(s, fams, ctx);
      for (const auto& t : res.tuples) out << to_string(t) << "\n";
      return kOk;
    }

    if (*consistency) {
      const auto f = parse_relations_file(data::read_file(c_file));
      analytic::SolveOptions so;
      so.precision = c_precision;
      so.budget = c_budget;
      analytic::EncodeOptions eo;
      const auto r = analytic::check_consistency(f.relations, f.schema, so, eo);
      out << to_string(r.status) << "\n";
      if (r.witness)
        for (const auto& [k, v] : *r.witness) out << k << " = " << detail::fmt(v) << "\n";
      if (r.status == analytic::SatStatus::unknown)
        out << "% undecided after " << r.nodes << " nodes" << (r.budget_exhausted ? " (budget exhausted)" : "") << "\n";
      return kOk;
    }

    if (*fluents_cmd) {
      const Episode e = data::load_episode(f_episode);
      auto groups = detail::split_list(f_groups);
      if (groups.empty()) groups = {"mereotopology", "gaze_on"};
      const auto ctx = cfg.factors.resolve(e.width, e.height);
      for (const auto& iv : fluents::derive_fluents(e.tracks, groups, ctx)) out << to_string(iv) << "\n";
      return kOk;
    }

    if (*generate) {
      data::Dataset d;
      if (g_kind == "symmetry") {
        data::SymmetryParams p{g_pos, g_neg, g_seed, g_width, g_height, g_jitter};
        d = data::generate_symmetry(p, cfg.factors);
      } else {
        data::AttentionParams p{g_pos, g_neg, g_seed, g_width, g_height, g_frames};
        d = data::generate_attention(p, cfg.factors);
      }
      write_out(g_out, data::dump(data::to_json(d)));
      if (!g_out.empty() && g_out != "-")
        out << "wrote " << d.examples.size() << " examples (" << d.count(true) << " pos, " << d.count(false)
            << " neg) to " << g_out << "\n";
      return kOk;
    }

    if (*learn) {
      if (l_examples.empty() && l_pos.empty()) {
        err << "stil: learn needs --examples or --pos\n";
        return kUsageError;
      }
      if (!l_params.empty()) cfg = data::load_config(l_params, cfg);
      if (!l_modes.empty()) cfg.modes = detail::read_mode_lines(l_modes);
      data::LoadOptions opt;
      opt.keep_facts = !l_purge;
      auto d = detail::gather(l_examples, l_pos, l_neg, opt);
      if (l_purge) data::purge_facts(d);
      if (d.target.empty()) {
        const auto ms = ilp::parse_modes(cfg.modes);
        d.target = ms.heads.front().pred;
      }
      const auto examples = data::to_examples(d);
      const auto modes = data::modes_for(cfg, d.target);
      const auto bg = cfg.background();
      const auto rep = ilp::induce(examples, modes, bg, cfg.factors, cfg.params);
      const auto cm = ilp::evaluate(rep.hypothesis, examples, bg, cfg.factors);
      write_out(l_out, ilp::to_text(rep.hypothesis));
      std::ostream& log = (l_out.empty() || l_out == "-") ? err : out;
      log << "clauses=" << rep.hypothesis.clauses.size() << " train_accuracy=" << std::fixed << std::setprecision(4)
          << cm.accuracy() << std::defaultfloat << " tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn
          << " fn=" << cm.fn << " nodes=" << rep.nodes << "\n";
      if (rep.budget_exhausted) log << "warning: node-budget-exhausted; best-so-far clauses kept\n";
      if (!rep.uncoverable.empty()) {
        log << "warning: uncoverable-positives:";
        for (const auto& id : rep.uncoverable) log << " " << id;
        log << "\n";
      }
      return kOk;
    }

    if (*eval) {
      if (e_examples.empty() && e_pos.empty() && e_neg.empty()) {
        err << "stil: eval needs --examples, --pos or --neg\n";
        return kUsageError;
      }
      const auto h = ilp::parse_hypothesis(data::read_file(e_hyp));
      auto d = detail::gather(e_examples, e_pos, e_neg, {});
      if (d.target.empty()) d.target = h.target;
      const auto cm = ilp::evaluate(h, data::to_examples(d), cfg.background(), cfg.factors);
      out << "tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn << " fn=" << cm.fn << " accuracy=" << std::fixed
          << std::setprecision(4) << cm.accuracy() << "\n";
      return kOk;
    }

    if (*modes_cmd) {
      out << data::dump(data::to_json(cfg));
      return kOk;
    }
  } catch (const Error& e) {
    err << "stil: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "stil: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace stil::cli
