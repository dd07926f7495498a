#pragma once

// Learner configuration: mode declarations, search parameters, context
// factors and background aliases. Format "stil.config/1", see docs/formats.md.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "stil/data/io.hpp"
#include "stil/ilp/learner.hpp"
#include "stil/qsr.hpp"

namespace stil::data {

inline constexpr const char* kConfigFormat = "stil.config/1";
inline constexpr const char* kConfigEnv = "STIL_CONFIG";

struct Config {
  std::vector<std::string> modes;
  ilp::Params params;
  qsr::ContextFactors factors;
  std::map<std::string, std::vector<std::string>> aliases;

  ilp::Background background() const {
    auto bg = ilp::Background::standard();
    for (const auto& [name, members] : aliases) bg.add_alias(name, members);
    return bg;
  }
};

/// Mode library for the symmetry case study.
inline std::vector<std::string> symmetry_modes() {
  return {
      "modeh(1, symmetric(+scene))",
      "modeb(1, axis(+scene,-axis))",
      "modeb(*, person(+scene,-person))",
      "modeb(*, left(+axis,-person))",
      "modeb(*, right(+axis,-person))",
      "modeb(*, equi_sized(+person,+person))",
      "modeb(*, smaller(+person,+person))",
      "modeb(*, equidistant_from(+person,+person,+axis))",
      "modeb(*, near(+person,+person))",
      "modeb(*, dc(+person,+person))",
      "modeb(*, facing_towards(+person,+person))",
  };
}

/// Mode library for the attention case study.
inline std::vector<std::string> attention_modes() {
  return {
      "modeh(1, attention_switch(+episode))",
      "modeb(1, gaze(+episode,-gaze))",
      "modeb(*, person(+episode,-person))",
      "modeb(*, holds_in(gaze_on(+gaze,-person),-interval))",
      "modeb(*, before(+interval,+interval))",
      "modeb(*, near(+gaze,+person))",
  };
}

/// The default configuration: both mode libraries (the head mode matching
/// the examples' target is used) and depth 3, which the case-study clauses
/// need.
inline Config default_config() {
  Config c;
  c.modes = symmetry_modes();
  for (auto& m : attention_modes()) c.modes.push_back(m);
  c.params.i = 3;
  return c;
}

/// Only the modes usable with the given head predicate: its modeh plus all
/// body modes.
inline ilp::ModeSet modes_for(const Config& c, const std::string& target) {
  auto all = ilp::parse_modes(c.modes);
  ilp::ModeSet out;
  for (auto& h : all.heads)
    if (h.pred == target) out.heads.push_back(h);
  if (out.heads.empty()) throw Error("no-head-mode", "no modeh for " + target);
  out.bodies = std::move(all.bodies);
  return out;
}

inline json to_json(const Config& c) {
  json j;
  j["format"] = kConfigFormat;
  j["modes"] = c.modes;
  j["params"] = {{"max_clause_length", c.params.max_clause_length},
                 {"i", c.params.i},
                 {"noise", c.params.noise},
                 {"min_pos", c.params.min_pos},
                 {"node_budget", c.params.node_budget},
                 {"recall", c.params.recall},
                 {"max_bottom", c.params.max_bottom}};
  const auto& f = c.factors;
  j["context"] = {{"eps_contact", f.eps_contact},     {"adjacent", f.adjacent},
                  {"near", f.near},                   {"size_ratio_tol", f.size_ratio_tol},
                  {"angle_tol", f.angle_tol},         {"circle_segments", f.circle_segments},
                  {"motion", f.motion},               {"motion_window", f.motion_window}};
  j["aliases"] = json::object();
  for (const auto& [k, v] : c.aliases) j["aliases"][k] = v;
  return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline Config config_from_json(const json& j, Config base = {}) {
  detail::check_format(j, kConfigFormat);
  for (const auto& [k, v] : j.items())
    if (k != "format" && k != "modes" && k != "params" && k != "context" && k != "aliases")
      throw Error("invalid-config", "unknown key '" + k + "'");
  Config c = std::move(base);
  try {
    if (j.contains("modes")) c.modes = j["modes"].get<std::vector<std::string>>();
    if (auto p = j.find("params"); p != j.end()) {
      for (const auto& [k, v] : p->items()) {
        if (k == "max_clause_length") c.params.max_clause_length = v.get<int>();
        else if (k == "i") c.params.i = v.get<int>();
        else if (k == "noise") c.params.noise = v.get<int>();
        else if (k == "min_pos") c.params.min_pos = v.get<int>();
        else if (k == "node_budget") c.params.node_budget = v.get<long>();
        else if (k == "recall") c.params.recall = v.get<int>();
        else if (k == "max_bottom") c.params.max_bottom = v.get<int>();
        else throw Error("invalid-config", "unknown params key '" + k + "'");
      }
    }
    if (auto x = j.find("context"); x != j.end()) {
      auto& f = c.factors;
      for (const auto& [k, v] : x->items()) {
        if (k == "eps_contact") f.eps_contact = v.get<double>();
        else if (k == "adjacent") f.adjacent = v.get<double>();
        else if (k == "near") f.near = v.get<double>();
        else if (k == "size_ratio_tol") f.size_ratio_tol = v.get<double>();
        else if (k == "angle_tol") f.angle_tol = v.get<double>();
        else if (k == "circle_segments") f.circle_segments = v.get<int>();
        else if (k == "motion") f.motion = v.get<double>();
        else if (k == "motion_window") f.motion_window = v.get<int>();
        else throw Error("invalid-config", "unknown context key '" + k + "'");
      }
    }
    if (auto a = j.find("aliases"); a != j.end())
      for (const auto& [k, v] : a->items()) c.aliases[k] = v.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error("invalid-config", e.what());
  }
  const auto& p = c.params;
  if (p.max_clause_length < 0 || p.i < 1 || p.noise < 0 || p.min_pos < 1 || p.node_budget < 1 || p.recall < 1 ||
      p.max_bottom < 1)
    throw Error("invalid-config", "search parameters out of range");
  return c;
}

inline Config load_config(const std::filesystem::path& path, Config base = {}) {
  return config_from_json(parse_json(read_file(path)), std::move(base));
}

/// Explicit path, else $STIL_CONFIG, else the built-in default.
inline Config resolve_config(const std::string& explicit_path = {}) {
  if (!explicit_path.empty()) return load_config(explicit_path, default_config());
  if (const char* env = std::getenv(kConfigEnv); env && *env) return load_config(env, default_config());
  return default_config();
}

}  // namespace stil::data
