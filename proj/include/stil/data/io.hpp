#pragma once

// JSON file formats for scenes, episodes and datasets. See docs/formats.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stil/ilp/background.hpp"
#include "stil/model.hpp"

namespace stil::data {

using json = nlohmann::ordered_json;

inline constexpr const char* kSceneFormat = "stil.scene/1";
inline constexpr const char* kEpisodeFormat = "stil.episode/1";
inline constexpr const char* kDatasetFormat = "stil.dataset/1";

struct LoadOptions {
  /// Add the vertical centre axis when a scene has no axis object.
  /// Episodes are left alone.
  bool inject_axis = true;
  /// Keep pre-ground facts found in the file.
  bool keep_facts = true;
  double slack = 1e-6;
};

struct DatasetExample {
  std::string id;
  bool positive = true;
  std::variant<Scene, Episode> payload;
};

struct Dataset {
  std::string generator;
  std::uint64_t seed = 0;
  std::string target;
  json params = json::object();
  std::vector<DatasetExample> examples;

  int count(bool positive) const {
    int n = 0;
    for (const auto& e : examples) n += e.positive == positive;
    return n;
  }
};

// ---------------------------------------------------------------------------
// Files

/// Write to a temporary sibling, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("io-error", "cannot write " + tmp.string());
    os << text;
    os.flush();
    if (!os) throw Error("io-error", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("io-error", "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("io-error", "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw Error("parse-error", "line " + std::to_string(line) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Geometry

namespace detail {

inline double num(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw Error("parse-error", std::string("missing number '") + key + "'");
  return it->get<double>();
}

inline std::string str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error("parse-error", std::string("missing string '") + key + "'");
  return it->get<std::string>();
}

inline geom::Vector vec(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error("parse-error", "vector must be [vx, vy]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline json to_json(const geom::Entity& e) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, geom::Point>) {
          return {{"type", "point"}, {"x", g.x}, {"y", g.y}};
        } else if constexpr (std::is_same_v<T, geom::OrientedPoint>) {
          return {{"type", "oriented-point"}, {"x", g.p().x}, {"y", g.p().y}, {"vx", g.v().vx}, {"vy", g.v().vy}};
        } else if constexpr (std::is_same_v<T, geom::LineSegment>) {
          return {{"type", "segment"}, {"x1", g.p1().x}, {"y1", g.p1().y}, {"x2", g.p2().x}, {"y2", g.p2().y}};
        } else if constexpr (std::is_same_v<T, geom::AxisAlignedRectangle>) {
          return {{"type", "aarect"}, {"x", g.x()}, {"y", g.y()}, {"w", g.w()}, {"h", g.h()}};
        } else if constexpr (std::is_same_v<T, geom::Rectangle>) {
          return {{"type", "rect"}, {"x", g.p().x}, {"y", g.p().y}, {"vx", g.v().vx},
                  {"vy", g.v().vy}, {"w", g.w()},   {"h", g.h()}};
        } else if constexpr (std::is_same_v<T, geom::Circle>) {
          return {{"type", "circle"}, {"cx", g.c().x}, {"cy", g.c().y}, {"r", g.r()}};
        } else {
          json pts = json::array();
          for (const auto& p : g.vertices()) pts.push_back({p.x, p.y});
          return {{"type", "polygon"}, {"points", pts}};
        }
      },
      e);
}

inline geom::Entity entity_from_json(const json& j) {
  using detail::num;
  if (!j.is_object()) throw Error("parse-error", "geometry must be an object");
  const std::string type = detail::str(j, "type");
  if (type == "point") return geom::Point{num(j, "x"), num(j, "y")};
  if (type == "oriented-point") return geom::OrientedPoint({num(j, "x"), num(j, "y")}, {num(j, "vx"), num(j, "vy")});
  if (type == "segment") return geom::LineSegment({num(j, "x1"), num(j, "y1")}, {num(j, "x2"), num(j, "y2")});
  if (type == "aarect") return geom::AxisAlignedRectangle(num(j, "x"), num(j, "y"), num(j, "w"), num(j, "h"));
  if (type == "rect")
    return geom::Rectangle({num(j, "x"), num(j, "y")}, {num(j, "vx"), num(j, "vy")}, num(j, "w"), num(j, "h"));
  if (type == "circle") return geom::Circle({num(j, "cx"), num(j, "cy")}, num(j, "r"));
  if (type == "polygon") {
    std::vector<geom::Point> pts;
    const auto it = j.find("points");
    if (it == j.end() || !it->is_array()) throw Error("parse-error", "polygon needs 'points'");
    for (const auto& p : *it) {
      const auto v = detail::vec(p);
      pts.push_back({v.vx, v.vy});
    }
    return geom::SimplePolygon(std::move(pts));
  }
  throw Error("parse-error", "unknown geometry type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Scenes and episodes

namespace detail {

inline json facts_json(const std::vector<RelationTuple>& facts) {
  json out = json::array();
  for (const auto& f : facts) out.push_back(to_string(f));
  return out;
}

inline std::vector<RelationTuple> facts_from(const json& j) {
  std::vector<RelationTuple> out;
  auto it = j.find("facts");
  if (it == j.end()) return out;
  if (!it->is_array()) throw Error("parse-error", "'facts' must be an array");
  for (const auto& f : *it) {
    if (!f.is_string()) throw Error("parse-error", "facts are relation strings");
    out.push_back(parse_relation_tuple(f.get<std::string>()));
  }
  return out;
}

inline ObjectKind kind_from(const json& j) {
  const std::string k = str(j, "kind");
  auto kind = parse_object_kind(k);
  if (!kind) throw Error("parse-error", "unknown object kind '" + k + "'");
  return *kind;
}

inline void check_format(const json& j, const char* expected) {
  if (!j.is_object()) throw Error("parse-error", "top level must be an object");
  const std::string f = str(j, "format");
  if (f != expected) throw Error("unsupported-format", "expected " + std::string(expected) + ", got " + f);
}

inline geom::LineSegment centre_axis(double width, double height) {
  return geom::LineSegment({width / 2.0, 0.0}, {width / 2.0, height});
}

}  // namespace detail

inline json to_json(const Scene& s) {
  json j;
  j["format"] = kSceneFormat;
  j["id"] = s.id;
  j["width"] = s.width;
  j["height"] = s.height;
  if (s.timestamp) {
    j["timestamp"] = {{"index", s.timestamp->index}};
    if (s.timestamp->stamp) j["timestamp"]["stamp"] = *s.timestamp->stamp;
  }
  json objs = json::array();
  for (const auto& o : s.objects) {
    json jo{{"id", o.id}, {"kind", std::string(to_string(o.kind))}, {"geometry", to_json(o.geometry)}};
    if (o.facing) jo["facing"] = {o.facing->vx, o.facing->vy};
    objs.push_back(std::move(jo));
  }
  j["objects"] = std::move(objs);
  if (!s.facts.empty()) j["facts"] = detail::facts_json(s.facts);
  return j;
}

/// Adds the vertical centre axis when the scene has none. Returns whether
/// one was added.
inline bool inject_axis(Scene& s) {
  for (const auto& o : s.objects)
    if (o.kind == ObjectKind::axis) return false;
  std::string id = "axis";
  while (s.find(id)) id += "_";
  s.objects.push_back({id, ObjectKind::axis, detail::centre_axis(s.width, s.height), std::nullopt});
  return true;
}

inline Scene scene_from_json(const json& j, const LoadOptions& opt = {}) {
  detail::check_format(j, kSceneFormat);
  Scene s;
  s.id = detail::str(j, "id");
  s.width = detail::num(j, "width");
  s.height = detail::num(j, "height");
  if (auto it = j.find("timestamp"); it != j.end()) {
    TimePoint tp{it->at("index").get<std::int64_t>(), std::nullopt};
    if (auto st = it->find("stamp"); st != it->end()) tp.stamp = st->get<double>();
    s.timestamp = tp;
  }
  auto objs = j.find("objects");
  if (objs == j.end() || !objs->is_array()) throw Error("parse-error", "scene needs an 'objects' array");
  for (const auto& jo : *objs) {
    SceneObject o;
    o.id = detail::str(jo, "id");
    o.kind = detail::kind_from(jo);
    try {
      o.geometry = entity_from_json(jo.at("geometry"));
    } catch (const json::exception&) {
      throw Error("parse-error", o.id + ": missing geometry");
    } catch (const Error& e) {
      throw Error(e.code() == "parse-error" ? "parse-error" : "invariant-violation", o.id + ": " + e.detail());
    }
    if (auto f = jo.find("facing"); f != jo.end()) o.facing = detail::vec(*f);
    // "confidence" and other detector fields are ignored.
    s.objects.push_back(std::move(o));
  }
  if (opt.keep_facts) s.facts = detail::facts_from(j);
  if (opt.inject_axis) inject_axis(s);
  validate(s, opt.slack);
  return s;
}

inline json to_json(const Episode& e) {
  json j;
  j["format"] = kEpisodeFormat;
  j["id"] = e.id;
  j["width"] = e.width;
  j["height"] = e.height;
  json tracks = json::array();
  for (const auto& t : e.tracks) {
    json samples = json::array();
    for (const auto& s : t.samples) {
      json js{{"t", s.t.index}};
      if (s.t.stamp) js["stamp"] = *s.t.stamp;
      js["geometry"] = to_json(s.geometry);
      if (s.facing) js["facing"] = {s.facing->vx, s.facing->vy};
      samples.push_back(std::move(js));
    }
    tracks.push_back({{"id", t.id}, {"kind", std::string(to_string(t.kind))}, {"samples", std::move(samples)}});
  }
  j["tracks"] = std::move(tracks);
  if (!e.facts.empty()) j["facts"] = detail::facts_json(e.facts);
  return j;
}

inline Episode episode_from_json(const json& j, const LoadOptions& opt = {}) {
  detail::check_format(j, kEpisodeFormat);
  Episode e;
  e.id = detail::str(j, "id");
  e.width = detail::num(j, "width");
  e.height = detail::num(j, "height");
  auto tracks = j.find("tracks");
  if (tracks == j.end() || !tracks->is_array()) throw Error("parse-error", "episode needs a 'tracks' array");
  for (const auto& jt : *tracks) {
    Track t;
    t.id = detail::str(jt, "id");
    t.kind = detail::kind_from(jt);
    auto samples = jt.find("samples");
    if (samples == jt.end() || !samples->is_array()) throw Error("parse-error", t.id + ": track needs 'samples'");
    for (const auto& js : *samples) {
      TrackSample s;
      if (!js.contains("t") || !js["t"].is_number_integer()) throw Error("parse-error", t.id + ": sample needs integer 't'");
      s.t.index = js["t"].get<std::int64_t>();
      if (auto st = js.find("stamp"); st != js.end()) s.t.stamp = st->get<double>();
      try {
        s.geometry = entity_from_json(js.at("geometry"));
      } catch (const json::exception&) {
        throw Error("parse-error", t.id + ": missing geometry");
      } catch (const Error& err) {
        throw Error(err.code() == "parse-error" ? "parse-error" : "invariant-violation", t.id + ": " + err.detail());
      }
      if (auto f = js.find("facing"); f != js.end()) s.facing = detail::vec(*f);
      t.samples.push_back(std::move(s));
    }
    e.tracks.push_back(std::move(t));
  }
  if (opt.keep_facts) e.facts = detail::facts_from(j);
  validate(e, opt.slack);
  return e;
}

// ---------------------------------------------------------------------------
// Datasets

inline json to_json(const Dataset& d) {
  json j;
  j["format"] = kDatasetFormat;
  j["generator"] = d.generator;
  j["seed"] = d.seed;
  j["target"] = d.target;
  j["n_pos"] = d.count(true);
  j["n_neg"] = d.count(false);
  j["params"] = d.params;
  json ex = json::array();
  for (const auto& e : d.examples) {
    json je{{"id", e.id}, {"label", e.positive ? "pos" : "neg"}};
    if (const auto* s = std::get_if<Scene>(&e.payload))
      je["scene"] = to_json(*s);
    else
      je["episode"] = to_json(std::get<Episode>(e.payload));
    ex.push_back(std::move(je));
  }
  j["examples"] = std::move(ex);
  return j;
}

inline Dataset dataset_from_json(const json& j, const LoadOptions& opt = {}) {
  detail::check_format(j, kDatasetFormat);
  Dataset d;
  d.generator = j.value("generator", std::string());
  d.seed = j.value("seed", std::uint64_t{0});
  d.target = detail::str(j, "target");
  if (auto p = j.find("params"); p != j.end()) d.params = *p;
  auto ex = j.find("examples");
  if (ex == j.end() || !ex->is_array()) throw Error("parse-error", "dataset needs an 'examples' array");
  for (const auto& je : *ex) {
    DatasetExample e;
    e.id = detail::str(je, "id");
    const std::string label = detail::str(je, "label");
    if (label != "pos" && label != "neg") throw Error("parse-error", e.id + ": label must be pos or neg");
    e.positive = label == "pos";
    if (auto s = je.find("scene"); s != je.end())
      e.payload = scene_from_json(*s, opt);
    else if (auto ep = je.find("episode"); ep != je.end())
      e.payload = episode_from_json(*ep, opt);
    else
      throw Error("parse-error", e.id + ": example needs 'scene' or 'episode'");
    d.examples.push_back(std::move(e));
  }
  return d;
}

inline std::string dump(const json& j) { return j.dump(1, '\t') + "\n"; }

/// Any of the three file kinds, dispatched on the format field.
using Document = std::variant<Scene, Episode, Dataset>;

inline Document load_document(const std::filesystem::path& path, const LoadOptions& opt = {}) {
  const json j = parse_json(read_file(path));
  const std::string f = j.is_object() ? j.value("format", std::string()) : std::string();
  if (f == kSceneFormat) return scene_from_json(j, opt);
  if (f == kEpisodeFormat) return episode_from_json(j, opt);
  if (f == kDatasetFormat) return dataset_from_json(j, opt);
  throw Error("unsupported-format", path.string() + ": unknown format '" + f + "'");
}

inline Scene load_scene(const std::filesystem::path& path, const LoadOptions& opt = {}) {
  return scene_from_json(parse_json(read_file(path)), opt);
}
inline Episode load_episode(const std::filesystem::path& path, const LoadOptions& opt = {}) {
  return episode_from_json(parse_json(read_file(path)), opt);
}
inline Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opt = {}) {
  return dataset_from_json(parse_json(read_file(path)), opt);
}

/// Learner examples from a dataset; the id doubles as the example constant.
inline std::vector<ilp::Example> to_examples(const Dataset& d) {
  std::vector<ilp::Example> out;
  for (const auto& e : d.examples) out.push_back({e.id, e.positive, d.target, e.payload});
  return out;
}

inline void purge_facts(Dataset& d) {
  for (auto& e : d.examples) std::visit([](auto& p) { p.facts.clear(); }, e.payload);
}

}  // namespace stil::data
