#pragma once

// Closed relation vocabulary, grouped by family.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "stil/error.hpp"

namespace stil {

enum class Family : std::uint8_t { mereotopology, interval, orientation, distance, size, motion };

inline constexpr std::array<Family, 6> kAllFamilies{Family::mereotopology, Family::interval,
                                                    Family::orientation,   Family::distance,
                                                    Family::size,          Family::motion};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::mereotopology: return "mereotopology";
    case Family::interval: return "interval";
    case Family::orientation: return "orientation";
    case Family::distance: return "distance";
    case Family::size: return "size";
    case Family::motion: return "motion";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (Family f : kAllFamilies)
    if (to_string(f) == s) return f;
  if (s == "topology" || s == "rcc8") return Family::mereotopology;
  if (s == "allen" || s == "rectangle") return Family::interval;
  if (s == "qdc") return Family::distance;
  return std::nullopt;
}

enum class Rel : std::uint8_t {
  // RCC-8 base relations
  dc, ec, po, tpp, ntpp, tppi, ntppi, eq,
  // RCC-5 coarsening (po and eq are shared with RCC-8)
  dr, pp, ppi,
  // unions over RCC-8
  p, o, c,
  // Allen
  precedes, meets, overlaps, starts, during, finishes, equals,
  preceded_by, met_by, overlapped_by, started_by, contains, finished_by,
  // LR
  left, right, front, back, on, start, end, collinear,
  // coarse OPRA
  facing_towards, facing_away, same_direction, opposite_direction,
  // QDC
  adjacent, near, far, smaller, equi_sized, larger,
  // dynamics
  moving_towards, moving_away, moving_parallel, passing_in_front, passing_behind, splitting, merging,
  growing_vertically, growing_horizontally, shrinking_vertically, shrinking_horizontally,
};

namespace detail {
struct RelInfo {
  Rel rel;
  std::string_view name;
  Family family;
};
inline constexpr RelInfo kRelTable[] = {
    {Rel::dc, "dc", Family::mereotopology},
    {Rel::ec, "ec", Family::mereotopology},
    {Rel::po, "po", Family::mereotopology},
    {Rel::tpp, "tpp", Family::mereotopology},
    {Rel::ntpp, "ntpp", Family::mereotopology},
    {Rel::tppi, "tppi", Family::mereotopology},
    {Rel::ntppi, "ntppi", Family::mereotopology},
    {Rel::eq, "eq", Family::mereotopology},
    {Rel::dr, "dr", Family::mereotopology},
    {Rel::pp, "pp", Family::mereotopology},
    {Rel::ppi, "ppi", Family::mereotopology},
    {Rel::p, "p", Family::mereotopology},
    {Rel::o, "o", Family::mereotopology},
    {Rel::c, "c", Family::mereotopology},
    {Rel::precedes, "precedes", Family::interval},
    {Rel::meets, "meets", Family::interval},
    {Rel::overlaps, "overlaps", Family::interval},
    {Rel::starts, "starts", Family::interval},
    {Rel::during, "during", Family::interval},
    {Rel::finishes, "finishes", Family::interval},
    {Rel::equals, "equals", Family::interval},
    {Rel::preceded_by, "preceded_by", Family::interval},
    {Rel::met_by, "met_by", Family::interval},
    {Rel::overlapped_by, "overlapped_by", Family::interval},
    {Rel::started_by, "started_by", Family::interval},
    {Rel::contains, "contains", Family::interval},
    {Rel::finished_by, "finished_by", Family::interval},
    {Rel::left, "left", Family::orientation},
    {Rel::right, "right", Family::orientation},
    {Rel::front, "front", Family::orientation},
    {Rel::back, "back", Family::orientation},
    {Rel::on, "on", Family::orientation},
    {Rel::start, "start", Family::orientation},
    {Rel::end, "end", Family::orientation},
    {Rel::collinear, "collinear", Family::orientation},
    {Rel::facing_towards, "facing_towards", Family::orientation},
    {Rel::facing_away, "facing_away", Family::orientation},
    {Rel::same_direction, "same_direction", Family::orientation},
    {Rel::opposite_direction, "opposite_direction", Family::orientation},
    {Rel::adjacent, "adjacent", Family::distance},
    {Rel::near, "near", Family::distance},
    {Rel::far, "far", Family::distance},
    {Rel::smaller, "smaller", Family::size},
    {Rel::equi_sized, "equi_sized", Family::size},
    {Rel::larger, "larger", Family::size},
    {Rel::moving_towards, "moving_towards", Family::motion},
    {Rel::moving_away, "moving_away", Family::motion},
    {Rel::moving_parallel, "moving_parallel", Family::motion},
    {Rel::passing_in_front, "passing_in_front", Family::motion},
    {Rel::passing_behind, "passing_behind", Family::motion},
    {Rel::splitting, "splitting", Family::motion},
    {Rel::merging, "merging", Family::motion},
    {Rel::growing_vertically, "growing_vertically", Family::motion},
    {Rel::growing_horizontally, "growing_horizontally", Family::motion},
    {Rel::shrinking_vertically, "shrinking_vertically", Family::motion},
    {Rel::shrinking_horizontally, "shrinking_horizontally", Family::motion},
};
}  // namespace detail

inline std::string_view to_string(Rel r) { return detail::kRelTable[static_cast<std::size_t>(r)].name; }
inline Family family_of(Rel r) { return detail::kRelTable[static_cast<std::size_t>(r)].family; }

/// Accepts the canonical underscore spelling and the hyphenated one.
inline std::optional<Rel> parse_rel(std::string_view s) {
  std::string norm(s);
  std::replace(norm.begin(), norm.end(), '-', '_');
  if (norm == "proceeds") norm = "precedes";
  for (const auto& info : detail::kRelTable)
    if (info.name == norm) return info.rel;
  return std::nullopt;
}

inline constexpr std::array<Rel, 8> kRcc8{Rel::dc, Rel::ec, Rel::po, Rel::tpp,
                                          Rel::ntpp, Rel::tppi, Rel::ntppi, Rel::eq};

inline constexpr std::array<Rel, 13> kAllen{Rel::precedes,    Rel::meets,         Rel::overlaps,
                                            Rel::starts,      Rel::during,        Rel::finishes,
                                            Rel::equals,      Rel::preceded_by,   Rel::met_by,
                                            Rel::overlapped_by, Rel::started_by,  Rel::contains,
                                            Rel::finished_by};

inline bool is_rcc8(Rel r) { return std::find(kRcc8.begin(), kRcc8.end(), r) != kRcc8.end(); }
inline bool is_allen(Rel r) { return std::find(kAllen.begin(), kAllen.end(), r) != kAllen.end(); }

/// Converse for RCC-8 and Allen base relations; other relations map to
/// themselves where they are symmetric and throw otherwise.
inline Rel converse(Rel r) {
  switch (r) {
    case Rel::tpp: return Rel::tppi;
    case Rel::tppi: return Rel::tpp;
    case Rel::ntpp: return Rel::ntppi;
    case Rel::ntppi: return Rel::ntpp;
    case Rel::pp: return Rel::ppi;
    case Rel::ppi: return Rel::pp;
    case Rel::dc:
    case Rel::ec:
    case Rel::po:
    case Rel::eq:
    case Rel::dr:
    case Rel::o:
    case Rel::c:
    case Rel::equals:
    case Rel::same_direction:
    case Rel::opposite_direction:
    case Rel::adjacent:
    case Rel::near:
    case Rel::far:
    case Rel::equi_sized:
      return r;
    case Rel::precedes: return Rel::preceded_by;
    case Rel::preceded_by: return Rel::precedes;
    case Rel::meets: return Rel::met_by;
    case Rel::met_by: return Rel::meets;
    case Rel::overlaps: return Rel::overlapped_by;
    case Rel::overlapped_by: return Rel::overlaps;
    case Rel::starts: return Rel::started_by;
    case Rel::started_by: return Rel::starts;
    case Rel::during: return Rel::contains;
    case Rel::contains: return Rel::during;
    case Rel::finishes: return Rel::finished_by;
    case Rel::finished_by: return Rel::finishes;
    case Rel::smaller: return Rel::larger;
    case Rel::larger: return Rel::smaller;
    default: throw Error("no-converse", std::string(to_string(r)));
  }
}

/// Frame index with an optional wall-clock stamp.
struct TimePoint {
  std::int64_t index = 0;
  std::optional<double> stamp;
  friend bool operator==(const TimePoint& a, const TimePoint& b) { return a.index == b.index; }
  friend auto operator<=>(const TimePoint& a, const TimePoint& b) { return a.index <=> b.index; }
};

/// One qualitative relation instance. `qualifier` distinguishes the x/y
/// components of rectangle-algebra tuples and is empty otherwise.
struct RelationTuple {
  Rel rel{};
  std::vector<std::string> args;
  std::optional<TimePoint> time;
  std::string qualifier;

  friend bool operator==(const RelationTuple& a, const RelationTuple& b) {
    return a.rel == b.rel && a.args == b.args && a.time == b.time && a.qualifier == b.qualifier;
  }
  friend bool operator<(const RelationTuple& a, const RelationTuple& b) {
    auto ta = a.time ? a.time->index : -1;
    auto tb = b.time ? b.time->index : -1;
    return std::tie(a.args, a.rel, a.qualifier, ta) < std::tie(b.args, b.rel, b.qualifier, tb);
  }
};

/// Prolog-style rendering, e.g. `ntpp(a,b)` or `x:precedes(a,b)@3`.
inline std::string to_string(const RelationTuple& t) {
  std::string s;
  if (!t.qualifier.empty()) s += t.qualifier + ":";
  s += to_string(t.rel);
  s += "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ",";
    s += t.args[i];
  }
  s += ")";
  if (t.time) s += "@" + std::to_string(t.time->index);
  return s;
}

/// Parses the rendering produced by to_string(RelationTuple).
inline RelationTuple parse_relation_tuple(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
    return v;
  };
  std::string_view s = trim(text);
  RelationTuple t;
  if (auto at = s.rfind('@'); at != std::string_view::npos && s.find(')') < at) {
    t.time = TimePoint{std::stoll(std::string(s.substr(at + 1))), std::nullopt};
    s = trim(s.substr(0, at));
  }
  if (auto colon = s.find(':'); colon != std::string_view::npos && colon < s.find('(')) {
    t.qualifier = std::string(trim(s.substr(0, colon)));
    s = trim(s.substr(colon + 1));
  }
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw Error("parse-error", std::string(text));
  auto rel = parse_rel(trim(s.substr(0, open)));
  if (!rel) throw Error("parse-error", "unknown relation in " + std::string(text));
  t.rel = *rel;
  std::string_view body = s.substr(open + 1, s.size() - open - 2);
  while (!body.empty()) {
    auto comma = body.find(',');
    auto arg = trim(body.substr(0, comma));
    if (arg.empty()) throw Error("parse-error", "empty argument in " + std::string(text));
    t.args.emplace_back(arg);
    if (comma == std::string_view::npos) break;
    body = body.substr(comma + 1);
  }
  return t;
}

}  // namespace stil
