#pragma once

// Scenario files (JSON) and event-trace CSV input.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nacs/format.hpp"
#include "nacs/sim_engine.hpp"

namespace nacs {

/// Schema or parse problem in user input. `where` names the key path or line.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (allowed.count(key) == 0) throw ScenarioError(path + "/" + key, "unknown key");
}

inline const json& require(const json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path + "/" + key, "missing required key '" + key + "'");
  return *it;
}

inline const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ScenarioError(path, "expected an object");
  return v;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  return v.get<double>();
}

inline std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) throw ScenarioError(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path, "expected a string");
  return v.get<std::string>();
}

inline bool valid_ap_id(const std::string& id) {
  if (id.empty()) return false;
  for (unsigned char c : id)
    if (!std::isalnum(c) && c != '_') return false;
  return true;
}

/// 1-based line of a byte offset, for parse diagnostics.
inline std::size_t line_of(const std::string& src, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < src.size(); ++i)
    if (src[i] == '\n') ++line;
  return line;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& source) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ScenarioError("line " + std::to_string(detail::line_of(source, e.byte == 0 ? 0 : e.byte - 1)), "malformed JSON");
  }
  detail::require_object(doc, "");
  detail::reject_unknown_keys(doc, "", {"aps", "world", "mobility", "mns", "scheme", "duration_s", "seed", "cost", "ttl", "warmup_fraction"});

  const auto& world_j = detail::require_object(detail::require(doc, "", "world"), "/world");
  detail::reject_unknown_keys(world_j, "/world", {"width", "height"});
  Rect world{detail::number(detail::require(world_j, "/world", "width"), "/world/width"),
             detail::number(detail::require(world_j, "/world", "height"), "/world/height")};

  const auto& aps_j = detail::require(doc, "", "aps");
  if (!aps_j.is_array() || aps_j.empty()) throw ScenarioError("/aps", "expected a non-empty array");
  std::vector<AccessPoint> aps;
  for (std::size_t i = 0; i < aps_j.size(); ++i) {
    auto path = "/aps/" + std::to_string(i);
    const auto& a = detail::require_object(aps_j[i], path);
    detail::reject_unknown_keys(a, path, {"id", "x", "y", "radius"});
    AccessPoint ap;
    ap.id = detail::text(detail::require(a, path, "id"), path + "/id");
    if (!detail::valid_ap_id(ap.id)) throw ScenarioError(path + "/id", "ids must be alphanumeric");
    ap.position = {detail::number(detail::require(a, path, "x"), path + "/x"), detail::number(detail::require(a, path, "y"), path + "/y")};
    ap.radius = detail::number(detail::require(a, path, "radius"), path + "/radius");
    aps.push_back(std::move(ap));
  }
  std::optional<Topology> topology;
  try {
    topology.emplace(std::move(aps), world);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("/aps", e.what());
  }

  Scenario s{*topology};

  const auto& mob = detail::require_object(detail::require(doc, "", "mobility"), "/mobility");
  detail::reject_unknown_keys(mob, "/mobility", {"model", "speed_min", "speed_max", "pause", "tick"});
  if (auto model = detail::text(detail::require(mob, "/mobility", "model"), "/mobility/model"); model != "random_waypoint")
    throw ScenarioError("/mobility/model", "unsupported mobility model '" + model + "'");
  s.mobility.speed_min = detail::number(detail::require(mob, "/mobility", "speed_min"), "/mobility/speed_min");
  s.mobility.speed_max = detail::number(detail::require(mob, "/mobility", "speed_max"), "/mobility/speed_max");
  s.mobility.pause_time = detail::number(detail::require(mob, "/mobility", "pause"), "/mobility/pause");
  s.mobility.tick = detail::number(detail::require(mob, "/mobility", "tick"), "/mobility/tick");
  s.mobility.seed = detail::unsigned_int(detail::require(doc, "", "seed"), "/seed");

  auto mns = detail::unsigned_int(detail::require(doc, "", "mns"), "/mns");
  if (mns < 1 || mns > 1'000'000) throw ScenarioError("/mns", "must be between 1 and 1000000");
  s.n_mobile_nodes = static_cast<std::uint32_t>(mns);

  const auto& sch = detail::require_object(detail::require(doc, "", "scheme"), "/scheme");
  detail::reject_unknown_keys(sch, "/scheme", {"kind", "threshold", "nong_mode"});
  auto kind = detail::text(detail::require(sch, "/scheme", "kind"), "/scheme/kind");
  if (kind == "snc") {
    double th = detail::number(detail::require(sch, "/scheme", "threshold"), "/scheme/threshold");
    if (!(th >= 0.0)) throw ScenarioError("/scheme/threshold", "must be >= 0");
    s.scheme = scheme::Snc{th};
  } else if (sch.contains("threshold")) {
    throw ScenarioError("/scheme/threshold", "only valid for kind 'snc'");
  }
  if (kind == "nacs") {
    scheme::Nacs n;
    if (auto it = sch.find("nong_mode"); it != sch.end()) {
      auto mode = parse_nong_mode(detail::text(*it, "/scheme/nong_mode"));
      if (!mode) throw ScenarioError("/scheme/nong_mode", "must be complement, intersection or auto");
      n.mode = *mode;
    }
    s.scheme = n;
  } else if (sch.contains("nong_mode")) {
    throw ScenarioError("/scheme/nong_mode", "only valid for kind 'nacs'");
  }
  if (kind == "pnc") s.scheme = scheme::Pnc{};
  else if (kind == "reactive") s.scheme = scheme::Reactive{};
  else if (kind != "snc" && kind != "nacs") throw ScenarioError("/scheme/kind", "unknown scheme '" + kind + "'");

  s.duration_s = detail::number(detail::require(doc, "", "duration_s"), "/duration_s");

  if (auto it = doc.find("cost"); it != doc.end()) {
    const auto& c = detail::require_object(*it, "/cost");
    detail::reject_unknown_keys(c, "/cost", {"default", "security_overhead", "pairs"});
    double def = c.contains("default") ? detail::number(c["default"], "/cost/default") : 1.0;
    double sec = c.contains("security_overhead") ? detail::number(c["security_overhead"], "/cost/security_overhead") : 0.0;
    if (!(def >= 0.0)) throw ScenarioError("/cost/default", "must be >= 0");
    if (!(sec >= 0.0)) throw ScenarioError("/cost/security_overhead", "must be >= 0");
    CostModel model(def, sec);
    if (auto p = c.find("pairs"); p != c.end()) {
      if (!p->is_array()) throw ScenarioError("/cost/pairs", "expected an array");
      for (std::size_t i = 0; i < p->size(); ++i) {
        auto path = "/cost/pairs/" + std::to_string(i);
        const auto& e = detail::require_object((*p)[i], path);
        detail::reject_unknown_keys(e, path, {"a", "b", "cost"});
        auto a = detail::text(detail::require(e, path, "a"), path + "/a");
        auto b = detail::text(detail::require(e, path, "b"), path + "/b");
        if (!s.topology.contains(a)) throw ScenarioError(path + "/a", "unknown access point '" + a + "'");
        if (!s.topology.contains(b)) throw ScenarioError(path + "/b", "unknown access point '" + b + "'");
        double v = detail::number(detail::require(e, path, "cost"), path + "/cost");
        try {
          model.set(a, b, v);
        } catch (const std::invalid_argument& ex) {
          throw ScenarioError(path, ex.what());
        }
      }
    }
    s.cost_model = std::move(model);
  }

  if (auto it = doc.find("ttl"); it != doc.end() && !it->is_null()) {
    double ttl = detail::number(*it, "/ttl");
    if (!(ttl >= 0.0)) throw ScenarioError("/ttl", "must be >= 0 seconds or null");
    s.cache_ttl_s = ttl;
  }
  if (auto it = doc.find("warmup_fraction"); it != doc.end()) s.warmup_fraction = detail::number(*it, "/warmup_fraction");

  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ScenarioError("scenario", e.what());
  }
  return s;
}

/// Thrown for unreadable input files, distinct from schema problems.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

/// Reads the `tick,mn_id,event,old_ap,new_ap` trace format.
inline Trace read_event_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "tick,mn_id,event,old_ap,new_ap")
    throw ScenarioError("trace line 1", "expected header 'tick,mn_id,event,old_ap,new_ap'");
  Trace trace;
  std::size_t lineno = 1;
  std::int64_t max_tick = -1;
  MnId max_mn = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    auto where = "trace line " + std::to_string(lineno);
    if (f.size() != 5) throw ScenarioError(where, "expected 5 fields");
    auto tick = parse_int<std::int64_t>(f[0]);
    auto mn = parse_int<MnId>(f[1]);
    if (!tick || *tick < 0 || !mn) throw ScenarioError(where, "bad tick or mn_id");
    MobilityEvent e{*tick, *mn, EventKind::associate, f[3], f[4]};
    if (f[2] == "associate") e.kind = EventKind::associate;
    else if (f[2] == "reassociate") e.kind = EventKind::reassociate;
    else if (f[2] == "disassociate") e.kind = EventKind::disassociate;
    else throw ScenarioError(where, "unknown event '" + f[2] + "'");
    max_tick = std::max(max_tick, *tick);
    max_mn = std::max(max_mn, *mn);
    trace.events.push_back(std::move(e));
  }
  trace.duration_ticks = max_tick + 1;
  trace.n_mobile_nodes = trace.events.empty() ? 0 : max_mn + 1;
  if (auto err = check_event_legality(trace)) throw ScenarioError("trace", *err);
  return trace;
}

}  // namespace nacs
