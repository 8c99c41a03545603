#pragma once

// Random-waypoint mobility and the association state machine that turns
// positions into associate / reassociate / disassociate transitions.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include "nacs/topology.hpp"

namespace nacs {

using MnId = std::uint32_t;

/// 64-bit Mersenne Twister with a portable uniform-real mapping, so traces do
/// not depend on the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

struct MobilityConfig {
  double speed_min = 1.0;  // m/s
  double speed_max = 3.0;
  double pause_time = 0.0;  // s
  double tick = 0.1;        // s
  std::uint64_t seed = 1;

  void validate() const {
    if (!(speed_min >= 0.0) || !(speed_max >= speed_min))
      throw std::invalid_argument("mobility: require 0 <= speed_min <= speed_max");
    if (!(tick > 0.0)) throw std::invalid_argument("mobility: tick must be > 0");
    if (!(pause_time >= 0.0)) throw std::invalid_argument("mobility: pause must be >= 0");
  }
};

struct MobileNode {
  MnId id = 0;
  Point position;
  double speed = 0.0;
  Point waypoint;
  double pause_left = 0.0;  // seconds of pause remaining at the current waypoint
  std::optional<ApId> associated_ap;
};

inline Point random_point(const Rect& bounds, Rng& rng) {
  double x = rng.uniform(0.0, bounds.width);
  double y = rng.uniform(0.0, bounds.height);
  return {x, y};
}

/// Places a node uniformly inside `bounds` and draws its first leg.
inline MobileNode spawn_node(MnId id, const Rect& bounds, const MobilityConfig& cfg, Rng& rng) {
  MobileNode mn;
  mn.id = id;
  mn.position = random_point(bounds, rng);
  mn.waypoint = random_point(bounds, rng);
  mn.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
  return mn;
}

/// Advances one tick. Waypoints lie inside `bounds` and motion is along the
/// segment toward the waypoint, so the node never leaves the world.
inline MobileNode step(MobileNode mn, const MobilityConfig& cfg, const Rect& bounds, Rng& rng) {
  if (mn.pause_left > 0.0) {
    mn.pause_left -= cfg.tick;
    if (mn.pause_left <= 1e-12) {
      mn.pause_left = 0.0;
      mn.waypoint = random_point(bounds, rng);
      mn.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    }
    return mn;
  }
  double travel = mn.speed * cfg.tick;
  double remaining = distance(mn.position, mn.waypoint);
  if (remaining > travel) {
    double f = travel / remaining;
    mn.position.x += (mn.waypoint.x - mn.position.x) * f;
    mn.position.y += (mn.waypoint.y - mn.position.y) * f;
    return mn;
  }
  if (travel == 0.0 && remaining > 0.0) return mn;
  mn.position = mn.waypoint;
  if (cfg.pause_time > 0.0) {
    mn.pause_left = cfg.pause_time;
  } else {
    mn.waypoint = random_point(bounds, rng);
    mn.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
  }
  return mn;
}

namespace transition {
struct None {
  friend bool operator==(const None&, const None&) = default;
};
struct Associate {
  ApId ap;
  friend bool operator==(const Associate&, const Associate&) = default;
};
struct Reassociate {
  ApId old_ap;
  ApId new_ap;
  friend bool operator==(const Reassociate&, const Reassociate&) = default;
};
struct Disassociate {
  ApId old_ap;
  friend bool operator==(const Disassociate&, const Disassociate&) = default;
};
}  // namespace transition

using Transition = std::variant<transition::None, transition::Associate, transition::Reassociate, transition::Disassociate>;

/// Nearest AP whose range covers `p`; exact distance ties go to the lowest id.
inline const AccessPoint* nearest_covering(const Point& p, const Topology& t) {
  const AccessPoint* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& ap : t.aps()) {
    double d = distance(ap.position, p);
    if (d > ap.radius) continue;
    if (d < best_d || (d == best_d && ap.id < best->id)) {
      best = &ap;
      best_d = d;
    }
  }
  return best;
}

/// Association is sticky: a node keeps its AP for as long as that AP covers it.
inline Transition classify_transition(const MobileNode& mn, const Topology& t) {
  if (mn.associated_ap) {
    const AccessPoint* cur = t.find(*mn.associated_ap);
    if (cur != nullptr && cur->covers(mn.position)) return transition::None{};
    if (const AccessPoint* next = nearest_covering(mn.position, t))
      return transition::Reassociate{*mn.associated_ap, next->id};
    return transition::Disassociate{*mn.associated_ap};
  }
  if (const AccessPoint* ap = nearest_covering(mn.position, t)) return transition::Associate{ap->id};
  return transition::None{};
}

/// Applies a transition to the node's association state.
inline void apply_transition(MobileNode& mn, const Transition& tr) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, transition::Associate>) mn.associated_ap = e.ap;
        else if constexpr (std::is_same_v<T, transition::Reassociate>) mn.associated_ap = e.new_ap;
        else if constexpr (std::is_same_v<T, transition::Disassociate>) mn.associated_ap.reset();
      },
      tr);
}

}  // namespace nacs
