#pragma once

// Tick-driven simulation: mobility produces an event trace, and the trace is
// replayed through a caching protocol, the IAPP message plane and the metrics
// ledger. run() is generate_trace() followed by replay(), so a single trace
// can be replayed under every scheme for same-trace comparisons.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nacs/context_cache.hpp"
#include "nacs/format.hpp"
#include "nacs/iapp.hpp"
#include "nacs/metrics.hpp"
#include "nacs/mobility.hpp"
#include "nacs/schemes.hpp"
#include "nacs/topology.hpp"
#include "nacs/units.hpp"

namespace nacs {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  explicit Scenario(Topology t) : topology(std::move(t)) {}

  Topology topology;
  MobilityConfig mobility;
  std::uint32_t n_mobile_nodes = 10;
  SchemeKind scheme = scheme::Pnc{};
  double duration_s = 600.0;
  CostModel cost_model;
  std::optional<double> cache_ttl_s;  // nullopt: entries never expire
  double warmup_fraction = 0.2;
  LatencyConfig latency;
  std::size_t payload_size = 256;
  std::size_t slots = 20;
  std::optional<ApGraph> initial_neighbors;

  SimTime tick_time() const { return seconds_to_time(mobility.tick); }
  std::int64_t duration_ticks() const { return std::llround(duration_s / mobility.tick); }

  void validate() const {
    try {
      mobility.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    if (tick_time() <= 0) throw ValidationError("scenario: tick is below the clock resolution");
    if (!(duration_s > 0.0) || duration_ticks() <= 0) throw ValidationError("scenario: duration must be > 0");
    if (n_mobile_nodes < 1) throw ValidationError("scenario: at least one mobile node is required");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ValidationError("scenario: warmup_fraction must be in [0,1)");
    if (cache_ttl_s && !(*cache_ttl_s >= 0.0)) throw ValidationError("scenario: ttl must be >= 0");
    if (slots < 1) throw ValidationError("scenario: at least one metric slot is required");
    if (payload_size == 0) throw ValidationError("scenario: payload size must be > 0");
    if (latency.proactive < 0 || latency.obtain < 0) throw ValidationError("scenario: latencies must be >= 0");
    if (const auto* snc = std::get_if<scheme::Snc>(&scheme); snc && !(snc->threshold >= 0.0))
      throw ValidationError("scenario: snc threshold must be >= 0");
    for (const auto& [edge, _] : cost_model.pairs())
      if (!topology.contains(edge.first) || !topology.contains(edge.second))
        throw ValidationError("scenario: cost override references unknown access point");
    if (initial_neighbors && initial_neighbors->vertices() != topology.ids())
      throw ValidationError("scenario: initial neighbor graph does not match the topology");
  }
};

enum class EventKind { associate, reassociate, disassociate };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::associate: return "associate";
    case EventKind::reassociate: return "reassociate";
    case EventKind::disassociate: return "disassociate";
  }
  return "?";
}

struct MobilityEvent {
  std::int64_t tick = 0;
  MnId mn = 0;
  EventKind kind = EventKind::associate;
  ApId old_ap;  // empty for associate
  ApId new_ap;  // empty for disassociate

  friend bool operator==(const MobilityEvent&, const MobilityEvent&) = default;
};

/// FNV-1a over ids, positions, radii and bounds.
inline std::uint64_t fingerprint(const Topology& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  auto mix_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(v >> (8 * i)));
  };
  auto mix_double = [&](double d) { mix_u64(std::bit_cast<std::uint64_t>(d)); };
  for (const auto& ap : t.aps()) {
    for (char c : ap.id) mix_byte(static_cast<unsigned char>(c));
    mix_byte(0);
    mix_double(ap.position.x);
    mix_double(ap.position.y);
    mix_double(ap.radius);
  }
  mix_double(t.world().width);
  mix_double(t.world().height);
  return h;
}

struct Trace {
  std::vector<MobilityEvent> events;
  std::int64_t duration_ticks = 0;
  std::uint32_t n_mobile_nodes = 0;
  std::optional<std::uint64_t> topology_fingerprint;  // absent for traces read from CSV

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Returns a description of the first illegal event, if any.
inline std::optional<std::string> check_event_legality(const Trace& trace) {
  std::map<MnId, ApId> current;
  std::int64_t last_tick = 0;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    auto where = "event " + std::to_string(i) + " (tick " + std::to_string(e.tick) + ", mn " + std::to_string(e.mn) + "): ";
    if (e.tick < last_tick) return where + "out of tick order";
    last_tick = e.tick;
    auto it = current.find(e.mn);
    bool associated = it != current.end();
    switch (e.kind) {
      case EventKind::associate:
        if (associated) return where + "associate while associated";
        if (e.new_ap.empty() || !e.old_ap.empty()) return where + "malformed associate";
        current[e.mn] = e.new_ap;
        break;
      case EventKind::reassociate:
        if (!associated) return where + "reassociate while unassociated";
        if (it->second != e.old_ap) return where + "reassociate from an AP the node is not associated with";
        if (e.new_ap.empty() || e.new_ap == e.old_ap) return where + "malformed reassociate";
        it->second = e.new_ap;
        break;
      case EventKind::disassociate:
        if (!associated) return where + "disassociate while unassociated";
        if (it->second != e.old_ap) return where + "disassociate from an AP the node is not associated with";
        current.erase(it);
        break;
    }
  }
  return std::nullopt;
}

/// Moves every node for the whole scenario and records association changes.
/// Tick 0 classifies the initial placement; later ticks step first.
inline Trace generate_trace(const Scenario& s) {
  s.validate();
  Trace trace;
  trace.duration_ticks = s.duration_ticks();
  trace.n_mobile_nodes = s.n_mobile_nodes;
  trace.topology_fingerprint = fingerprint(s.topology);

  Rng rng(s.mobility.seed);
  const auto& bounds = s.topology.world();
  std::vector<MobileNode> nodes;
  nodes.reserve(s.n_mobile_nodes);
  for (MnId i = 0; i < s.n_mobile_nodes; ++i) nodes.push_back(spawn_node(i, bounds, s.mobility, rng));

  for (std::int64_t tick = 0; tick < trace.duration_ticks; ++tick) {
    for (auto& mn : nodes) {
      if (tick > 0) mn = step(std::move(mn), s.mobility, bounds, rng);
      Transition tr = classify_transition(mn, s.topology);
      std::visit(
          [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, transition::Associate>)
              trace.events.push_back({tick, mn.id, EventKind::associate, {}, e.ap});
            else if constexpr (std::is_same_v<T, transition::Reassociate>)
              trace.events.push_back({tick, mn.id, EventKind::reassociate, e.old_ap, e.new_ap});
            else if constexpr (std::is_same_v<T, transition::Disassociate>)
              trace.events.push_back({tick, mn.id, EventKind::disassociate, e.old_ap, {}});
          },
          tr);
      apply_transition(mn, tr);
    }
  }
  return trace;
}

/// Re-association pairs implied by a trace, including hand-offs across a
/// coverage gap (the next association after a disassociation).
inline std::vector<Reassociation> reassociations(const Trace& trace) {
  std::vector<Reassociation> out;
  std::map<MnId, ApId> last;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::disassociate) continue;
    auto it = last.find(e.mn);
    if (it != last.end() && it->second != e.new_ap) out.push_back({it->second, e.new_ap});
    last[e.mn] = e.new_ap;
  }
  return out;
}

struct LookupRecord {
  std::int64_t tick = 0;
  MnId mn = 0;
  ApId ap;
  bool hit = false;
};

struct RunResult {
  SchemeKind scheme;
  Trace trace;
  std::vector<MessageRecord> message_log;
  std::vector<LookupRecord> lookup_log;
  MetricsLedger ledger;
  MetricsSummary summary;
  std::map<ApId, std::uint64_t> propagation_events;
  std::uint64_t full_misses = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_in_flight = 0;
  SimTime tick_time = 0;
  ApGraph final_neighbor_graph;
};

/// Called after every tick with the live network and protocol state.
using TickObserver = std::function<void(std::int64_t tick, const Network&, const CachingProtocol&, const MetricsLedger&)>;

/// Slot boundaries: `slots` equal windows, the last one absorbing the remainder.
inline std::vector<std::int64_t> slot_end_ticks(std::int64_t duration_ticks, std::size_t slots) {
  auto n = static_cast<std::int64_t>(std::min<std::int64_t>(static_cast<std::int64_t>(slots), duration_ticks));
  std::int64_t len = duration_ticks / n;
  std::vector<std::int64_t> ends;
  for (std::int64_t k = 1; k < n; ++k) ends.push_back(k * len - 1);
  ends.push_back(duration_ticks - 1);
  return ends;
}

/// Replays a mobility trace under `kind`. A node that re-enters coverage after
/// a gap is handed off from the last AP it used, as a 802.11 reassociation
/// names the old AP; returning to that same AP re-runs the associate branch.
/// The old AP's invalidation runs when the node is served again elsewhere,
/// not at the moment it loses coverage.
inline RunResult replay(const Trace& trace, const Scenario& s, const SchemeKind& kind, const TickObserver& observer = {}) {
  s.validate();
  if (trace.topology_fingerprint && *trace.topology_fingerprint != fingerprint(s.topology))
    throw ValidationError("replay: trace was recorded on a different topology");
  if (trace.duration_ticks <= 0) throw ValidationError("replay: trace has no duration");
  for (const auto& e : trace.events) {
    if ((!e.old_ap.empty() && !s.topology.contains(e.old_ap)) || (!e.new_ap.empty() && !s.topology.contains(e.new_ap)))
      throw ValidationError("replay: trace references an access point missing from the topology");
    if (e.tick < 0 || e.tick >= trace.duration_ticks) throw ValidationError("replay: event outside the trace duration");
  }
  if (auto err = check_event_legality(trace)) throw ValidationError("replay: illegal trace: " + *err);

  const SimTime tick_time = s.tick_time();
  ProtocolOptions opts;
  if (s.cache_ttl_s) opts.cache_ttl = seconds_to_time(*s.cache_ttl_s);
  opts.payload_size = s.payload_size;
  opts.obtain_latency = s.latency.obtain;
  CachingProtocol protocol(kind, s.topology, opts, s.initial_neighbors);
  Network network(s.cost_model, s.latency);

  RunResult result;
  result.scheme = kind;
  result.trace = trace;
  result.tick_time = tick_time;

  const auto warmup_ticks = static_cast<std::int64_t>(s.warmup_fraction * static_cast<double>(trace.duration_ticks));
  const auto slot_ends = slot_end_ticks(trace.duration_ticks, s.slots);
  std::size_t next_slot = 0;
  std::map<MnId, ApId> last_ap;

  auto send_all = [&](const std::vector<IappMessage>& msgs) {
    for (const auto& m : msgs) {
      network.send(m);
      result.ledger.record_message(m.kind, network.log().back().cost);
    }
  };
  auto deliver = [&](SimTime now) {
    for (const auto& m : network.deliver_due(now)) protocol.deliver(m, now);
  };
  auto serve = [&](const MobilityEvent& e, SimTime now) {
    auto prev = last_ap.find(e.mn);
    if (prev == last_ap.end() || prev->second == e.new_ap) {
      send_all(protocol.on_associate(e.new_ap, e.mn, now));
      ++result.propagation_events[e.new_ap];
    } else {
      ApId old = prev->second;
      auto out = protocol.on_reassociate(e.new_ap, old, e.mn, now);
      result.ledger.record_lookup(out.hit);
      result.lookup_log.push_back({e.tick, e.mn, e.new_ap, out.hit});
      if (out.full_miss) ++result.full_misses;
      send_all(out.messages);
      ++result.propagation_events[e.new_ap];
      send_all(protocol.on_leave(old, e.mn, now));
    }
    last_ap[e.mn] = e.new_ap;
  };

  auto ev = trace.events.begin();
  for (std::int64_t tick = 0; tick < trace.duration_ticks; ++tick) {
    const SimTime now = tick * tick_time;
    protocol.set_warming_up(tick < warmup_ticks);
    deliver(now);
    for (; ev != trace.events.end() && ev->tick == tick; ++ev) {
      if (ev->kind != EventKind::disassociate) serve(*ev, now);
    }
    deliver(now);
    if (next_slot < slot_ends.size() && slot_ends[next_slot] == tick) result.ledger.sample(next_slot++);
    if (observer) observer(tick, network, protocol, result.ledger);
  }

  result.message_log = network.log();
  result.summary = summarize(result.ledger);
  result.messages_delivered = network.delivered();
  result.messages_in_flight = network.in_flight();
  result.final_neighbor_graph = protocol.neighbor_graph();
  return result;
}

inline RunResult run(const Scenario& s, const TickObserver& observer = {}) {
  return replay(generate_trace(s), s, s.scheme, observer);
}

/// Pairs a run with the PNC replay of the same trace.
inline void attach_pnc_ratio(RunResult& r, const RunResult& pnc) {
  if (pnc.summary.proactive_cost > 0.0) r.summary.cost_ratio_vs_pnc = cost_ratio(r.summary, pnc.summary);
}

// CSV output. Column order is fixed.

inline void write_event_csv(std::ostream& os, const Trace& trace) {
  os << "tick,mn_id,event,old_ap,new_ap\n";
  for (const auto& e : trace.events)
    os << e.tick << ',' << e.mn << ',' << to_string(e.kind) << ',' << e.old_ap << ',' << e.new_ap << '\n';
}

inline void write_message_csv(std::ostream& os, const RunResult& r) {
  os << "tick,kind,from_ap,to_ap,mn_id,cost\n";
  for (const auto& rec : r.message_log)
    os << rec.msg.sent_at / r.tick_time << ',' << to_string(rec.msg.kind) << ',' << rec.msg.from_ap << ',' << rec.msg.to_ap
       << ',' << rec.msg.mn_id << ',' << format_double(rec.cost) << '\n';
}

inline void write_metrics_header(std::ostream& os) {
  os << "slot,scheme,n_mns,seed,c_hit,c_try,chp,proactive_cost,reactive_cost,total_cost,cost_ratio_vs_pnc\n";
}

/// One row per slot; the ratio column is filled when a same-trace PNC run is
/// given and its cumulative proactive cost at that slot is positive.
inline void write_metrics_rows(std::ostream& os, const RunResult& r, std::uint64_t seed, const RunResult* pnc = nullptr) {
  const auto& slots = r.ledger.per_slot();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];
    os << s.slot << ',' << to_string(r.scheme) << ',' << r.trace.n_mobile_nodes << ',' << seed << ',' << s.c_hit << ','
       << s.c_try << ',' << format_fixed(chp(s.c_hit, s.c_try)) << ',' << format_fixed(s.proactive_cost) << ','
       << format_fixed(s.reactive_cost) << ',' << format_fixed(s.total_cost) << ',';
    if (pnc != nullptr && i < pnc->ledger.per_slot().size() && pnc->ledger.per_slot()[i].proactive_cost > 0.0)
      os << format_fixed(cost_ratio(s.proactive_cost, pnc->ledger.per_slot()[i].proactive_cost));
    os << '\n';
  }
}

inline void write_cp_csv(std::ostream& os, const RunResult& r) {
  os << "from_ap,to_ap,deliveries,events,cp\n";
  for (const auto& e : cp_matrix(r.message_log, r.propagation_events))
    os << e.from << ',' << e.to << ',' << e.deliveries << ',' << e.events << ',' << format_fixed(e.cp) << '\n';
}

inline void write_summary(std::ostream& os, const RunResult& r) {
  os << "scheme: " << to_string(r.scheme) << '\n'
     << "mobile_nodes: " << r.trace.n_mobile_nodes << '\n'
     << "ticks: " << r.trace.duration_ticks << '\n'
     << "mobility_events: " << r.trace.events.size() << '\n'
     << "c_hit: " << r.ledger.c_hit() << '\n'
     << "c_try: " << r.ledger.c_try() << '\n'
     << "chp: " << format_fixed(r.summary.chp) << '\n'
     << "full_misses: " << r.full_misses << '\n'
     << "proactive_cost: " << format_fixed(r.summary.proactive_cost) << '\n'
     << "reactive_cost: " << format_fixed(r.summary.reactive_cost) << '\n'
     << "total_cost: " << format_fixed(r.summary.total_cost) << '\n'
     << "messages_sent: " << r.message_log.size() << '\n';
  for (auto k : kAllMessageKinds) os << "messages_" << to_string(k) << ": " << r.ledger.count_of(k) << '\n';
  if (r.summary.cost_ratio_vs_pnc) os << "cost_ratio_vs_pnc: " << format_fixed(*r.summary.cost_ratio_vs_pnc) << '\n';
}

}  // namespace nacs
