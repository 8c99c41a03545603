#pragma once

// Context-propagation schemes (reactive, PNC, SNC, NACS) behind one policy
// interface, the SNC handoff-probability table, and the caching protocol that
// drives a policy through associate / re-associate / leave events.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nacs/context_cache.hpp"
#include "nacs/format.hpp"
#include "nacs/iapp.hpp"
#include "nacs/topology.hpp"

namespace nacs {

namespace scheme {
struct Reactive {
  friend bool operator==(const Reactive&, const Reactive&) = default;
};
struct Pnc {
  friend bool operator==(const Pnc&, const Pnc&) = default;
};
struct Snc {
  double threshold = 0.15;
  friend bool operator==(const Snc&, const Snc&) = default;
};
struct Nacs {
  NongMode mode = NongMode::automatic;
  friend bool operator==(const Nacs&, const Nacs&) = default;
};
}  // namespace scheme

using SchemeKind = std::variant<scheme::Reactive, scheme::Pnc, scheme::Snc, scheme::Nacs>;

inline std::string to_string(const SchemeKind& k) {
  struct {
    std::string operator()(const scheme::Reactive&) const { return "reactive"; }
    std::string operator()(const scheme::Pnc&) const { return "pnc"; }
    std::string operator()(const scheme::Snc& s) const { return "snc:" + format_double(s.threshold); }
    std::string operator()(const scheme::Nacs& n) const { return std::string("nacs:") + to_string(n.mode); }
  } v;
  return std::visit(v, k);
}

inline std::optional<NongMode> parse_nong_mode(std::string_view s) {
  if (s == "complement") return NongMode::complement;
  if (s == "intersection") return NongMode::intersection;
  if (s == "auto") return NongMode::automatic;
  return std::nullopt;
}

/// Parses `reactive`, `pnc`, `snc:<threshold>`, `nacs[:complement|intersection|auto]`.
inline SchemeKind parse_scheme(std::string_view text) {
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  std::optional<std::string_view> param;
  if (colon != std::string_view::npos) param = text.substr(colon + 1);
  auto bad = [&](const std::string& why) { return std::invalid_argument("scheme '" + std::string(text) + "': " + why); };

  if (head == "reactive" || head == "pnc") {
    if (param) throw bad("takes no parameter");
    if (head == "pnc") return scheme::Pnc{};
    return scheme::Reactive{};
  }
  if (head == "snc") {
    if (!param) throw bad("snc needs a threshold, e.g. snc:0.15");
    auto th = parse_double(*param);
    if (!th || !(*th >= 0.0)) throw bad("threshold must be a non-negative number");
    return scheme::Snc{*th};
  }
  if (head == "nacs") {
    if (!param) return scheme::Nacs{};
    auto mode = parse_nong_mode(*param);
    if (!mode) throw bad("mode must be complement, intersection or auto");
    return scheme::Nacs{*mode};
  }
  throw bad("unknown scheme kind");
}

inline bool is_pnc(const SchemeKind& k) { return std::holds_alternative<scheme::Pnc>(k); }

/// Maximum-likelihood handoff probabilities from observed re-associations,
/// kept as per-source rows.
class HandoffProbabilityTable {
 public:
  HandoffProbabilityTable() = default;
  explicit HandoffProbabilityTable(std::set<ApId> known) : known_(std::move(known)) {}

  void update(const ApId& from, const ApId& to) {
    if (!known_.empty() && (known_.count(from) == 0 || known_.count(to) == 0))
      throw std::invalid_argument("handoff table: unknown access point in (" + from + "," + to + ")");
    ++counts_[from][to];
    ++totals_[from];
  }

  std::uint64_t count(const ApId& from, const ApId& to) const {
    auto row = counts_.find(from);
    if (row == counts_.end()) return 0;
    auto it = row->second.find(to);
    return it == row->second.end() ? 0 : it->second;
  }

  std::uint64_t row_total(const ApId& from) const {
    auto it = totals_.find(from);
    return it == totals_.end() ? 0 : it->second;
  }

  double probability(const ApId& from, const ApId& to) const {
    auto total = row_total(from);
    return total == 0 ? 0.0 : static_cast<double>(count(from, to)) / static_cast<double>(total);
  }

  const std::map<ApId, std::map<ApId, std::uint64_t>>& counts() const { return counts_; }

 private:
  std::set<ApId> known_;
  std::map<ApId, std::map<ApId, std::uint64_t>> counts_;
  std::map<ApId, std::uint64_t> totals_;
};

struct GraphSet {
  const ApGraph& neighbor;
  const ApGraph& overlap;
  const ApGraph& non_overlap;
};

struct PolicyInput {
  GraphSet graphs;
  const HandoffProbabilityTable& probabilities;
  bool warming_up = false;  // SNC falls back to PNC while the table trains
};

class PropagationPolicy {
 public:
  virtual ~PropagationPolicy() = default;
  /// Sorted AP ids that should receive the context proactively.
  virtual std::vector<ApId> targets(const ApId& current, const PolicyInput& in) const = 0;
  virtual SchemeKind kind() const = 0;
};

namespace detail {
inline std::vector<ApId> as_vector(const std::set<ApId>& s) { return {s.begin(), s.end()}; }
}  // namespace detail

class ReactivePolicy final : public PropagationPolicy {
 public:
  std::vector<ApId> targets(const ApId&, const PolicyInput&) const override { return {}; }
  SchemeKind kind() const override { return scheme::Reactive{}; }
};

class PncPolicy final : public PropagationPolicy {
 public:
  std::vector<ApId> targets(const ApId& current, const PolicyInput& in) const override {
    return detail::as_vector(in.graphs.neighbor.neighbors(current));
  }
  SchemeKind kind() const override { return scheme::Pnc{}; }
};

class SncPolicy final : public PropagationPolicy {
 public:
  explicit SncPolicy(double threshold) : threshold_(threshold) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("snc threshold must be >= 0");
  }

  std::vector<ApId> targets(const ApId& current, const PolicyInput& in) const override {
    const auto& neighbors = in.graphs.neighbor.neighbors(current);
    // A threshold above one admits nothing, trained table or not.
    if (threshold_ > 1.0) return {};
    if (in.warming_up) return detail::as_vector(neighbors);
    std::vector<ApId> out;
    for (const auto& n : neighbors)
      if (in.probabilities.probability(current, n) >= threshold_) out.push_back(n);
    return out;
  }
  SchemeKind kind() const override { return scheme::Snc{threshold_}; }

 private:
  double threshold_;
};

class NacsPolicy final : public PropagationPolicy {
 public:
  explicit NacsPolicy(NongMode mode) : mode_(mode) {}
  std::vector<ApId> targets(const ApId& current, const PolicyInput& in) const override {
    return detail::as_vector(in.graphs.non_overlap.neighbors(current));
  }
  SchemeKind kind() const override { return scheme::Nacs{mode_}; }
  NongMode mode() const { return mode_; }

 private:
  NongMode mode_;
};

inline std::unique_ptr<PropagationPolicy> make_policy(const SchemeKind& k) {
  struct {
    std::unique_ptr<PropagationPolicy> operator()(const scheme::Reactive&) const { return std::make_unique<ReactivePolicy>(); }
    std::unique_ptr<PropagationPolicy> operator()(const scheme::Pnc&) const { return std::make_unique<PncPolicy>(); }
    std::unique_ptr<PropagationPolicy> operator()(const scheme::Snc& s) const { return std::make_unique<SncPolicy>(s.threshold); }
    std::unique_ptr<PropagationPolicy> operator()(const scheme::Nacs& n) const { return std::make_unique<NacsPolicy>(n.mode); }
  } v;
  return std::visit(v, k);
}

/// `graphs.non_overlap` must already be the NONG for the NACS mode in use.
inline std::vector<ApId> propagation_targets(const SchemeKind& k, const ApId& current, const PolicyInput& in) {
  if (!in.graphs.overlap.has_vertex(current)) throw std::invalid_argument("propagation_targets: unknown access point '" + current + "'");
  return make_policy(k)->targets(current, in);
}

struct ProtocolOptions {
  std::optional<SimTime> cache_ttl;
  std::size_t payload_size = 256;
  SimTime obtain_latency = 4'000;
};

struct ReassociationOutcome {
  std::vector<IappMessage> messages;
  bool hit = false;
  bool full_miss = false;  // neither the new nor the old AP held the context
};

/// Runs a propagation policy over the per-AP caches. Owns the caches, the
/// learned neighbor graph, the handoff table and the derived NONG.
class CachingProtocol {
 public:
  CachingProtocol(const SchemeKind& kind, const Topology& topology, ProtocolOptions options = {},
                  std::optional<ApGraph> initial_neighbors = std::nullopt)
      : kind_(kind),
        policy_(make_policy(kind)),
        options_(options),
        overlap_(build_overlap_graph(topology)),
        neighbor_(initial_neighbors ? std::move(*initial_neighbors) : ApGraph(GraphKind::neighbor, topology.ids())),
        probabilities_(topology.ids()) {
    if (neighbor_.kind() != GraphKind::neighbor || neighbor_.vertices() != topology.ids())
      throw std::invalid_argument("caching protocol: initial neighbor graph does not match the topology");
    for (const auto& ap : topology.aps()) caches_.emplace(ap.id, ApCache(ap.id, options_.cache_ttl));
    refresh_nong();
  }

  CachingProtocol(const CachingProtocol&) = delete;
  CachingProtocol& operator=(const CachingProtocol&) = delete;

  /// First association, or a return to the AP the node last used.
  std::vector<IappMessage> on_associate(const ApId& ap, MnId mn, SimTime now) {
    auto ctx = next_context(ap, mn);
    cache(ap).insert(ctx, now);
    return propagate(ap, ctx, now);
  }

  /// Runs at the new AP: counted lookup, obtain on miss, learn, propagate.
  ReassociationOutcome on_reassociate(const ApId& new_ap, const ApId& old_ap, MnId mn, SimTime now) {
    if (new_ap == old_ap) throw std::invalid_argument("on_reassociate: old and new AP are both '" + new_ap + "'");
    ReassociationOutcome out;
    out.hit = cache(new_ap).lookup(mn, now).has_value();
    if (!out.hit) {
      out.messages.push_back(IappMessage{MessageKind::obtain_request, new_ap, old_ap, mn, 0, now, 0});
      if (auto held = cache(old_ap).peek(mn, now)) {
        out.messages.push_back(IappMessage{MessageKind::obtain_response, old_ap, new_ap, mn, held->payload_size,
                                           now + options_.obtain_latency, held->version});
      } else {
        out.full_miss = true;
      }
    }
    learn(old_ap, new_ap);
    auto ctx = next_context(new_ap, mn);
    cache(new_ap).insert(ctx, now);
    auto notifies = propagate(new_ap, ctx, now);
    out.messages.insert(out.messages.end(), notifies.begin(), notifies.end());
    return out;
  }

  /// Runs at the old AP once the node has moved on: invalidate every target
  /// the old AP propagated to, then drop its own copy.
  std::vector<IappMessage> on_leave(const ApId& old_ap, MnId mn, SimTime now) {
    std::vector<IappMessage> out;
    auto it = records_.find({old_ap, mn});
    if (it == records_.end()) return out;
    const auto rec = std::move(it->second);
    records_.erase(it);
    for (const auto& t : rec.targets)
      out.push_back(IappMessage{MessageKind::cache_invalidate, old_ap, t, mn, 0, now, rec.version});
    cache(old_ap).invalidate(mn, rec.version);
    return out;
  }

  /// Applies a delivered message to the receiving AP's cache.
  void deliver(const IappMessage& m, SimTime now) {
    switch (m.kind) {
      case MessageKind::cache_notify:
      case MessageKind::obtain_response:
        cache(m.to_ap).insert(MobileContext{m.mn_id, m.from_ap, m.version, m.payload_size}, now);
        break;
      case MessageKind::cache_invalidate:
        cache(m.to_ap).invalidate(m.mn_id, m.version);
        break;
      case MessageKind::obtain_request:
        break;
    }
  }

  void set_warming_up(bool w) { warming_up_ = w; }
  bool warming_up() const { return warming_up_; }

  std::vector<ApId> targets(const ApId& ap) const {
    return policy_->targets(ap, PolicyInput{GraphSet{neighbor_, overlap_, nong_}, probabilities_, warming_up_});
  }

  ApCache& cache(const ApId& ap) {
    auto it = caches_.find(ap);
    if (it == caches_.end()) throw std::invalid_argument("caching protocol: unknown access point '" + ap + "'");
    return it->second;
  }
  const std::map<ApId, ApCache>& caches() const { return caches_; }
  const ApGraph& neighbor_graph() const { return neighbor_; }
  const ApGraph& overlap_graph() const { return overlap_; }
  const ApGraph& nong() const { return nong_; }
  const HandoffProbabilityTable& probabilities() const { return probabilities_; }
  const SchemeKind& kind() const { return kind_; }

 private:
  struct PropagationRecord {
    std::vector<ApId> targets;
    std::uint64_t version = 0;
  };

  MobileContext next_context(const ApId& ap, MnId mn) {
    return MobileContext{mn, ap, ++versions_[mn], options_.payload_size};
  }

  std::vector<IappMessage> propagate(const ApId& ap, const MobileContext& ctx, SimTime now) {
    auto ts = targets(ap);
    std::vector<IappMessage> out;
    out.reserve(ts.size());
    for (const auto& t : ts)
      out.push_back(IappMessage{MessageKind::cache_notify, ap, t, ctx.mn_id, ctx.payload_size, now, ctx.version});
    records_[{ap, ctx.mn_id}] = PropagationRecord{std::move(ts), ctx.version};
    return out;
  }

  void learn(const ApId& from, const ApId& to) {
    probabilities_.update(from, to);
    if (neighbor_.add_edge(from, to)) refresh_nong();
  }

  void refresh_nong() {
    const auto* nacs = std::get_if<scheme::Nacs>(&kind_);
    NongMode mode = nacs ? nacs->mode : NongMode::complement;
    if (mode == NongMode::automatic) mode = neighbor_.edge_count() == 0 ? NongMode::complement : NongMode::intersection;
    nong_ = mode == NongMode::complement ? build_nong(overlap_) : build_nong(overlap_, &neighbor_);
  }

  SchemeKind kind_;
  std::unique_ptr<PropagationPolicy> policy_;
  ProtocolOptions options_;
  ApGraph overlap_;
  ApGraph neighbor_;
  ApGraph nong_;
  HandoffProbabilityTable probabilities_;
  std::map<ApId, ApCache> caches_;
  std::map<std::pair<ApId, MnId>, PropagationRecord> records_;
  std::map<MnId, std::uint64_t> versions_;
  bool warming_up_ = false;
};

}  // namespace nacs
