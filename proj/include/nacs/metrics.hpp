#pragma once

// Cache-hit probability, context-propagation cost and the cost ratio against
// PNC, plus the ledger that accumulates them during a run.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nacs/iapp.hpp"

namespace nacs {

/// Cumulative counters at the end of one metric slot.
struct SlotSample {
  std::size_t slot = 0;
  std::uint64_t c_hit = 0;
  std::uint64_t c_try = 0;
  double proactive_cost = 0.0;
  double reactive_cost = 0.0;
  double total_cost = 0.0;

  friend bool operator==(const SlotSample&, const SlotSample&) = default;
};

class MetricsLedger {
 public:
  void record_lookup(bool hit) {
    ++c_try_;
    if (hit) ++c_hit_;
  }

  void record_message(MessageKind kind, double cost) {
    if (cost < 0.0) throw std::invalid_argument("metrics: negative message cost");
    cost_by_kind_[static_cast<std::size_t>(kind)] += cost;
    ++count_by_kind_[static_cast<std::size_t>(kind)];
  }

  void sample(std::size_t slot) {
    per_slot_.push_back(SlotSample{slot, c_hit_, c_try_, proactive_cost(), reactive_cost(), total_cost()});
  }

  std::uint64_t c_hit() const { return c_hit_; }
  std::uint64_t c_try() const { return c_try_; }
  double cost_of(MessageKind k) const { return cost_by_kind_[static_cast<std::size_t>(k)]; }
  std::uint64_t count_of(MessageKind k) const { return count_by_kind_[static_cast<std::size_t>(k)]; }

  /// Cache notifies only: the context pushed ahead of the node.
  double proactive_cost() const { return cost_of(MessageKind::cache_notify); }
  /// The obtain round trips paid on cache misses.
  double reactive_cost() const { return cost_of(MessageKind::obtain_request) + cost_of(MessageKind::obtain_response); }
  double total_cost() const {
    double s = 0.0;
    for (double c : cost_by_kind_) s += c;
    return s;
  }

  const std::vector<SlotSample>& per_slot() const { return per_slot_; }

 private:
  std::uint64_t c_hit_ = 0;
  std::uint64_t c_try_ = 0;
  std::array<double, 4> cost_by_kind_{};
  std::array<std::uint64_t, 4> count_by_kind_{};
  std::vector<SlotSample> per_slot_;
};

inline double chp(std::uint64_t hits, std::uint64_t tries) {
  return tries == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(tries);
}

inline double chp(const MetricsLedger& ledger) { return chp(ledger.c_hit(), ledger.c_try()); }

struct MetricsSummary {
  double chp = 0.0;
  double total_cost = 0.0;
  double proactive_cost = 0.0;
  double reactive_cost = 0.0;
  std::optional<double> cost_ratio_vs_pnc;
};

inline MetricsSummary summarize(const MetricsLedger& ledger) {
  return MetricsSummary{chp(ledger), ledger.total_cost(), ledger.proactive_cost(), ledger.reactive_cost(), std::nullopt};
}

/// Sum of C_ij over every proactive delivery in the log, priced by `cost`.
inline double propagation_cost(const std::vector<MessageRecord>& log, const CostModel& cost) {
  double s = 0.0;
  for (const auto& r : log)
    if (r.msg.kind == MessageKind::cache_notify) s += cost.message_cost(r.msg);
  return s;
}

class UndefinedRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double cost_ratio(double scheme_proactive_cost, double pnc_proactive_cost) {
  if (!(pnc_proactive_cost > 0.0)) throw UndefinedRatio("cost ratio undefined: PNC proactive cost is zero");
  return scheme_proactive_cost / pnc_proactive_cost;
}

inline double cost_ratio(const MetricsSummary& scheme, const MetricsSummary& pnc) {
  return cost_ratio(scheme.proactive_cost, pnc.proactive_cost);
}

/// Empirical delivery frequency CP_ij: the fraction of propagation events at
/// AP i that pushed the context to AP j.
struct CpEntry {
  ApId from;
  ApId to;
  std::uint64_t deliveries = 0;
  std::uint64_t events = 0;
  double cp = 0.0;
};

inline std::vector<CpEntry> cp_matrix(const std::vector<MessageRecord>& log,
                                      const std::map<ApId, std::uint64_t>& propagation_events) {
  std::map<std::pair<ApId, ApId>, std::uint64_t> deliveries;
  for (const auto& r : log)
    if (r.msg.kind == MessageKind::cache_notify) ++deliveries[{r.msg.from_ap, r.msg.to_ap}];
  std::vector<CpEntry> out;
  for (const auto& [pair, n] : deliveries) {
    auto it = propagation_events.find(pair.first);
    if (it == propagation_events.end() || it->second == 0)
      throw std::invalid_argument("cp_matrix: deliveries from '" + pair.first + "' without propagation events");
    out.push_back(CpEntry{pair.first, pair.second, n, it->second, static_cast<double>(n) / static_cast<double>(it->second)});
  }
  return out;
}

/// Sum over pairs of C_ij * CP_ij, weighted by the number of propagation
/// events at i. Equals propagation_cost() over the same log.
inline double weighted_propagation_cost(const std::vector<CpEntry>& cp, const CostModel& cost) {
  double s = 0.0;
  for (const auto& e : cp) {
    IappMessage probe{MessageKind::cache_notify, e.from, e.to, 0, 1, 0, 0};
    s += cost.message_cost(probe) * e.cp * static_cast<double>(e.events);
  }
  return s;
}

}  // namespace nacs
