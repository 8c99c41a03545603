#pragma once

// Simulated inter-AP message plane: typed IAPP messages, the per-pair cost
// model, fixed per-kind latency, and FIFO delivery with a full send log.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "nacs/mobility.hpp"
#include "nacs/topology.hpp"
#include "nacs/units.hpp"

namespace nacs {

enum class MessageKind : std::uint8_t { cache_notify, cache_invalidate, obtain_request, obtain_response };

inline constexpr std::array<MessageKind, 4> kAllMessageKinds = {
    MessageKind::cache_notify, MessageKind::cache_invalidate, MessageKind::obtain_request, MessageKind::obtain_response};

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::cache_notify: return "cache_notify";
    case MessageKind::cache_invalidate: return "cache_invalidate";
    case MessageKind::obtain_request: return "obtain_request";
    case MessageKind::obtain_response: return "obtain_response";
  }
  return "?";
}

inline bool carries_context(MessageKind k) {
  return k == MessageKind::cache_notify || k == MessageKind::obtain_response;
}

struct IappMessage {
  MessageKind kind = MessageKind::cache_notify;
  ApId from_ap;
  ApId to_ap;
  MnId mn_id = 0;
  std::size_t payload_size = 0;  // bytes; nonzero only for context-carrying kinds
  SimTime sent_at = 0;
  std::uint64_t version = 0;  // context version carried or invalidated

  friend bool operator==(const IappMessage&, const IappMessage&) = default;
};

inline void validate(const IappMessage& m) {
  if (m.from_ap == m.to_ap) throw std::invalid_argument("iapp: message from '" + m.from_ap + "' to itself");
  if (carries_context(m.kind) != (m.payload_size > 0))
    throw std::invalid_argument(std::string("iapp: bad payload size for ") + to_string(m.kind));
}

/// Symmetric per-pair transfer cost with a uniform default.
class CostModel {
 public:
  CostModel() = default;
  explicit CostModel(double default_cost, double security_overhead = 0.0)
      : default_cost_(default_cost), security_overhead_(security_overhead) {
    if (!(default_cost >= 0.0)) throw std::invalid_argument("cost model: default cost must be >= 0");
    if (!(security_overhead >= 0.0)) throw std::invalid_argument("cost model: security overhead must be >= 0");
  }

  void set(const ApId& a, const ApId& b, double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("cost model: pair cost must be >= 0");
    if (a == b) throw std::invalid_argument("cost model: pair cost on a single AP");
    pairs_[make_edge(a, b)] = c;
  }

  double pair_cost(const ApId& a, const ApId& b) const {
    auto it = pairs_.find(make_edge(a, b));
    return it == pairs_.end() ? default_cost_ : it->second;
  }

  /// Pair cost plus the constant security overhead charged on every cache notify.
  double message_cost(const IappMessage& m) const {
    double c = pair_cost(m.from_ap, m.to_ap);
    if (m.kind == MessageKind::cache_notify) c += security_overhead_;
    return c;
  }

  CostModel scaled(double lambda) const {
    CostModel out(default_cost_ * lambda, security_overhead_ * lambda);
    for (const auto& [e, c] : pairs_) out.pairs_[e] = c * lambda;
    return out;
  }

  double default_cost() const { return default_cost_; }
  double security_overhead() const { return security_overhead_; }
  const std::map<Edge, double>& pairs() const { return pairs_; }

 private:
  double default_cost_ = 1.0;
  double security_overhead_ = 0.0;
  std::map<Edge, double> pairs_;
};

struct LatencyConfig {
  SimTime proactive = 0;       // cache_notify and cache_invalidate
  SimTime obtain = 4'000;      // each direction of the obtain round trip

  SimTime of(MessageKind k) const {
    return (k == MessageKind::obtain_request || k == MessageKind::obtain_response) ? obtain : proactive;
  }
};

/// One line of the message log.
struct MessageRecord {
  std::uint64_t seq = 0;
  IappMessage msg;
  double cost = 0.0;
  SimTime deliver_at = 0;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// Lossless message plane. Delivery order is (delivery time, send order) and
/// per-pair FIFO is preserved even across kinds with different latencies.
class Network {
 public:
  Network(CostModel cost, LatencyConfig latency) : cost_(std::move(cost)), latency_(latency) {}

  SimTime send(const IappMessage& msg) {
    validate(msg);
    SimTime due = msg.sent_at + latency_.of(msg.kind);
    auto& last = last_delivery_[{msg.from_ap, msg.to_ap}];
    due = std::max(due, last);
    last = due;
    double c = cost_.message_cost(msg);
    cost_by_kind_[static_cast<std::size_t>(msg.kind)] += c;
    MessageRecord rec{next_seq_++, msg, c, due};
    queue_.push(rec);
    log_.push_back(std::move(rec));
    return due;
  }

  std::vector<IappMessage> deliver_due(SimTime now) {
    std::vector<IappMessage> out;
    while (!queue_.empty() && queue_.top().deliver_at <= now) {
      out.push_back(queue_.top().msg);
      queue_.pop();
      ++delivered_;
    }
    return out;
  }

  std::uint64_t sent() const { return next_seq_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t in_flight() const { return queue_.size(); }

  double cost_of(MessageKind k) const { return cost_by_kind_[static_cast<std::size_t>(k)]; }
  double total_cost() const {
    double s = 0.0;
    for (double c : cost_by_kind_) s += c;
    return s;
  }

  const std::vector<MessageRecord>& log() const { return log_; }
  const CostModel& cost_model() const { return cost_; }
  const LatencyConfig& latency() const { return latency_; }

 private:
  struct Later {
    bool operator()(const MessageRecord& a, const MessageRecord& b) const {
      return a.deliver_at != b.deliver_at ? a.deliver_at > b.deliver_at : a.seq > b.seq;
    }
  };

  CostModel cost_;
  LatencyConfig latency_;
  std::priority_queue<MessageRecord, std::vector<MessageRecord>, Later> queue_;
  std::map<std::pair<ApId, ApId>, SimTime> last_delivery_;
  std::vector<MessageRecord> log_;
  std::array<double, 4> cost_by_kind_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t delivered_ = 0;
};

}  // namespace nacs
