#pragma once

// Per-AP context cache: the structure an AP consults when a mobile node
// re-associates, and the one cache-notify / cache-invalidate messages edit.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "nacs/mobility.hpp"
#include "nacs/topology.hpp"
#include "nacs/units.hpp"

namespace nacs {

/// The transferable per-client state. The payload itself is never inspected,
/// only its size matters for byte-volume accounting.
struct MobileContext {
  MnId mn_id = 0;
  ApId origin_ap;
  std::uint64_t version = 0;
  std::size_t payload_size = 256;

  friend bool operator==(const MobileContext&, const MobileContext&) = default;
};

enum class InsertOutcome { inserted, replaced, stale };

class ApCache {
 public:
  explicit ApCache(ApId owner, std::optional<SimTime> ttl = std::nullopt) : owner_(std::move(owner)), ttl_(ttl) {}

  const ApId& owner() const { return owner_; }
  const std::optional<SimTime>& ttl() const { return ttl_; }

  /// Keeps the newer of the stored and offered context; equal versions
  /// refresh the insertion time. An expired entry counts as absent.
  InsertOutcome insert(const MobileContext& ctx, SimTime now) {
    auto it = entries_.find(ctx.mn_id);
    if (it != entries_.end() && expired(it->second, now)) {
      entries_.erase(it);
      it = entries_.end();
    }
    if (it == entries_.end()) {
      entries_.emplace(ctx.mn_id, Entry{ctx, now});
      return InsertOutcome::inserted;
    }
    if (ctx.version < it->second.ctx.version) {
      ++stale_inserts_;
      return InsertOutcome::stale;
    }
    it->second = Entry{ctx, now};
    return InsertOutcome::replaced;
  }

  /// Counted lookup: every call is a try, every live entry a hit.
  std::optional<MobileContext> lookup(MnId mn, SimTime now) {
    ++tries_;
    auto found = peek(mn, now);
    if (found) ++hits_;
    return found;
  }

  /// Uncounted lookup. Expired entries are dropped either way.
  std::optional<MobileContext> peek(MnId mn, SimTime now) {
    auto it = entries_.find(mn);
    if (it == entries_.end()) return std::nullopt;
    if (expired(it->second, now)) {
      entries_.erase(it);
      return std::nullopt;
    }
    return it->second.ctx;
  }

  bool invalidate(MnId mn) { return entries_.erase(mn) != 0; }

  /// Removes the entry only if it is not newer than `up_to_version`, so a late
  /// invalidation cannot destroy a context that was re-propagated meanwhile.
  bool invalidate(MnId mn, std::uint64_t up_to_version) {
    auto it = entries_.find(mn);
    if (it == entries_.end() || it->second.ctx.version > up_to_version) return false;
    entries_.erase(it);
    return true;
  }

  std::size_t size() const { return entries_.size(); }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t tries() const { return tries_; }
  std::uint64_t stale_inserts() const { return stale_inserts_; }

 private:
  struct Entry {
    MobileContext ctx;
    SimTime inserted_at;
  };

  bool expired(const Entry& e, SimTime now) const { return ttl_ && now - e.inserted_at > *ttl_; }

  ApId owner_;
  std::optional<SimTime> ttl_;
  std::map<MnId, Entry> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t tries_ = 0;
  std::uint64_t stale_inserts_ = 0;
};

}  // namespace nacs
