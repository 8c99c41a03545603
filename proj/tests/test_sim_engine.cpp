#include <gtest/gtest.h>

#include <sstream>

#include "nacs/sim_engine.hpp"
#include "test_support.hpp"

namespace nacs {
namespace {

TEST(Scenario, ZeroDurationRejected) {
  auto s = testing::random_scenario(1);
  s.duration_s = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(run(s), ValidationError);
}

TEST(Scenario, OtherValidation) {
  auto s = testing::random_scenario(1);
  s.warmup_fraction = 1.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = testing::random_scenario(1);
  s.mobility.tick = 1e-9;
  EXPECT_THROW(s.validate(), ValidationError);
  s = testing::random_scenario(1);
  s.scheme = scheme::Snc{-0.5};
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Engine, OneSecondAtZeroSpeedHasNoHandoffs) {
  auto s = testing::random_scenario(3);
  s.duration_s = 1.0;
  s.mobility.speed_min = s.mobility.speed_max = 0.0;
  auto r = run(s);
  EXPECT_EQ(r.trace.duration_ticks, 10);
  for (const auto& e : r.trace.events) {
    EXPECT_EQ(e.kind, EventKind::associate);
    EXPECT_EQ(e.tick, 0);
  }
  EXPECT_EQ(r.ledger.c_try(), 0u);
  EXPECT_EQ(r.summary.chp, 0.0);
}

TEST(Engine, DeterministicForAFixedSeed) {
  auto s = testing::random_scenario(5);
  auto a = run(s), b = run(s);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.message_log, b.message_log);
  EXPECT_EQ(a.ledger.per_slot(), b.ledger.per_slot());
}

TEST(Engine, DifferentSeedsDiffer) {
  auto a = testing::random_scenario(5);
  auto b = a;
  b.mobility.seed = 6;
  EXPECT_NE(generate_trace(a), generate_trace(b));
}

TEST(Engine, RunEqualsReplayOfGeneratedTrace) {
  auto s = testing::random_scenario(7, scheme::Nacs{NongMode::intersection});
  auto r = run(s);
  auto q = replay(generate_trace(s), s, s.scheme);
  EXPECT_EQ(r.message_log, q.message_log);
  EXPECT_EQ(r.summary.chp, q.summary.chp);
}

TEST(Engine, ReactiveReplayHasNoHitsOrProactiveCost) {
  auto s = testing::random_scenario(9);
  auto r = replay(generate_trace(s), s, scheme::Reactive{});
  EXPECT_EQ(r.ledger.c_hit(), 0u);
  EXPECT_EQ(r.summary.proactive_cost, 0.0);
  EXPECT_GT(r.ledger.c_try(), 0u);
}

TEST(Engine, LedgerInvariantsHold) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto s = testing::random_scenario(seed, scheme::Snc{0.2});
    auto r = run(s);
    const auto& slots = r.ledger.per_slot();
    ASSERT_EQ(slots.size(), s.slots);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      EXPECT_LE(slots[i].c_hit, slots[i].c_try);
      if (i > 0) {
        EXPECT_GE(slots[i].c_try, slots[i - 1].c_try);
        EXPECT_GE(slots[i].total_cost, slots[i - 1].total_cost);
      }
    }
    EXPECT_EQ(slots.back().c_try, r.ledger.c_try());
    EXPECT_EQ(r.message_log.size(), r.messages_delivered + r.messages_in_flight);
    EXPECT_EQ(r.lookup_log.size(), r.ledger.c_try());
  }
}

TEST(Engine, ConservationAtEveryTick) {
  auto s = testing::random_scenario(4);
  bool ok = true;
  run(s, [&](std::int64_t, const Network& n, const CachingProtocol&, const MetricsLedger& l) {
    ok = ok && n.sent() == n.delivered() + n.in_flight();
    ok = ok && std::abs(n.total_cost() - l.total_cost()) < 1e-9;
  });
  EXPECT_TRUE(ok);
}

TEST(Engine, TopologyMismatchRejected) {
  auto s = testing::random_scenario(2);
  auto trace = generate_trace(s);
  auto other = testing::random_scenario(3);
  EXPECT_THROW(replay(trace, other, scheme::Pnc{}), ValidationError);
}

TEST(Engine, SameTraceCostRatio) {
  auto s = testing::random_scenario(12);
  auto trace = generate_trace(s);
  auto pnc = replay(trace, s, scheme::Pnc{});
  auto nacs = replay(trace, s, scheme::Nacs{NongMode::intersection});
  if (pnc.summary.proactive_cost > 0.0) {
    attach_pnc_ratio(nacs, pnc);
    ASSERT_TRUE(nacs.summary.cost_ratio_vs_pnc);
    EXPECT_DOUBLE_EQ(*nacs.summary.cost_ratio_vs_pnc, nacs.summary.proactive_cost / pnc.summary.proactive_cost);
  }
}

TEST(Engine, ReassociationsIncludeGapHandoffs) {
  Trace t;
  t.events = {{0, 0, EventKind::associate, "", "A"},
              {1, 0, EventKind::disassociate, "A", ""},
              {2, 0, EventKind::associate, "", "B"},
              {3, 0, EventKind::reassociate, "B", "C"},
              {4, 0, EventKind::disassociate, "C", ""},
              {5, 0, EventKind::associate, "", "C"}};
  auto r = reassociations(t);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].from, "A");
  EXPECT_EQ(r[0].to, "B");
  EXPECT_EQ(r[1].from, "B");
  EXPECT_EQ(r[1].to, "C");
}

TEST(SlotEnds, CoverDurationWithRemainderInLastSlot) {
  EXPECT_EQ(slot_end_ticks(100, 4), (std::vector<std::int64_t>{24, 49, 74, 99}));
  EXPECT_EQ(slot_end_ticks(10, 3), (std::vector<std::int64_t>{2, 5, 9}));
  EXPECT_EQ(slot_end_ticks(2, 20), (std::vector<std::int64_t>{0, 1}));
}

TEST(Csv, HeadersAndRowCounts) {
  auto s = testing::random_scenario(6);
  auto r = run(s);
  std::ostringstream ev, msg, met;
  write_event_csv(ev, r.trace);
  write_message_csv(msg, r);
  write_metrics_header(met);
  write_metrics_rows(met, r, 6);
  auto lines = [](const std::string& x) { return static_cast<std::size_t>(std::count(x.begin(), x.end(), '\n')); };
  EXPECT_EQ(ev.str().substr(0, ev.str().find('\n')), "tick,mn_id,event,old_ap,new_ap");
  EXPECT_EQ(lines(ev.str()), r.trace.events.size() + 1);
  EXPECT_EQ(lines(msg.str()), r.message_log.size() + 1);
  EXPECT_EQ(lines(met.str()), s.slots + 1);
}

}  // namespace
}  // namespace nacs
