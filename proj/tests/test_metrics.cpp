#include <gtest/gtest.h>

#include "nacs/metrics.hpp"

namespace nacs {
namespace {

MessageRecord rec(MessageKind k, const char* from, const char* to) {
  return {0, IappMessage{k, from, to, 1, carries_context(k) ? 256u : 0u, 0, 1}, 0.0, 0};
}

TEST(Chp, Examples) {
  EXPECT_EQ(chp(0, 0), 0.0);
  EXPECT_EQ(chp(3, 4), 0.75);
  EXPECT_EQ(chp(5, 5), 1.0);
}

TEST(Ledger, SplitsProactiveAndReactiveCost) {
  MetricsLedger l;
  l.record_message(MessageKind::cache_notify, 2.0);
  l.record_message(MessageKind::cache_invalidate, 1.0);
  l.record_message(MessageKind::obtain_request, 0.5);
  l.record_message(MessageKind::obtain_response, 0.5);
  l.record_lookup(true);
  l.record_lookup(false);
  EXPECT_EQ(l.proactive_cost(), 2.0);
  EXPECT_EQ(l.reactive_cost(), 1.0);
  EXPECT_EQ(l.total_cost(), 4.0);
  EXPECT_EQ(chp(l), 0.5);
  EXPECT_THROW(l.record_message(MessageKind::cache_notify, -1.0), std::invalid_argument);
}

TEST(Ledger, SlotsAreCumulative) {
  MetricsLedger l;
  l.record_lookup(true);
  l.sample(0);
  l.record_lookup(false);
  l.sample(1);
  ASSERT_EQ(l.per_slot().size(), 2u);
  EXPECT_EQ(l.per_slot()[1].c_try, 2u);
  EXPECT_GE(l.per_slot()[1].c_hit, l.per_slot()[0].c_hit);
}

TEST(PropagationCost, CountsNotifiesOnlyAndScales) {
  std::vector<MessageRecord> log = {rec(MessageKind::cache_notify, "A", "B"), rec(MessageKind::cache_notify, "A", "C"),
                                    rec(MessageKind::cache_invalidate, "A", "B"), rec(MessageKind::obtain_request, "B", "A")};
  CostModel c(1.0);
  c.set("A", "C", 3.0);
  EXPECT_EQ(propagation_cost(log, c), 4.0);
  EXPECT_EQ(propagation_cost(log, c.scaled(2.5)), 10.0);
  EXPECT_EQ(propagation_cost({}, c), 0.0);
}

TEST(CostRatio, UndefinedWhenPncCostIsZero) {
  EXPECT_THROW(cost_ratio(1.0, 0.0), UndefinedRatio);
  EXPECT_EQ(cost_ratio(1.0, 4.0), 0.25);
  EXPECT_EQ(cost_ratio(0.0, 4.0), 0.0);
}

TEST(CpMatrix, FrequenciesAndWeightedCost) {
  std::vector<MessageRecord> log = {rec(MessageKind::cache_notify, "A", "B"), rec(MessageKind::cache_notify, "A", "B"),
                                    rec(MessageKind::cache_notify, "A", "C"), rec(MessageKind::cache_notify, "B", "A")};
  std::map<ApId, std::uint64_t> events = {{"A", 4}, {"B", 1}};
  auto cp = cp_matrix(log, events);
  ASSERT_EQ(cp.size(), 3u);
  EXPECT_EQ(cp[0].cp, 0.5);
  EXPECT_EQ(cp[1].cp, 0.25);
  EXPECT_EQ(cp[2].cp, 1.0);
  CostModel c(1.0, 0.5);
  c.set("A", "C", 4.0);
  EXPECT_NEAR(weighted_propagation_cost(cp, c), propagation_cost(log, c), 1e-12);
  EXPECT_THROW(cp_matrix(log, {{"A", 4}}), std::invalid_argument);
}

}  // namespace
}  // namespace nacs
