#include <gtest/gtest.h>

#include <random>

#include "nacs/iapp.hpp"
#include "nacs/metrics.hpp"

namespace nacs {
namespace {

IappMessage notify(const char* from, const char* to, SimTime at, MnId mn = 1) {
  return {MessageKind::cache_notify, from, to, mn, 256, at, 1};
}

TEST(Validate, RejectsSelfSendAndPayloadMismatch) {
  EXPECT_THROW(validate(notify("A", "A", 0)), std::invalid_argument);
  IappMessage m{MessageKind::cache_invalidate, "A", "B", 1, 256, 0, 1};
  EXPECT_THROW(validate(m), std::invalid_argument);
  EXPECT_THROW(validate(IappMessage{MessageKind::cache_notify, "A", "B", 1, 0, 0, 1}), std::invalid_argument);
}

TEST(CostModel, DefaultsAndOverrides) {
  CostModel c(2.0, 0.5);
  c.set("B", "A", 7.0);
  EXPECT_EQ(c.pair_cost("A", "B"), 7.0);
  EXPECT_EQ(c.pair_cost("A", "C"), 2.0);
  EXPECT_EQ(c.message_cost(notify("A", "B", 0)), 7.5);
  EXPECT_EQ(c.message_cost(IappMessage{MessageKind::obtain_request, "A", "B", 1, 0, 0, 0}), 7.0);
  EXPECT_THROW(c.set("A", "B", -1.0), std::invalid_argument);
  EXPECT_THROW(CostModel(-1.0), std::invalid_argument);
}

TEST(CostModel, ScalingIsLinear) {
  CostModel c(1.5, 0.25);
  c.set("A", "B", 3.0);
  Network n1(c, {}), n2(c.scaled(4.0), {});
  for (SimTime t = 0; t < 10; ++t) {
    n1.send(notify("A", t % 2 ? "B" : "C", t));
    n2.send(notify("A", t % 2 ? "B" : "C", t));
  }
  EXPECT_DOUBLE_EQ(n2.total_cost(), 4.0 * n1.total_cost());
}

TEST(Network, ZeroLatencyDeliversSameInstant) {
  Network n(CostModel{}, LatencyConfig{0, 0});
  EXPECT_EQ(n.send(notify("A", "B", 5)), 5);
  EXPECT_TRUE(n.deliver_due(4).empty());
  EXPECT_EQ(n.deliver_due(5).size(), 1u);
  EXPECT_EQ(n.in_flight(), 0u);
}

TEST(Network, PerPairFifoAcrossKinds) {
  Network n(CostModel{}, LatencyConfig{0, 4000});
  n.send(IappMessage{MessageKind::obtain_response, "A", "B", 1, 256, 0, 1});
  SimTime due = n.send(IappMessage{MessageKind::cache_invalidate, "A", "B", 1, 0, 10, 1});
  EXPECT_EQ(due, 4000);
  auto out = n.deliver_due(4000);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].kind, MessageKind::obtain_response);
  EXPECT_EQ(out[1].kind, MessageKind::cache_invalidate);
}

TEST(Network, OtherPairsAreNotDelayed) {
  Network n(CostModel{}, LatencyConfig{0, 4000});
  n.send(IappMessage{MessageKind::obtain_response, "A", "B", 1, 256, 0, 1});
  EXPECT_EQ(n.send(notify("A", "C", 10)), 10);
}

TEST(Network, ConservationAndLogResum) {
  Network n(CostModel(1.25), LatencyConfig{1000, 4000});
  std::mt19937_64 gen(3);
  const char* aps[] = {"A", "B", "C", "D"};
  for (SimTime t = 0; t < 5000; t += 10) {
    auto a = gen() % 4, b = (a + 1 + gen() % 3) % 4;
    if (gen() % 2) n.send(notify(aps[a], aps[b], t));
    else n.send(IappMessage{MessageKind::obtain_request, aps[a], aps[b], 1, 0, t, 0});
    n.deliver_due(t);
    ASSERT_EQ(n.sent(), n.delivered() + n.in_flight());
  }
  double sum = 0.0;
  for (const auto& r : n.log()) sum += r.cost;
  EXPECT_NEAR(sum, n.total_cost(), 1e-9);
  EXPECT_DOUBLE_EQ(n.cost_of(MessageKind::cache_notify), propagation_cost(n.log(), n.cost_model()));
}

}  // namespace
}  // namespace nacs
