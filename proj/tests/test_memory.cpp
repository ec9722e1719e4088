#include <gtest/gtest.h>

#include <random>

#include "mindmeld/memory.hpp"

using namespace mindmeld;

namespace {

Skeleton sk(std::vector<Label> labels) { return Skeleton{std::move(labels), 0, 0.0}; }

}  // namespace

TEST(Observe, PromotedOnThirdObservation) {
  MemoryStore store;  // R = 3
  auto e1 = observe(store, {sk({"day", "sun"})}, 1);
  EXPECT_EQ(e1.admitted.size(), 1u);
  auto e2 = observe(store, {sk({"sun", "day"})}, 2);
  EXPECT_EQ(e2.recurred.size(), 1u);
  EXPECT_TRUE(e2.promoted.empty());
  auto e3 = observe(store, {sk({"day", "sun"})}, 3);
  EXPECT_EQ(e3.promoted, (std::vector<Signature>{{"day", "sun"}}));
  EXPECT_TRUE(store.stm().empty());
  ASSERT_EQ(store.ltm().size(), 1u);
  EXPECT_EQ(store.ltm()[0].recurrence, 3);
  EXPECT_EQ(store.ltm()[0].store, Store::kLongTerm);
}

TEST(Observe, TtlEvictsAfterElevenQuietTicks) {
  MemoryStore store;  // D = 10
  observe(store, {sk({"a", "b"})}, 1);
  EXPECT_TRUE(observe(store, {}, 11).evicted.empty());
  auto events = observe(store, {}, 12);
  EXPECT_EQ(events.evicted, (std::vector<Signature>{{"a", "b"}}));
  EXPECT_TRUE(store.stm().empty());
}

TEST(Observe, LruEvictionAtCapacity) {
  MemoryStore store(MemoryConfig{1, 3, 10});
  auto events = observe(store, {sk({"a", "b"}), sk({"c", "d"})}, 1);
  EXPECT_EQ(events.admitted.size(), 2u);
  EXPECT_EQ(events.evicted, (std::vector<Signature>{{"a", "b"}}));
  ASSERT_EQ(store.stm().size(), 1u);
  EXPECT_EQ(store.stm()[0].signature, (Signature{"c", "d"}));
}

TEST(Observe, LruPrefersLeastRecentlySeen) {
  MemoryStore store(MemoryConfig{2, 5, 100});
  observe(store, {sk({"a", "b"})}, 1);
  observe(store, {sk({"c", "d"})}, 2);
  observe(store, {sk({"a", "b"})}, 3);  // refreshes a,b
  auto events = observe(store, {sk({"e", "f"})}, 4);
  EXPECT_EQ(events.evicted, (std::vector<Signature>{{"c", "d"}}));
}

TEST(Observe, LtmRefreshOnlyTouchesLastSeen) {
  MemoryStore store(MemoryConfig{4, 1, 10});
  auto first = observe(store, {sk({"a", "b"})}, 1);
  EXPECT_EQ(first.promoted.size(), 1u);
  auto again = observe(store, {sk({"a", "b"})}, 5);
  EXPECT_TRUE(again.empty());
  EXPECT_EQ(store.ltm()[0].last_seen_tick, 5);
  EXPECT_EQ(store.ltm()[0].first_seen_tick, 1);
}

TEST(Observe, TickRegressionRejected) {
  MemoryStore store;
  observe(store, {}, 5);
  try {
    observe(store, {}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTickRegression);
  }
}

TEST(Observe, RandomStreamsKeepInvariants) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> word(0, 5);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<int> gap(0, 3);
  for (int round = 0; round < 200; ++round) {
    MemoryConfig config{static_cast<std::size_t>(1 + round % 5), 1 + round % 4, round % 7};
    MemoryStore store(config), replay(config);
    std::map<Signature, int> observations;
    Tick tick = 0;
    std::vector<std::pair<std::vector<Skeleton>, Tick>> log;
    for (int step = 0; step < 40; ++step) {
      tick += gap(rng);
      std::vector<Skeleton> batch;
      std::set<Signature> in_batch;
      for (int i = count(rng); i > 0; --i) {
        Signature s = make_signature({"w" + std::to_string(word(rng)), "w" + std::to_string(word(rng) + 6)});
        if (in_batch.insert(s).second) batch.push_back(sk(s));
      }
      log.emplace_back(batch, tick);
      store.observe(batch, tick);
      ASSERT_LE(store.stm().size(), config.stm_capacity);
      std::set<Signature> stm, ltm;
      for (const auto& r : store.stm()) stm.insert(r.signature);
      for (const auto& r : store.ltm()) ltm.insert(r.signature);
      for (const auto& s : stm) ASSERT_FALSE(ltm.count(s));
      for (const auto& r : store.ltm()) ASSERT_GE(r.recurrence, config.promote_recurrence);
      for (const auto& r : store.stm()) ASSERT_LT(r.recurrence, config.promote_recurrence);
    }
    for (const auto& [batch, t] : log) replay.observe(batch, t);
    ASSERT_EQ(store, replay);
  }
}

TEST(Recall, RanksByOverlapThenRecency) {
  MemoryStore store(MemoryConfig{4, 1, 10});
  EXPECT_TRUE(recall(store, {"day"}).empty());
  observe(store, {sk({"day", "sun"})}, 1);
  observe(store, {sk({"day", "hot"})}, 2);
  observe(store, {sk({"beach", "swim"})}, 3);
  auto hits = recall(store, {"day"});
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].signature, (Signature{"day", "hot"}));  // more recent
  hits = recall(store, {"day", "sun"});
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].signature, (Signature{"day", "sun"}));  // 2-overlap
}

TEST(MemoryJson, RoundTrip) {
  MemoryStore store(MemoryConfig{3, 2, 5});
  observe(store, {sk({"a", "b"}), sk({"c", "d"})}, 1);
  observe(store, {sk({"a", "b"})}, 2);
  auto doc = to_json(store);
  EXPECT_EQ(memory_from_json(doc), store);
  EXPECT_EQ(to_json(memory_from_json(doc)).dump(), doc.dump());
}

TEST(MemoryJson, RejectsSignatureInBothStores) {
  Json doc = Json::parse(R"({"stm":[{"signature":["a","b"],"recurrence":1,"first_seen_tick":1,"last_seen_tick":1,"store":"stm"}],
    "ltm":[{"signature":["a","b"],"recurrence":3,"first_seen_tick":1,"last_seen_tick":3,"store":"ltm"}],
    "stm_capacity":32,"promote_recurrence":3,"stm_ttl":10,"last_tick":3})");
  EXPECT_THROW(memory_from_json(doc), Error);
}
