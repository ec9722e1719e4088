#include <gtest/gtest.h>

#include <random>

#include "mindmeld/trust.hpp"
#include "oracles.hpp"

using namespace mindmeld;

namespace {

MindMap labels_map(std::initializer_list<std::pair<const char*, double>> cells) {
  MindMap map;
  for (auto [label, act] : cells) map.add_cell(label, act);
  return map;
}

std::set<Label> selected_labels(const std::vector<EntityCell>& cells) {
  std::set<Label> out;
  for (const auto& c : cells) out.insert(c.label);
  return out;
}

}  // namespace

TEST(AssignRelevance, UniformActivationRandom) {
  MindMap map = labels_map({{"day", 2.0}, {"sunny", 1.0}});
  assign_relevance(map, RelevanceMode::uniform());
  EXPECT_DOUBLE_EQ(map.find("day")->relevance, 1.0);
  EXPECT_DOUBLE_EQ(map.find("sunny")->relevance, 1.0);

  EXPECT_TRUE(assign_relevance(map, RelevanceMode::activation()));
  EXPECT_DOUBLE_EQ(map.find("day")->relevance, 1.0);
  EXPECT_DOUBLE_EQ(map.find("sunny")->relevance, 0.5);

  MindMap copy = map;
  assign_relevance(map, RelevanceMode::random(42));
  assign_relevance(copy, RelevanceMode::random(42));
  EXPECT_EQ(map, copy);
  for (const auto& [id, cell] : map.cells()) {
    EXPECT_GT(cell.relevance, 0.0);
    EXPECT_LE(cell.relevance, 1.0);
  }
  assign_relevance(copy, RelevanceMode::random(43));
  EXPECT_NE(map, copy);
}

TEST(AssignRelevance, ActivationEdgeCases) {
  MindMap empty;
  EXPECT_THROW(assign_relevance(empty, RelevanceMode::activation()), Error);
  MindMap zeros = labels_map({{"a", 0.0}, {"b", 0.0}});
  EXPECT_FALSE(assign_relevance(zeros, RelevanceMode::activation()));
  EXPECT_DOUBLE_EQ(zeros.find("a")->relevance, 0.0);
}

TEST(SelectCells, TopBottomAndTies) {
  MindMap map = labels_map({{"day", 2.0}, {"sun", 1.0}});
  EXPECT_EQ(selected_labels(select_cells(map, SelectionStrategy::top_k(1))), (std::set<Label>{"day"}));
  EXPECT_EQ(selected_labels(select_cells(map, SelectionStrategy::bottom_k(1))), (std::set<Label>{"sun"}));
  MindMap tied = labels_map({{"b", 1.0}, {"a", 1.0}});
  EXPECT_EQ(selected_labels(select_cells(tied, SelectionStrategy::top_k(1))), (std::set<Label>{"a"}));
  EXPECT_EQ(select_cells(map, SelectionStrategy::top_k(5)).size(), 2u);
  EXPECT_THROW(select_cells(MindMap{}, SelectionStrategy::all()), Error);
}

TEST(SelectCells, RandomKIsSeededSampleWithoutReplacement) {
  MindMap map;
  for (int i = 0; i < 20; ++i) map.add_cell("w" + std::to_string(i), 1.0);
  auto a = select_cells(map, SelectionStrategy::random_k(7, 9));
  auto b = select_cells(map, SelectionStrategy::random_k(7, 9));
  EXPECT_EQ(a, b);
  EXPECT_EQ(selected_labels(a).size(), 7u);
}

TEST(Match, AliceAndBobValues) {
  MindMap alice = labels_map({{"sun", 1}, {"fresh-air", 1}, {"warm", 1}, {"beach", 1}, {"swimming", 1}});
  MindMap alice_for_bob = labels_map({{"sun", 1}, {"shine", 1}, {"beautiful", 1}, {"day", 2}, {"sunny", 1}});
  MindMap bob = labels_map({{"hot", 1}, {"sun", 1}});
  MindMap bob_for_alice = labels_map({{"sun", 1}, {"hot", 1}});
  for (MindMap* m : {&alice, &alice_for_bob, &bob, &bob_for_alice}) assign_relevance(*m, RelevanceMode::uniform());
  EXPECT_DOUBLE_EQ(match_maps(alice, alice_for_bob, SelectionStrategy::all()), 0.2);
  EXPECT_DOUBLE_EQ(match_maps(bob, bob_for_alice, SelectionStrategy::all()), 1.0);
}

TEST(Match, DisjointMapsGiveZero) {
  MindMap x = labels_map({{"a", 1}});
  MindMap y = labels_map({{"b", 1}});
  assign_relevance(x, RelevanceMode::uniform());
  assign_relevance(y, RelevanceMode::uniform());
  EXPECT_EQ(match_maps(x, y, SelectionStrategy::all()), 0.0);
  EXPECT_EQ(match_maps(x, MindMap{}, SelectionStrategy::all()), 0.0);
}

TEST(Match, Errors) {
  MindMap empty;
  MindMap zero = labels_map({{"a", 1}});
  try {
    match_maps(empty, zero, SelectionStrategy::all());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySelfMap);
  }
  try {
    match_maps(zero, zero, SelectionStrategy::all());  // relevance still 0
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySelection);
  }
}

TEST(Match, RandomRelevanceAgreesWithPairwiseOracle) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::uint64_t> seed;
  std::uniform_int_distribution<int> kind(0, 3);
  for (int round = 0; round < 1000; ++round) {
    MindMap self = oracle::random_map(rng, 30, 40);
    MindMap outer = oracle::random_map(rng, 30, 40);
    assign_relevance(self, RelevanceMode::random(seed(rng)));
    assign_relevance(outer, RelevanceMode::random(seed(rng)));
    SelectionStrategy strategy;
    std::size_t k = 1 + static_cast<std::size_t>(round % 10);
    switch (kind(rng)) {
      case 0: strategy = SelectionStrategy::all(); break;
      case 1: strategy = SelectionStrategy::top_k(k); break;
      case 2: strategy = SelectionStrategy::bottom_k(k); break;
      default: strategy = SelectionStrategy::random_k(k, seed(rng)); break;
    }
    std::vector<oracle::WeightedCell> s, o;
    for (const auto& c : select_cells(self, strategy)) s.push_back({c.label, c.relevance});
    for (const auto& [id, c] : outer.cells()) o.push_back({c.label, c.relevance});
    double got = match_maps(self, outer, strategy);
    ASSERT_NEAR(got, oracle::match_pairs(s, o), 1e-12);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(Match, ScalingRelevancesLeavesMatchUnchanged) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> factor(0.05, 1.0);
  for (int round = 0; round < 200; ++round) {
    MindMap self = oracle::random_map(rng, 15, 20);
    MindMap outer = oracle::random_map(rng, 15, 20);
    assign_relevance(self, RelevanceMode::random(round));
    assign_relevance(outer, RelevanceMode::random(round + 1000));
    double before = match_maps(self, outer, SelectionStrategy::all());
    double c = factor(rng);
    for (MindMap* m : {&self, &outer}) {
      for (const auto& [id, cell] : m->cells()) m->set_relevance(id, cell.relevance * c);
    }
    ASSERT_NEAR(match_maps(self, outer, SelectionStrategy::all()), before, 1e-12);
  }
}

TEST(Match, OuterMapGrowthMonotonicity) {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 200; ++round) {
    MindMap self = oracle::random_map(rng, 10, 20);
    MindMap outer = oracle::random_map(rng, 10, 20);
    assign_relevance(self, RelevanceMode::uniform());
    assign_relevance(outer, RelevanceMode::uniform());
    double before = match_maps(self, outer, SelectionStrategy::all());
    MindMap unmatched = outer;
    unmatched.set_relevance(unmatched.add_cell("zz-unmatched", 1.0).id, 1.0);
    ASSERT_EQ(match_maps(self, unmatched, SelectionStrategy::all()), before);
    for (const auto& [id, cell] : self.cells()) {
      if (outer.find(cell.label) == nullptr) {
        MindMap grown = outer;
        grown.set_relevance(grown.add_cell(cell.label, 1.0).id, 1.0);
        ASSERT_GE(match_maps(self, grown, SelectionStrategy::all()), before);
        break;
      }
    }
  }
}

TEST(Gtrust, ThresholdIsInclusive) {
  MindMap alice = labels_map({{"sun", 1}, {"fresh-air", 1}, {"warm", 1}, {"beach", 1}, {"swimming", 1}});
  MindMap heard = labels_map({{"sun", 1}});
  assign_relevance(alice, RelevanceMode::uniform());
  assign_relevance(heard, RelevanceMode::uniform());
  EXPECT_FALSE(gtrust(alice, heard, 0.5, SelectionStrategy::all(), 3).decision);
  EXPECT_TRUE(gtrust(alice, heard, 0.2, SelectionStrategy::all(), 3).decision);
  MindMap bob = labels_map({{"hot", 1}, {"sun", 1}});
  assign_relevance(bob, RelevanceMode::uniform());
  auto report = gtrust(bob, bob, 0.5, SelectionStrategy::all(), 2, "bob", "alice");
  EXPECT_TRUE(report.decision);
  EXPECT_EQ(report.match_value, 1.0);
  EXPECT_EQ(report.tick, 2);
  EXPECT_EQ(report.observer, "bob");
}

TEST(TrustJson, ReportShapeAndRoundTrip) {
  TrustReport report{"alice", "bob", 0.2, false, 0.5, SelectionStrategy::top_k(3), 3};
  Json doc = to_json(report);
  EXPECT_EQ(doc.dump(),
            R"({"observer":"alice","partner":"bob","match":0.2,"decision":"no","alpha":0.5,"strategy":"top_k:3","tick":3})");
  EXPECT_EQ(trust_report_from_json(doc), report);
}

TEST(TextForms, StrategiesAndModes) {
  for (auto s : {SelectionStrategy::all(), SelectionStrategy::top_k(2), SelectionStrategy::bottom_k(4),
                 SelectionStrategy::random_k(3, 11)}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_EQ(parse_strategy("random_k:3", 5), SelectionStrategy::random_k(3, 5));
  EXPECT_THROW(parse_strategy("top_k:0"), Error);
  EXPECT_THROW(parse_strategy("top_k"), Error);
  EXPECT_THROW(parse_strategy("best"), Error);
  EXPECT_EQ(parse_relevance_mode("random", 9), RelevanceMode::random(9));
  EXPECT_EQ(parse_relevance_mode("random:3"), RelevanceMode::random(3));
  EXPECT_EQ(parse_relevance_mode("activation"), RelevanceMode::activation());
  EXPECT_THROW(parse_relevance_mode("fuzzy"), Error);
}
