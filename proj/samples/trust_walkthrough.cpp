// Builds two agents from short corpora, lets them talk, and prints how each
// one's trust in the other moves turn by turn.

#include <iomanip>
#include <iostream>

#include "mindmeld/mindmeld.hpp"

int main() {
  using namespace mindmeld;

  ParticipantSpec sailor;
  sailor.id = "sailor";
  sailor.corpus = std::vector<std::string>{"wind and waves on the open sea", "the boat rides the wind"};
  ParticipantSpec farmer;
  farmer.id = "farmer";
  farmer.corpus = std::vector<std::string>{"rain on the fields", "the wind dries the wheat"};

  Session session = Session::create("walkthrough", {sailor, farmer}, SessionConfig{});

  const std::pair<const char*, const char*> turns[] = {
      {"farmer", "The wind brought rain to the fields."},
      {"sailor", "Strong wind makes big waves at sea."},
      {"farmer", "Wheat needs rain, and the wind helps dry it."},
      {"sailor", "The sea was calm, no wind for the boat."},
  };
  std::cout << std::fixed << std::setprecision(3);
  for (auto [speaker, text] : turns) {
    TurnResult turn = session.post_utterance(speaker, text);
    std::cout << speaker << ": " << text << "\n";
    for (const ListenerOutcome& o : turn.listeners) {
      std::cout << "  " << o.listener << " trusts " << speaker << "? match=" << o.trust.match_value
                << " -> " << (o.trust.decision ? "yes" : "no") << "\n";
    }
  }

  std::cout << "\n" << to_dot(*session.agent("sailor").outer_map("farmer"));
}
