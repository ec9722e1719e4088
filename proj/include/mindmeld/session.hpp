#pragma once

// Conversations between agents. Each agent owns a frozen self map and one
// outer map per partner, built only from that partner's utterances. Every
// processed utterance advances the session clock by one.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mindmeld/config.hpp"
#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/lexer.hpp"
#include "mindmeld/memory.hpp"
#include "mindmeld/mindmap.hpp"
#include "mindmeld/trust.hpp"

namespace mindmeld {

using AgentId = std::string;

/// How a participant's self map is seeded: an explicit graph document or a
/// profile corpus replayed through lexer + merge. Exactly one must be given.
struct ParticipantSpec {
  AgentId id;
  std::optional<Json> graph;
  std::optional<std::vector<std::string>> corpus;
  std::optional<double> alpha;
  std::map<AgentId, double> alpha_by_partner;
  std::optional<SelectionStrategy> strategy;
  std::optional<RelevanceMode> relevance_mode;
};

struct Agent {
  AgentId id;
  MindMap self_map;
  std::map<AgentId, MindMap> outer_maps;
  std::map<AgentId, MemoryStore> memory;
  double default_alpha = 0.5;
  std::map<AgentId, double> alpha_by_partner;
  SelectionStrategy strategy;
  RelevanceMode relevance_mode;

  double alpha_for(const AgentId& partner) const {
    auto it = alpha_by_partner.find(partner);
    return it == alpha_by_partner.end() ? default_alpha : it->second;
  }

  const MindMap* outer_map(const AgentId& partner) const {
    auto it = outer_maps.find(partner);
    return it == outer_maps.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Agent&, const Agent&) = default;
};

struct Utterance {
  AgentId speaker;
  std::string text;
  Tick tick = 0;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct ListenerOutcome {
  AgentId listener;
  std::optional<MergeReport> merge;
  ForgetReport forgotten;
  std::vector<Skeleton> skeletons;
  MemoryEvents memory;
  TrustReport trust;
};

struct TurnResult {
  Utterance utterance;
  std::vector<Label> labels;
  std::vector<ListenerOutcome> listeners;
};

struct AgentSettings {
  std::optional<AgentId> partner;  // alpha override applies to this partner only
  std::optional<double> alpha;
  std::optional<SelectionStrategy> strategy;
  std::optional<RelevanceMode> relevance_mode;
};

class Session {
 public:
  static Session create(std::string id, const std::vector<ParticipantSpec>& specs, SessionConfig config) {
    validate(config);
    if (specs.size() < 2) {
      throw Error(ErrorCode::kTooFewParticipants, "a session needs at least 2 participants");
    }
    Session session;
    session.id_ = std::move(id);
    session.config_ = std::move(config);
    for (const ParticipantSpec& spec : specs) {
      if (spec.id.empty()) throw Error(ErrorCode::kInvalidSeed, "participant id is empty");
      if (session.find_agent(spec.id) != nullptr) {
        throw Error(ErrorCode::kDuplicateAgentId, "participant \"" + spec.id + "\" listed twice");
      }
      session.agents_.push_back(session.make_agent(spec));
    }
    for (const Agent& agent : session.agents_) {
      for (const auto& [partner, alpha] : agent.alpha_by_partner) {
        if (session.find_agent(partner) == nullptr || partner == agent.id) {
          throw Error(ErrorCode::kInvalidSeed, agent.id + ": alpha override for unknown partner \"" + partner + "\"");
        }
      }
    }
    return session;
  }

  const std::string& id() const noexcept { return id_; }
  Tick tick() const noexcept { return tick_; }
  const SessionConfig& config() const noexcept { return config_; }
  const std::vector<Agent>& agents() const noexcept { return agents_; }
  const std::vector<Utterance>& transcript() const noexcept { return transcript_; }

  const Agent* find_agent(std::string_view id) const {
    auto it = std::find_if(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.id == id; });
    return it == agents_.end() ? nullptr : &*it;
  }

  const Agent& agent(std::string_view id) const {
    if (const Agent* found = find_agent(id)) return *found;
    throw Error(ErrorCode::kUnknownAgent, "no participant \"" + std::string(id) + "\"");
  }

  TurnResult post_utterance(std::string_view speaker, std::string_view text) {
    if (find_agent(speaker) == nullptr) {
      throw Error(ErrorCode::kUnknownSpeaker, "speaker \"" + std::string(speaker) + "\" is not a participant");
    }
    ++tick_;
    TurnResult result;
    result.utterance = Utterance{std::string(speaker), std::string(text), tick_};
    result.labels = lex(text, config_.lexicon);
    const MiniNetwork mini = build_mini_network(result.labels, config_.engine.window_size, tick_);

    for (Agent& listener : agents_) {
      if (listener.id == speaker) continue;
      ListenerOutcome outcome;
      outcome.listener = listener.id;
      MindMap& outer = listener.outer_maps[std::string(speaker)];
      MemoryStore& memory = listener.memory.try_emplace(std::string(speaker), config_.memory).first->second;
      if (!mini.empty()) {
        outer.set_tick(tick_);
        outcome.merge = outer.merge(mini, config_.engine);
        outcome.forgotten = outer.decay(mini.labels, config_.engine);
        outcome.skeletons = outer.skeletons(config_.engine);
        outcome.memory = memory.observe(outcome.skeletons, tick_);
      }
      outcome.trust = evaluate(listener, std::string(speaker));
      result.listeners.push_back(std::move(outcome));
    }
    transcript_.push_back(result.utterance);
    return result;
  }

  TrustReport trust_between(std::string_view observer, std::string_view partner) const {
    if (observer == partner) throw Error(ErrorCode::kInvalidPair, "an agent has no trust in itself");
    const Agent& p = agent(observer);
    agent(partner);
    if (p.outer_map(std::string(partner)) == nullptr) {
      throw Error(ErrorCode::kNoOuterMap, std::string(partner) + " has not spoken to " + std::string(observer));
    }
    return evaluate(p, std::string(partner));
  }

  void configure_agent(std::string_view id, const AgentSettings& settings) {
    Agent& target = mutable_agent(id);
    if (settings.alpha) validate_alpha(*settings.alpha);
    if (settings.partner) {
      if (*settings.partner == target.id || find_agent(*settings.partner) == nullptr) {
        throw Error(ErrorCode::kUnknownAgent, "no partner \"" + *settings.partner + "\"");
      }
    }
    if (settings.relevance_mode) check_relevance_usable(target.self_map, *settings.relevance_mode, target.id);
    if (settings.alpha) {
      if (settings.partner) {
        target.alpha_by_partner[*settings.partner] = *settings.alpha;
      } else {
        target.default_alpha = *settings.alpha;
      }
    }
    if (settings.strategy) target.strategy = *settings.strategy;
    if (settings.relevance_mode) target.relevance_mode = *settings.relevance_mode;
  }

  /// Tooling only: conversations assume frozen self maps.
  void set_self_frozen(std::string_view id, bool frozen) {
    Agent& target = mutable_agent(id);
    frozen ? target.self_map.freeze() : target.self_map.unfreeze();
  }

  /// Reassembles a session from its serialized parts (see session_from_json).
  static Session from_parts(std::string id, SessionConfig config, std::vector<Agent> agents,
                            std::vector<Utterance> transcript, Tick tick) {
    if (static_cast<Tick>(transcript.size()) != tick) {
      throw Error(ErrorCode::kMalformedSnapshot, "session tick must equal transcript length");
    }
    if (agents.size() < 2) throw Error(ErrorCode::kMalformedSnapshot, "session needs at least 2 agents");
    Session session;
    session.id_ = std::move(id);
    session.config_ = std::move(config);
    session.agents_ = std::move(agents);
    session.transcript_ = std::move(transcript);
    session.tick_ = tick;
    for (const Utterance& u : session.transcript_) {
      if (session.find_agent(u.speaker) == nullptr) {
        throw Error(ErrorCode::kMalformedSnapshot, "transcript speaker \"" + u.speaker + "\" is not a participant");
      }
    }
    return session;
  }

  friend bool operator==(const Session&, const Session&) = default;

 private:
  Session() = default;

  Agent& mutable_agent(std::string_view id) {
    auto it = std::find_if(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.id == id; });
    if (it == agents_.end()) throw Error(ErrorCode::kUnknownAgent, "no participant \"" + std::string(id) + "\"");
    return *it;
  }

  // Activation relevance on an all-zero self map would leave every selection
  // with zero mass; reject it up front so a turn can never fail half-applied.
  static void check_relevance_usable(const MindMap& self_map, const RelevanceMode& mode, const AgentId& id) {
    if (mode.kind != RelevanceMode::Kind::kActivation) return;
    for (const auto& [cid, cell] : self_map.cells()) {
      if (cell.activation > 0.0) return;
    }
    throw Error(ErrorCode::kInvalidSeed, id + ": activation relevance needs a self map with positive activation");
  }

  Agent make_agent(const ParticipantSpec& spec) const {
    Agent agent;
    agent.id = spec.id;
    if (spec.graph.has_value() == spec.corpus.has_value()) {
      throw Error(ErrorCode::kInvalidSeed, spec.id + ": provide exactly one of graph or corpus");
    }
    if (spec.graph) {
      try {
        agent.self_map = restore(*spec.graph);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidSeed, spec.id + ": " + e.what());
      }
    } else {
      Tick seed_tick = 0;
      for (const std::string& line : *spec.corpus) {
        auto labels = lex(line, config_.lexicon);
        MiniNetwork mini = build_mini_network(labels, config_.engine.window_size, ++seed_tick);
        agent.self_map.set_tick(seed_tick);
        if (!mini.empty()) agent.self_map.merge(mini, config_.engine);
      }
    }
    if (agent.self_map.empty()) throw Error(ErrorCode::kInvalidSeed, spec.id + ": self map is empty");
    agent.self_map.freeze();

    agent.default_alpha = spec.alpha.value_or(config_.default_alpha);
    validate_alpha(agent.default_alpha);
    for (const auto& [partner, alpha] : spec.alpha_by_partner) validate_alpha(alpha);
    agent.alpha_by_partner = spec.alpha_by_partner;
    agent.strategy = spec.strategy.value_or(config_.default_strategy);
    agent.relevance_mode = spec.relevance_mode.value_or(config_.relevance_mode);
    check_relevance_usable(agent.self_map, agent.relevance_mode, agent.id);
    return agent;
  }

  /// Relevance is assigned on copies so the frozen self map stays untouched.
  TrustReport evaluate(const Agent& observer, const AgentId& partner) const {
    MindMap self_view = observer.self_map;
    MindMap outer_view = observer.outer_maps.at(partner);
    RelevanceMode self_mode = observer.relevance_mode;
    RelevanceMode outer_mode = observer.relevance_mode;
    if (self_mode.kind == RelevanceMode::Kind::kRandom) {
      self_mode.seed = derive_seed(self_mode.seed, "self:" + observer.id);
      outer_mode.seed = derive_seed(outer_mode.seed, "outer:" + observer.id + ":" + partner);
    }
    assign_relevance(self_view, self_mode);
    if (!outer_view.empty()) assign_relevance(outer_view, outer_mode);
    return gtrust(self_view, outer_view, observer.alpha_for(partner), observer.strategy, tick_, observer.id,
                  partner);
  }

  std::string id_;
  SessionConfig config_;
  std::vector<Agent> agents_;
  std::vector<Utterance> transcript_;
  Tick tick_ = 0;
};

inline Session create_session(std::string id, const std::vector<ParticipantSpec>& specs, SessionConfig config) {
  return Session::create(std::move(id), specs, std::move(config));
}

inline TurnResult post_utterance(Session& session, std::string_view speaker, std::string_view text) {
  return session.post_utterance(speaker, text);
}

inline TrustReport trust_between(const Session& session, std::string_view observer, std::string_view partner) {
  return session.trust_between(observer, partner);
}

// --------------------------------------------------------------------------
// JSON

namespace detail {

inline Json pairs_to_json(const std::vector<LabelPair>& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back(Json::array({a, b}));
  return out;
}

inline Json signatures_to_json(const std::vector<Signature>& signatures) {
  Json out = Json::array();
  for (const auto& s : signatures) out.push_back(s);
  return out;
}

}  // namespace detail

inline Json to_json(const MergeReport& report) {
  return Json{{"created_cells", report.created_cells},
              {"reactivated_cells", report.reactivated_cells},
              {"created_associations", detail::pairs_to_json(report.created_associations)},
              {"reinforced_associations", detail::pairs_to_json(report.reinforced_associations)}};
}

inline Json to_json(const ForgetReport& report) {
  return Json{{"associations", detail::pairs_to_json(report.associations)}, {"cells", report.cells}};
}

inline Json to_json(const MemoryEvents& events) {
  return Json{{"admitted", detail::signatures_to_json(events.admitted)},
              {"recurred", detail::signatures_to_json(events.recurred)},
              {"promoted", detail::signatures_to_json(events.promoted)},
              {"evicted", detail::signatures_to_json(events.evicted)}};
}

inline Json to_json(const Skeleton& skeleton) {
  return Json{{"labels", skeleton.labels},
              {"tick", skeleton.tick},
              {"total_activation", json_util::real(skeleton.total_activation)}};
}

inline Json to_json(const TurnResult& turn) {
  Json listeners = Json::array();
  for (const ListenerOutcome& o : turn.listeners) {
    Json skeletons = Json::array();
    for (const auto& s : o.skeletons) skeletons.push_back(to_json(s));
    listeners.push_back(Json{{"listener", o.listener},
                             {"merge", o.merge ? to_json(*o.merge) : Json(nullptr)},
                             {"forgotten", to_json(o.forgotten)},
                             {"skeletons", std::move(skeletons)},
                             {"memory", to_json(o.memory)},
                             {"trust", to_json(o.trust)}});
  }
  return Json{{"tick", turn.utterance.tick},
              {"speaker", turn.utterance.speaker},
              {"text", turn.utterance.text},
              {"labels", turn.labels},
              {"listeners", std::move(listeners)}};
}

inline Json to_json(const Agent& agent) {
  Json alphas = Json::object();
  for (const auto& [partner, alpha] : agent.alpha_by_partner) alphas[partner] = json_util::real(alpha);
  Json outer = Json::object();
  for (const auto& [partner, map] : agent.outer_maps) outer[partner] = snapshot(map);
  Json memory = Json::object();
  for (const auto& [partner, store] : agent.memory) memory[partner] = to_json(store);
  return Json{{"id", agent.id},
              {"alpha", json_util::real(agent.default_alpha)},
              {"alpha_by_partner", std::move(alphas)},
              {"strategy", to_string(agent.strategy)},
              {"relevance_mode", to_string(agent.relevance_mode)},
              {"self", snapshot(agent.self_map)},
              {"outer", std::move(outer)},
              {"memory", std::move(memory)}};
}

inline Json to_json(const Session& session) {
  Json agents = Json::array();
  for (const Agent& agent : session.agents()) agents.push_back(to_json(agent));
  Json transcript = Json::array();
  for (const Utterance& u : session.transcript()) {
    transcript.push_back(Json{{"speaker", u.speaker}, {"text", u.text}, {"tick", u.tick}});
  }
  return Json{{"id", session.id()},
              {"tick", session.tick()},
              {"config", to_json(session.config())},
              {"agents", std::move(agents)},
              {"transcript", std::move(transcript)}};
}

inline Session session_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kMalformedSnapshot;
  reject_unknown_keys(doc, {"id", "tick", "config", "agents", "transcript"}, "session", kCode);
  SessionConfig config;
  try {
    config = session_config_from_json(require(doc, "config", "session", kCode));
  } catch (const Error& e) {
    throw Error(kCode, std::string("session.config: ") + e.what());
  }

  std::vector<Agent> agents;
  const Json& agent_docs = require(doc, "agents", "session", kCode);
  if (!agent_docs.is_array()) throw Error(kCode, "session.agents: expected an array");
  for (const Json& a : agent_docs) {
    reject_unknown_keys(a, {"id", "alpha", "alpha_by_partner", "strategy", "relevance_mode", "self", "outer", "memory"},
                        "session.agents[]", kCode);
    Agent agent;
    agent.id = require_string(a, "id", "agent", kCode);
    const std::string where = "agent " + agent.id;
    agent.default_alpha = require_number(a, "alpha", where, kCode);
    try {
      validate_alpha(agent.default_alpha);
      for (const auto& item : require(a, "alpha_by_partner", where, kCode).items()) {
        if (!item.value().is_number()) throw Error(kCode, where + ".alpha_by_partner: expected numbers");
        agent.alpha_by_partner[item.key()] = item.value().get<double>();
        validate_alpha(agent.alpha_by_partner[item.key()]);
      }
      agent.strategy = parse_strategy(require_string(a, "strategy", where, kCode));
      agent.relevance_mode = parse_relevance_mode(require_string(a, "relevance_mode", where, kCode));
    } catch (const Error& e) {
      throw Error(kCode, where + ": " + e.what());
    }
    agent.self_map = restore(require(a, "self", where, kCode));
    for (const auto& item : require(a, "outer", where, kCode).items()) {
      agent.outer_maps.emplace(item.key(), restore(item.value()));
    }
    for (const auto& item : require(a, "memory", where, kCode).items()) {
      agent.memory.emplace(item.key(), memory_from_json(item.value()));
    }
    agents.push_back(std::move(agent));
  }

  std::vector<Utterance> transcript;
  const Json& lines = require(doc, "transcript", "session", kCode);
  if (!lines.is_array()) throw Error(kCode, "session.transcript: expected an array");
  for (const Json& line : lines) {
    reject_unknown_keys(line, {"speaker", "text", "tick"}, "session.transcript[]", kCode);
    transcript.push_back(Utterance{require_string(line, "speaker", "utterance", kCode),
                                   require_string(line, "text", "utterance", kCode),
                                   require_integer(line, "tick", "utterance", kCode)});
  }
  return Session::from_parts(require_string(doc, "id", "session", kCode), std::move(config), std::move(agents),
                             std::move(transcript), require_integer(doc, "tick", "session", kCode));
}

/// Seeds document: {"participants":[{"id", "graph"|"corpus", "alpha"?, "alpha_by_partner"?,
/// "strategy"?, "relevance_mode"?}]}. Strategy and relevance strings may omit
/// their seed, in which case `default_seed` is used.
inline std::vector<ParticipantSpec> participants_from_json(const Json& doc, std::uint64_t default_seed = 0) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  const Json* list = &doc;
  if (doc.is_object()) {
    reject_unknown_keys(doc, {"participants"}, "seeds", kCode);
    list = &require(doc, "participants", "seeds", kCode);
  }
  if (!list->is_array()) throw Error(kCode, "seeds.participants: expected an array");
  std::vector<ParticipantSpec> specs;
  for (const Json& p : *list) {
    reject_unknown_keys(p, {"id", "graph", "corpus", "alpha", "alpha_by_partner", "strategy", "relevance_mode"},
                        "seeds.participants[]", kCode);
    ParticipantSpec spec;
    spec.id = require_string(p, "id", "participant", kCode);
    const std::string where = "participant " + spec.id;
    if (p.contains("graph")) spec.graph = p.at("graph");
    try {
      if (p.contains("corpus")) spec.corpus = p.at("corpus").get<std::vector<std::string>>();
      if (p.contains("alpha_by_partner")) {
        spec.alpha_by_partner = p.at("alpha_by_partner").get<std::map<AgentId, double>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(kCode, where + ": " + e.what());
    }
    if (p.contains("alpha")) spec.alpha = require_number(p, "alpha", where, kCode);
    if (p.contains("strategy")) spec.strategy = parse_strategy(require_string(p, "strategy", where, kCode), default_seed);
    if (p.contains("relevance_mode")) {
      spec.relevance_mode = parse_relevance_mode(require_string(p, "relevance_mode", where, kCode), default_seed);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace mindmeld
