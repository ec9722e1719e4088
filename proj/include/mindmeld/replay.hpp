#pragma once

// Transcript replay and the human-readable demo trace used by the CLI.

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mindmeld/config.hpp"
#include "mindmeld/dot.hpp"
#include "mindmeld/error.hpp"
#include "mindmeld/fixtures.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/session.hpp"

namespace mindmeld {

struct TranscriptLine {
  AgentId speaker;
  std::string text;
};

/// JSON-lines, one {"speaker","text"} object per non-blank line.
inline std::vector<TranscriptLine> parse_transcript(std::string_view text) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  std::vector<TranscriptLine> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "transcript line " + std::to_string(line_no);
    Json doc = parse(line, where, kCode);
    reject_unknown_keys(doc, {"speaker", "text"}, where, kCode);
    lines.push_back({require_string(doc, "speaker", where, kCode), require_string(doc, "text", where, kCode)});
  }
  return lines;
}

/// Final trust of every observer toward every partner it has heard, in participant order.
inline std::vector<TrustReport> final_trust(const Session& session) {
  std::vector<TrustReport> reports;
  for (const Agent& observer : session.agents()) {
    for (const Agent& partner : session.agents()) {
      if (observer.id == partner.id || observer.outer_map(partner.id) == nullptr) continue;
      reports.push_back(session.trust_between(observer.id, partner.id));
    }
  }
  return reports;
}

inline Json replay_report(Session& session, const std::vector<TranscriptLine>& lines) {
  Json turns = Json::array();
  for (const auto& line : lines) turns.push_back(to_json(session.post_utterance(line.speaker, line.text)));
  Json trust = Json::array();
  for (const auto& report : final_trust(session)) trust.push_back(to_json(report));
  return Json{{"turns", std::move(turns)}, {"final_trust", std::move(trust)}, {"session", to_json(session)}};
}

inline Session alice_bob_session(const SessionConfig& config) {
  auto seeds = json_util::parse(fixtures::kAliceBobSeeds, "alice-bob seeds", ErrorCode::kInvalidConfig);
  return Session::create("demo", participants_from_json(seeds, config.engine.rng_seed), config);
}

inline SessionConfig alice_bob_config() {
  return session_config_from_json(
      json_util::parse(fixtures::kAliceBobConfig, "alice-bob config", ErrorCode::kInvalidConfig));
}

namespace detail {

inline std::string join(const std::vector<Label>& labels) {
  std::string out;
  for (const auto& label : labels) {
    if (!out.empty()) out += ' ';
    out += label;
  }
  return out.empty() ? "-" : out;
}

inline std::string fixed3(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3f", value);
  return buffer;
}

inline std::string trust_line(const TrustReport& r) {
  return "trust " + r.observer + "->" + r.partner + ": match=" + fixed3(r.match_value) +
         " decision=" + (r.decision ? "yes" : "no") + " alpha=" + fixed3(r.alpha);
}

}  // namespace detail

/// Deterministic trace of the embedded Alice/Bob conversation.
inline std::string demo_trace() {
  SessionConfig config = alice_bob_config();
  Session session = alice_bob_session(config);
  std::ostringstream out;
  out << "mindmeld demo: alice and bob\n";
  for (const Agent& agent : session.agents()) {
    out << "self " << agent.id << ": " << detail::join(agent.self_map.labels()) << "\n";
  }
  for (const auto& line : parse_transcript(fixtures::kAliceBobTranscript)) {
    TurnResult turn = session.post_utterance(line.speaker, line.text);
    out << "\nturn " << turn.utterance.tick << " " << turn.utterance.speaker << ": \"" << turn.utterance.text << "\"\n";
    out << "  labels: " << detail::join(turn.labels) << "\n";
    for (const ListenerOutcome& o : turn.listeners) {
      const MindMap& outer = *session.agent(o.listener).outer_map(turn.utterance.speaker);
      out << "  " << o.listener << " hears " << turn.utterance.speaker << "\n";
      if (o.merge) {
        out << "    created: " << detail::join(o.merge->created_cells) << "\n";
        out << "    reactivated: " << detail::join(o.merge->reactivated_cells) << "\n";
        out << "    associations: +" << o.merge->created_associations.size() << " new, "
            << o.merge->reinforced_associations.size() << " reinforced, " << o.forgotten.associations.size()
            << " forgotten\n";
      }
      out << "    activations:";
      for (const Label& label : outer.labels()) {
        out << " act(" << label << ")=" << format_number(outer.find(label)->activation);
      }
      out << "\n    " << detail::trust_line(o.trust) << "\n";
    }
  }
  if (const auto* edge = session.agent("alice").outer_map("bob")->association("day", "sunny")) {
    out << "\nlearned: day -- sunny weight=" << format_number(edge->weight) << "\n";
  }
  out << "\nfinal\n";
  for (const auto& report : final_trust(session)) out << "  " << detail::trust_line(report) << "\n";
  return out.str();
}

}  // namespace mindmeld
