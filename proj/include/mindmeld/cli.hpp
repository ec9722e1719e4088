#pragma once

// Command implementations behind tools/mindmeld.cpp. Each returns the process
// exit code: 0 success, 1 unreadable or malformed input, 2 invariant violation.

#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "mindmeld/config.hpp"
#include "mindmeld/dot.hpp"
#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/replay.hpp"
#include "mindmeld/session.hpp"

namespace mindmeld::cli {

constexpr int kOk = 0;
constexpr int kParseError = 1;
constexpr int kInvariantError = 2;

inline int exit_code_for(const Error& e) { return e.is_parse_error() ? kParseError : kInvariantError; }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kInvalidConfig, "failed writing " + path);
}

struct ReplayOptions {
  std::string transcript_path;
  std::string seeds_path;
  std::optional<std::string> config_path;
  std::string out_path;
  std::optional<std::string> snapshot_path;
};

inline int replay(const ReplayOptions& options, std::ostream& err) {
  std::optional<Session> session;
  std::vector<TranscriptLine> lines;
  try {
    SessionConfig config = load_session_config(options.config_path);
    Json seeds = json_util::parse(read_text_file(options.seeds_path), options.seeds_path, ErrorCode::kInvalidConfig);
    auto specs = participants_from_json(seeds, config.engine.rng_seed);
    lines = parse_transcript(read_text_file(options.transcript_path));
    session.emplace(Session::create("replay", specs, std::move(config)));
  } catch (const Error& e) {
    err << "replay: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    Json report = replay_report(*session, lines);
    write_text_file(options.out_path, report.dump(2) + "\n");
    if (options.snapshot_path) write_text_file(*options.snapshot_path, report.at("session").dump(2) + "\n");
  } catch (const Error& e) {
    err << "replay: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidConfig ? kParseError : kInvariantError;
  }
  return kOk;
}

inline int demo(std::ostream& out) {
  out << demo_trace();
  return kOk;
}

/// Views: "self:<agent>" or "outer:<agent>:<partner>". Accepts a session
/// snapshot or a replay report (which embeds one under "session").
inline int export_dot(const std::string& snapshot_path, const std::string& view, std::ostream& out,
                      std::ostream& err) {
  std::optional<Session> session;
  try {
    Json doc = json_util::parse(read_text_file(snapshot_path), snapshot_path, ErrorCode::kMalformedSnapshot);
    if (doc.is_object() && doc.contains("session") && doc.contains("turns")) doc = doc.at("session");
    session.emplace(session_from_json(doc));
  } catch (const Error& e) {
    err << "export-dot: " << e.what() << "\n";
    return kParseError;
  }

  auto fail = [&](const std::string& message) {
    err << "export-dot: " << message << "\n";
    return kInvariantError;
  };
  auto parts = detail::split_colon(view);
  if (parts.size() == 2 && parts[0] == "self") {
    const Agent* agent = session->find_agent(parts[1]);
    if (agent == nullptr) return fail("unknown agent \"" + std::string(parts[1]) + "\"");
    out << to_dot(agent->self_map);
    return kOk;
  }
  if (parts.size() == 3 && parts[0] == "outer") {
    const Agent* agent = session->find_agent(parts[1]);
    if (agent == nullptr) return fail("unknown agent \"" + std::string(parts[1]) + "\"");
    const MindMap* outer = agent->outer_map(std::string(parts[2]));
    if (outer == nullptr) return fail("no outer map " + std::string(parts[1]) + ":" + std::string(parts[2]));
    out << to_dot(*outer);
    return kOk;
  }
  return fail("unknown view \"" + view + "\" (expected self:<agent> or outer:<agent>:<partner>)");
}

}  // namespace mindmeld::cli
