#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/lexer.hpp"
#include "mindmeld/memory.hpp"
#include "mindmeld/mindmap.hpp"
#include "mindmeld/trust.hpp"

namespace mindmeld {

/// Everything a session needs besides its participants. This is the config
/// document accepted by the CLI and the service.
struct SessionConfig {
  EngineConfig engine;
  MemoryConfig memory;
  LexiconConfig lexicon = default_lexicon();
  RelevanceMode relevance_mode = RelevanceMode::uniform();
  double default_alpha = 0.5;
  SelectionStrategy default_strategy = SelectionStrategy::all();

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

inline void validate_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must lie in [0,1], got " + std::to_string(alpha));
  }
}

inline void validate(const SessionConfig& config) {
  validate(config.engine);
  validate(config.memory);
  validate(config.lexicon);
  validate_alpha(config.default_alpha);
}

inline Json to_json(const EngineConfig& config) {
  using json_util::real;
  Json doc;
  doc["phi"] = real(config.phi);
  doc["decay_fraction"] = real(config.decay_fraction);
  doc["sigma"] = real(config.sigma);
  doc["initial_weight"] = real(config.initial_weight);
  doc["activation_increment"] = real(config.activation_increment);
  doc["activation_decay"] = real(config.activation_decay);
  doc["skeleton_threshold"] = real(config.skeleton_threshold);
  doc["window_size"] = config.window_size ? Json(*config.window_size) : Json(nullptr);
  doc["rng_seed"] = config.rng_seed;
  return doc;
}

/// initial_weight defaults to phi when absent.
inline EngineConfig engine_config_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  reject_unknown_keys(doc,
                      {"phi", "decay_fraction", "sigma", "initial_weight", "activation_increment",
                       "activation_decay", "skeleton_threshold", "window_size", "rng_seed"},
                      "engine", kCode);
  EngineConfig config;
  auto number = [&](std::string_view key, double& out) {
    if (doc.contains(key)) out = require_number(doc, key, "engine", kCode);
  };
  number("phi", config.phi);
  config.initial_weight = config.phi;
  number("decay_fraction", config.decay_fraction);
  number("sigma", config.sigma);
  number("initial_weight", config.initial_weight);
  number("activation_increment", config.activation_increment);
  number("activation_decay", config.activation_decay);
  number("skeleton_threshold", config.skeleton_threshold);
  if (doc.contains("window_size") && !doc.at("window_size").is_null()) {
    auto n = require_integer(doc, "window_size", "engine", kCode);
    if (n < 1) throw Error(kCode, "engine.window_size must be positive or null");
    config.window_size = static_cast<std::size_t>(n);
  }
  if (doc.contains("rng_seed")) {
    const Json& seed = doc.at("rng_seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      throw Error(kCode, "engine.rng_seed: expected a non-negative integer");
    }
    config.rng_seed = seed.get<std::uint64_t>();
  }
  validate(config);
  return config;
}

inline Json to_json(const SessionConfig& config) {
  Json doc;
  doc["engine"] = to_json(config.engine);
  doc["memory"] = to_json(config.memory);
  doc["lexicon"] = to_json(config.lexicon);
  doc["relevance_mode"] = to_string(config.relevance_mode);
  doc["default_alpha"] = json_util::real(config.default_alpha);
  doc["default_strategy"] = to_string(config.default_strategy);
  return doc;
}

inline SessionConfig session_config_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  reject_unknown_keys(doc, {"engine", "memory", "lexicon", "relevance_mode", "default_alpha", "default_strategy"},
                      "config", kCode);
  SessionConfig config;
  if (doc.contains("engine")) config.engine = engine_config_from_json(doc.at("engine"));
  if (doc.contains("memory")) config.memory = memory_config_from_json(doc.at("memory"));
  if (doc.contains("lexicon")) config.lexicon = lexicon_from_json(doc.at("lexicon"));
  if (doc.contains("relevance_mode")) {
    config.relevance_mode =
        parse_relevance_mode(require_string(doc, "relevance_mode", "config", kCode), config.engine.rng_seed);
  }
  if (doc.contains("default_alpha")) config.default_alpha = require_number(doc, "default_alpha", "config", kCode);
  if (doc.contains("default_strategy")) {
    config.default_strategy =
        parse_strategy(require_string(doc, "default_strategy", "config", kCode), config.engine.rng_seed);
  }
  validate(config);
  return config;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Explicit path first, then $MINDMELD_CONFIG, else defaults.
inline SessionConfig load_session_config(const std::optional<std::string>& path) {
  std::optional<std::string> source = path;
  if (!source) {
    if (const char* env = std::getenv("MINDMELD_CONFIG"); env != nullptr && *env != '\0') source = env;
  }
  if (!source) return SessionConfig{};
  return session_config_from_json(json_util::parse(read_text_file(*source), *source, ErrorCode::kInvalidConfig));
}

}  // namespace mindmeld
