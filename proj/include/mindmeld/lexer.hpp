#pragma once

// Front end of the engine: raw utterance text -> tokens -> normalized entity
// labels -> mini-network (the complete graph over one time-point's labels).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"

namespace mindmeld {

using Label = std::string;
using Tick = std::int64_t;

struct Token {
  std::string surface;
  std::size_t position = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct SuffixRule {
  std::string suffix;
  std::string replace;

  friend bool operator==(const SuffixRule&, const SuffixRule&) = default;
};

struct LexiconConfig {
  std::set<std::string> stopwords;
  std::vector<SuffixRule> stem_rules;
  std::size_t min_token_len = 2;
  /// A rule only fires if the stemmed result keeps at least this many characters.
  std::size_t min_stem_len = 3;
  std::optional<std::set<std::string>> content_allowlist;

  friend bool operator==(const LexiconConfig&, const LexiconConfig&) = default;
};

struct MiniNetwork {
  std::set<Label> labels;
  Tick tick = 0;

  bool empty() const noexcept { return labels.empty(); }

  friend bool operator==(const MiniNetwork&, const MiniNetwork&) = default;
};

inline std::vector<SuffixRule> default_stem_rules() {
  return {
      {"ss", "ss"},  // guards "glass", "class" against the plain -s rule
      {"ies", "y"},  {"nning", "n"}, {"pping", "p"}, {"tting", "t"},
      {"ining", "ine"}, {"ing", ""}, {"ied", "y"},   {"ed", ""},
      {"ly", ""},    {"s", ""},
  };
}

inline std::set<std::string> default_stopwords() {
  return {
      "a",       "about",   "above",  "after",  "again",   "against", "all",     "also",
      "am",      "an",      "and",    "any",    "are",     "as",      "at",      "be",
      "because", "been",    "before", "being",  "below",   "between", "both",    "but",
      "by",      "can",     "could",  "did",    "do",      "does",    "doing",   "down",
      "during",  "each",    "few",    "for",    "from",    "further", "had",     "has",
      "have",    "having",  "he",     "her",    "here",    "hers",    "herself", "him",
      "himself", "his",     "how",    "i",      "i'm",     "if",      "in",      "into",
      "is",      "it",      "it's",   "its",    "itself",  "just",    "me",      "more",
      "most",    "my",      "myself", "no",     "nor",     "not",     "now",     "of",
      "off",     "on",      "once",   "or",     "other",   "our",     "ours",    "out",
      "over",    "she",     "should", "so",     "some",    "such",    "than",    "that",
      "that's",  "the",     "their",  "theirs", "them",    "then",    "there",   "these",
      "they",    "this",    "those",  "through", "to",     "too",     "under",   "until",
      "up",      "very",    "was",    "we",     "were",    "what",    "when",    "where",
      "which",   "while",   "who",    "whom",   "why",     "will",    "with",    "would",
      "you",     "your",    "yours",
  };
}

inline LexiconConfig default_lexicon() {
  LexiconConfig lexicon;
  lexicon.stopwords = default_stopwords();
  lexicon.stem_rules = default_stem_rules();
  return lexicon;
}

namespace detail {

inline bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c == '-';
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace detail

/// Splits on anything outside [a-z0-9'-] after ASCII case folding. Leading and
/// trailing apostrophes/hyphens are trimmed; position counts surviving words
/// before the length filter.
inline std::vector<Token> tokenize(std::string_view text, std::size_t min_token_len = 2) {
  std::vector<Token> tokens;
  std::size_t position = 0;
  std::string word;
  auto flush = [&] {
    auto first = word.find_first_not_of("'-");
    if (first != std::string::npos) {
      auto last = word.find_last_not_of("'-");
      std::string surface = word.substr(first, last - first + 1);
      if (surface.size() >= min_token_len && !surface.empty()) {
        tokens.push_back(Token{std::move(surface), position});
      }
      ++position;
    }
    word.clear();
  };
  for (char raw : text) {
    char c = detail::ascii_lower(raw);
    if (detail::is_word_char(c)) {
      word.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline std::vector<Token> tokenize(std::string_view text, const LexiconConfig& lexicon) {
  return tokenize(text, lexicon.min_token_len);
}

/// Applies the longest matching suffix rule repeatedly until no rule changes
/// the word, so stemming is a fixpoint.
inline std::string stem(std::string word, const LexiconConfig& lexicon) {
  std::vector<const SuffixRule*> rules;
  rules.reserve(lexicon.stem_rules.size());
  for (const auto& rule : lexicon.stem_rules) rules.push_back(&rule);
  std::stable_sort(rules.begin(), rules.end(), [](const SuffixRule* a, const SuffixRule* b) {
    return a->suffix.size() > b->suffix.size();
  });

  constexpr int kMaxPasses = 16;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    const SuffixRule* hit = nullptr;
    for (const SuffixRule* rule : rules) {
      if (rule->suffix.empty() || !word.ends_with(rule->suffix)) continue;
      std::size_t kept = word.size() - rule->suffix.size();
      if (kept + rule->replace.size() < lexicon.min_stem_len) continue;
      hit = rule;
      break;
    }
    if (hit == nullptr) break;
    std::string next = word.substr(0, word.size() - hit->suffix.size()) + hit->replace;
    if (next == word) break;
    word = std::move(next);
  }
  return word;
}

inline std::optional<Label> normalize(const Token& token, const LexiconConfig& lexicon) {
  if (lexicon.stopwords.contains(token.surface)) return std::nullopt;
  std::string label = stem(token.surface, lexicon);
  if (label.empty() || lexicon.stopwords.contains(label)) return std::nullopt;
  if (lexicon.content_allowlist && !lexicon.content_allowlist->contains(label)) {
    return std::nullopt;
  }
  return label;
}

/// Keeps the last `window_size` labels (all of them when unbounded) as a set.
inline MiniNetwork build_mini_network(std::span<const Label> labels,
                                      std::optional<std::size_t> window_size, Tick tick) {
  MiniNetwork mini;
  mini.tick = tick;
  std::size_t start = 0;
  if (window_size && labels.size() > *window_size) start = labels.size() - *window_size;
  for (std::size_t i = start; i < labels.size(); ++i) mini.labels.insert(labels[i]);
  return mini;
}

/// tokenize -> normalize, preserving utterance order (duplicates kept).
inline std::vector<Label> lex(std::string_view text, const LexiconConfig& lexicon) {
  std::vector<Label> labels;
  for (const Token& token : tokenize(text, lexicon)) {
    if (auto label = normalize(token, lexicon)) labels.push_back(std::move(*label));
  }
  return labels;
}

// --------------------------------------------------------------------------
// JSON

inline void validate(const LexiconConfig& lexicon) {
  if (lexicon.min_token_len < 1) {
    throw Error(ErrorCode::kInvalidConfig, "lexicon.min_token_len must be positive");
  }
  for (const auto& word : lexicon.stopwords) {
    for (char c : word) {
      if (detail::ascii_lower(c) != c) {
        throw Error(ErrorCode::kInvalidConfig, "lexicon.stopwords must be lowercase: " + word);
      }
    }
  }
  if (lexicon.content_allowlist && lexicon.content_allowlist->empty()) {
    throw Error(ErrorCode::kInvalidConfig, "lexicon.allowlist must be null or non-empty");
  }
}

inline Json to_json(const LexiconConfig& lexicon) {
  Json rules = Json::array();
  for (const auto& rule : lexicon.stem_rules) {
    rules.push_back(Json{{"suffix", rule.suffix}, {"replace", rule.replace}});
  }
  Json doc;
  doc["stopwords"] = lexicon.stopwords;
  doc["stem_rules"] = std::move(rules);
  doc["min_token_len"] = lexicon.min_token_len;
  doc["min_stem_len"] = lexicon.min_stem_len;
  doc["allowlist"] = lexicon.content_allowlist ? Json(*lexicon.content_allowlist) : Json(nullptr);
  return doc;
}

/// Missing keys fall back to the shipped defaults; unknown keys are rejected.
inline LexiconConfig lexicon_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  reject_unknown_keys(doc, {"stopwords", "stem_rules", "min_token_len", "min_stem_len", "allowlist"},
                      "lexicon", kCode);
  LexiconConfig lexicon = default_lexicon();
  try {
    if (doc.contains("stopwords")) {
      lexicon.stopwords = doc.at("stopwords").get<std::set<std::string>>();
    }
    if (doc.contains("stem_rules")) {
      lexicon.stem_rules.clear();
      for (const auto& rule : doc.at("stem_rules")) {
        reject_unknown_keys(rule, {"suffix", "replace"}, "lexicon.stem_rules[]", kCode);
        lexicon.stem_rules.push_back(
            {require_string(rule, "suffix", "stem_rule", kCode),
             require_string(rule, "replace", "stem_rule", kCode)});
      }
    }
    if (doc.contains("min_token_len")) {
      auto n = require_integer(doc, "min_token_len", "lexicon", kCode);
      if (n < 1) throw Error(kCode, "lexicon.min_token_len must be positive");
      lexicon.min_token_len = static_cast<std::size_t>(n);
    }
    if (doc.contains("min_stem_len")) {
      auto n = require_integer(doc, "min_stem_len", "lexicon", kCode);
      if (n < 0) throw Error(kCode, "lexicon.min_stem_len must be non-negative");
      lexicon.min_stem_len = static_cast<std::size_t>(n);
    }
    if (doc.contains("allowlist") && !doc.at("allowlist").is_null()) {
      lexicon.content_allowlist = doc.at("allowlist").get<std::set<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(kCode, std::string("lexicon: ") + e.what());
  }
  validate(lexicon);
  return lexicon;
}

}  // namespace mindmeld
