#pragma once

// Relevance assignment, cell selection, the self/outer match and the
// thresholded trust decision.
//
// match = sum over selected self cells e of min(rho_self(e), rho_outer(e'))
//         where e' is the outer cell with the same label (0 if none),
//         divided by the summed self relevance of the selection.
// With uniform relevance this is |selected self labels found in outer| / |selection|.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/mindmap.hpp"

namespace mindmeld {

struct RelevanceMode {
  enum class Kind { kUniform, kRandom, kActivation };
  Kind kind = Kind::kUniform;
  std::uint64_t seed = 0;

  static RelevanceMode uniform() { return {Kind::kUniform, 0}; }
  static RelevanceMode random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
  static RelevanceMode activation() { return {Kind::kActivation, 0}; }

  friend bool operator==(const RelevanceMode&, const RelevanceMode&) = default;
};

struct SelectionStrategy {
  enum class Kind { kAll, kTopK, kBottomK, kRandomK };
  Kind kind = Kind::kAll;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  static SelectionStrategy all() { return {}; }
  static SelectionStrategy top_k(std::size_t k) { return {Kind::kTopK, k, 0}; }
  static SelectionStrategy bottom_k(std::size_t k) { return {Kind::kBottomK, k, 0}; }
  static SelectionStrategy random_k(std::size_t k, std::uint64_t seed) { return {Kind::kRandomK, k, seed}; }

  friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;
};

struct TrustReport {
  std::string observer;
  std::string partner;
  double match_value = 0.0;
  bool decision = false;
  double alpha = 0.5;
  SelectionStrategy strategy;
  Tick tick = 0;

  friend bool operator==(const TrustReport&, const TrustReport&) = default;
};

// --------------------------------------------------------------------------
// Text forms: "uniform", "random:<seed>", "activation";
// "all", "top_k:<k>", "bottom_k:<k>", "random_k:<k>:<seed>".

namespace detail {

inline std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": expected a non-negative integer, got \"" +
                                               std::string(text) + "\"");
  }
  return value;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace detail

/// Stable seed derivation for per-agent / per-map randomness.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
  return detail::splitmix64(seed ^ detail::fnv1a(salt));
}

/// Pseudo-random relevance in (0,1] for one label; depends only on (seed, label).
inline double random_relevance(std::uint64_t seed, std::string_view label) {
  std::uint64_t bits = detail::splitmix64(seed ^ detail::fnv1a(label));
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline std::string to_string(const RelevanceMode& mode) {
  switch (mode.kind) {
    case RelevanceMode::Kind::kUniform: return "uniform";
    case RelevanceMode::Kind::kRandom: return "random:" + std::to_string(mode.seed);
    case RelevanceMode::Kind::kActivation: return "activation";
  }
  return "uniform";
}

/// "random" without a seed takes `default_seed` (the config's rng_seed).
inline RelevanceMode parse_relevance_mode(std::string_view text, std::uint64_t default_seed = 0) {
  auto parts = detail::split_colon(text);
  if (parts.size() == 1 && parts[0] == "uniform") return RelevanceMode::uniform();
  if (parts.size() == 1 && parts[0] == "activation") return RelevanceMode::activation();
  if (parts[0] == "random" && parts.size() <= 2) {
    return RelevanceMode::random(parts.size() == 2 ? detail::parse_unsigned(parts[1], "random seed")
                                                   : default_seed);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown relevance mode \"" + std::string(text) + "\"");
}

inline std::string to_string(const SelectionStrategy& strategy) {
  switch (strategy.kind) {
    case SelectionStrategy::Kind::kAll: return "all";
    case SelectionStrategy::Kind::kTopK: return "top_k:" + std::to_string(strategy.k);
    case SelectionStrategy::Kind::kBottomK: return "bottom_k:" + std::to_string(strategy.k);
    case SelectionStrategy::Kind::kRandomK:
      return "random_k:" + std::to_string(strategy.k) + ":" + std::to_string(strategy.seed);
  }
  return "all";
}

inline SelectionStrategy parse_strategy(std::string_view text, std::uint64_t default_seed = 0) {
  auto parts = detail::split_colon(text);
  auto bounded_k = [&](std::string_view k_text) {
    auto k = detail::parse_unsigned(k_text, "strategy k");
    if (k < 1) throw Error(ErrorCode::kInvalidConfig, "strategy k must be >= 1");
    return static_cast<std::size_t>(k);
  };
  if (parts.size() == 1 && parts[0] == "all") return SelectionStrategy::all();
  if (parts.size() == 2 && parts[0] == "top_k") return SelectionStrategy::top_k(bounded_k(parts[1]));
  if (parts.size() == 2 && parts[0] == "bottom_k") return SelectionStrategy::bottom_k(bounded_k(parts[1]));
  if (parts[0] == "random_k" && (parts.size() == 2 || parts.size() == 3)) {
    return SelectionStrategy::random_k(
        bounded_k(parts[1]),
        parts.size() == 3 ? detail::parse_unsigned(parts[2], "random_k seed") : default_seed);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown selection strategy \"" + std::string(text) + "\"");
}

// --------------------------------------------------------------------------
// Operations

/// Returns false when activation mode met an all-zero map (every relevance set to 0).
inline bool assign_relevance(MindMap& map, const RelevanceMode& mode) {
  switch (mode.kind) {
    case RelevanceMode::Kind::kUniform:
      for (const auto& [id, cell] : map.cells()) map.set_relevance(id, 1.0);
      return true;
    case RelevanceMode::Kind::kRandom:
      for (const auto& [id, cell] : map.cells()) map.set_relevance(id, random_relevance(mode.seed, cell.label));
      return true;
    case RelevanceMode::Kind::kActivation: {
      if (map.empty()) throw Error(ErrorCode::kEmptyMap, "activation relevance needs a non-empty map");
      double max_activation = 0.0;
      for (const auto& [id, cell] : map.cells()) max_activation = std::max(max_activation, cell.activation);
      for (const auto& [id, cell] : map.cells()) {
        map.set_relevance(id, max_activation > 0.0 ? cell.activation / max_activation : 0.0);
      }
      return max_activation > 0.0;
    }
  }
  return true;
}

inline std::vector<EntityCell> select_cells(const MindMap& map, const SelectionStrategy& strategy) {
  if (map.empty()) throw Error(ErrorCode::kEmptyMap, "cannot select cells from an empty map");

  std::vector<EntityCell> cells;
  cells.reserve(map.size());
  for (const auto& [id, cell] : map.cells()) cells.push_back(cell);
  std::sort(cells.begin(), cells.end(), [](const EntityCell& x, const EntityCell& y) { return x.label < y.label; });

  if (strategy.kind == SelectionStrategy::Kind::kAll || strategy.k >= cells.size()) return cells;

  switch (strategy.kind) {
    case SelectionStrategy::Kind::kTopK:
      std::stable_sort(cells.begin(), cells.end(), [](const EntityCell& x, const EntityCell& y) {
        return x.activation > y.activation;
      });
      break;
    case SelectionStrategy::Kind::kBottomK:
      std::stable_sort(cells.begin(), cells.end(), [](const EntityCell& x, const EntityCell& y) {
        return x.activation < y.activation;
      });
      break;
    case SelectionStrategy::Kind::kRandomK: {
      // Partial Fisher-Yates over the label-sorted cells.
      std::mt19937_64 rng(strategy.seed);
      for (std::size_t i = 0; i < strategy.k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (cells.size() - i));
        std::swap(cells[i], cells[j]);
      }
      break;
    }
    case SelectionStrategy::Kind::kAll:
      break;
  }
  cells.resize(strategy.k);
  return cells;
}

/// Relevances must already be assigned on both maps.
inline double match_maps(const MindMap& self_map, const MindMap& outer_map, const SelectionStrategy& strategy) {
  if (self_map.empty()) throw Error(ErrorCode::kEmptySelfMap, "self map has no cells");
  double numerator = 0.0;
  double denominator = 0.0;
  for (const EntityCell& cell : select_cells(self_map, strategy)) {
    denominator += cell.relevance;
    if (const EntityCell* other = outer_map.find(cell.label)) {
      numerator += std::min(cell.relevance, other->relevance);
    }
  }
  if (!(denominator > 0.0)) throw Error(ErrorCode::kEmptySelection, "selected self relevance sums to 0");
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

inline TrustReport gtrust(const MindMap& self_map, const MindMap& outer_map, double alpha,
                          const SelectionStrategy& strategy, Tick tick, std::string observer = {},
                          std::string partner = {}) {
  TrustReport report;
  report.observer = std::move(observer);
  report.partner = std::move(partner);
  report.match_value = match_maps(self_map, outer_map, strategy);
  report.decision = report.match_value >= alpha;
  report.alpha = alpha;
  report.strategy = strategy;
  report.tick = tick;
  return report;
}

inline Json to_json(const TrustReport& report) {
  return Json{{"observer", report.observer},
              {"partner", report.partner},
              {"match", json_util::real(report.match_value)},
              {"decision", report.decision ? "yes" : "no"},
              {"alpha", json_util::real(report.alpha)},
              {"strategy", to_string(report.strategy)},
              {"tick", report.tick}};
}

inline TrustReport trust_report_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kMalformedSnapshot;
  reject_unknown_keys(doc, {"observer", "partner", "match", "decision", "alpha", "strategy", "tick"},
                      "trust_report", kCode);
  TrustReport report;
  report.observer = require_string(doc, "observer", "trust_report", kCode);
  report.partner = require_string(doc, "partner", "trust_report", kCode);
  report.match_value = require_number(doc, "match", "trust_report", kCode);
  auto decision = require_string(doc, "decision", "trust_report", kCode);
  if (decision != "yes" && decision != "no") throw Error(kCode, "trust_report.decision: expected yes|no");
  report.decision = decision == "yes";
  report.alpha = require_number(doc, "alpha", "trust_report", kCode);
  try {
    report.strategy = parse_strategy(require_string(doc, "strategy", "trust_report", kCode));
  } catch (const Error& e) {
    throw Error(kCode, e.what());
  }
  report.tick = require_integer(doc, "tick", "trust_report", kCode);
  return report;
}

}  // namespace mindmeld
