#pragma once

// Short-term / long-term memory for skeletons. STM is a small recency-ordered
// store with LRU and TTL eviction; a signature seen often enough moves to the
// unbounded LTM and stays there.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/mindmap.hpp"

namespace mindmeld {

using Signature = std::vector<Label>;

enum class Store { kShortTerm, kLongTerm };

struct SkeletonRecord {
  Signature signature;
  int recurrence = 1;
  Tick first_seen_tick = 0;
  Tick last_seen_tick = 0;
  Store store = Store::kShortTerm;

  friend bool operator==(const SkeletonRecord&, const SkeletonRecord&) = default;
};

struct MemoryConfig {
  std::size_t stm_capacity = 32;
  int promote_recurrence = 3;
  Tick stm_ttl = 10;

  friend bool operator==(const MemoryConfig&, const MemoryConfig&) = default;
};

inline void validate(const MemoryConfig& config) {
  if (config.stm_capacity < 1) throw Error(ErrorCode::kInvalidConfig, "memory.stm_capacity must be >= 1");
  if (config.promote_recurrence < 1) {
    throw Error(ErrorCode::kInvalidConfig, "memory.promote_recurrence must be >= 1");
  }
  if (config.stm_ttl < 0) throw Error(ErrorCode::kInvalidConfig, "memory.stm_ttl must be >= 0");
}

struct MemoryEvents {
  std::vector<Signature> admitted;
  std::vector<Signature> recurred;
  std::vector<Signature> promoted;
  std::vector<Signature> evicted;

  bool empty() const noexcept {
    return admitted.empty() && recurred.empty() && promoted.empty() && evicted.empty();
  }

  friend bool operator==(const MemoryEvents&, const MemoryEvents&) = default;
};

inline Signature make_signature(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

class MemoryStore {
 public:
  MemoryStore() = default;
  explicit MemoryStore(MemoryConfig config) : config_(config) { validate(config_); }

  const MemoryConfig& config() const noexcept { return config_; }
  /// Least recently seen first.
  const std::vector<SkeletonRecord>& stm() const noexcept { return stm_; }
  /// In promotion order.
  const std::vector<SkeletonRecord>& ltm() const noexcept { return ltm_; }
  std::optional<Tick> last_tick() const noexcept { return last_tick_; }

  const SkeletonRecord* find(const Signature& signature) const {
    if (auto it = find_in(stm_, signature); it != stm_.end()) return &*it;
    if (auto it = find_in(ltm_, signature); it != ltm_.end()) return &*it;
    return nullptr;
  }

  MemoryEvents observe(const std::vector<Skeleton>& skeletons, Tick tick) {
    if (last_tick_ && tick < *last_tick_) {
      throw Error(ErrorCode::kTickRegression,
                  "tick " + std::to_string(tick) + " < " + std::to_string(*last_tick_));
    }
    last_tick_ = tick;

    MemoryEvents events;
    for (const Skeleton& skeleton : skeletons) {
      Signature signature = make_signature(skeleton.labels);
      if (signature.empty()) continue;

      if (auto it = find_in(ltm_, signature); it != ltm_.end()) {
        it->last_seen_tick = tick;
        continue;
      }
      if (auto it = find_in(stm_, signature); it != stm_.end()) {
        SkeletonRecord record = std::move(*it);
        stm_.erase(it);
        record.recurrence += 1;
        record.last_seen_tick = tick;
        events.recurred.push_back(signature);
        if (record.recurrence >= config_.promote_recurrence) {
          promote(std::move(record));
          events.promoted.push_back(std::move(signature));
        } else {
          stm_.push_back(std::move(record));
        }
        continue;
      }

      SkeletonRecord record{signature, 1, tick, tick, Store::kShortTerm};
      events.admitted.push_back(signature);
      if (record.recurrence >= config_.promote_recurrence) {
        promote(std::move(record));
        events.promoted.push_back(std::move(signature));
        continue;
      }
      if (stm_.size() >= config_.stm_capacity) {
        events.evicted.push_back(stm_.front().signature);
        stm_.erase(stm_.begin());
      }
      stm_.push_back(std::move(record));
    }

    for (auto it = stm_.begin(); it != stm_.end();) {
      if (tick - it->last_seen_tick > config_.stm_ttl) {
        events.evicted.push_back(it->signature);
        it = stm_.erase(it);
      } else {
        ++it;
      }
    }
    return events;
  }

  /// LTM records sharing at least one label with the query, best overlap
  /// first, then most recently seen, then signature order.
  std::vector<SkeletonRecord> recall(const std::set<Label>& query) const {
    std::vector<std::pair<std::size_t, const SkeletonRecord*>> hits;
    for (const SkeletonRecord& record : ltm_) {
      std::size_t overlap = 0;
      for (const Label& label : record.signature) overlap += query.contains(label) ? 1 : 0;
      if (overlap > 0) hits.emplace_back(overlap, &record);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      if (x.second->last_seen_tick != y.second->last_seen_tick) {
        return x.second->last_seen_tick > y.second->last_seen_tick;
      }
      return x.second->signature < y.second->signature;
    });
    std::vector<SkeletonRecord> out;
    out.reserve(hits.size());
    for (const auto& [overlap, record] : hits) out.push_back(*record);
    return out;
  }

  void clear() {
    stm_.clear();
    ltm_.clear();
    last_tick_.reset();
  }

  /// Rebuilds a store from serialized parts; checks the cross-store invariants.
  static MemoryStore from_parts(MemoryConfig config, std::vector<SkeletonRecord> stm,
                                std::vector<SkeletonRecord> ltm, std::optional<Tick> last_tick) {
    MemoryStore store(config);
    std::set<Signature> seen;
    for (auto* part : {&stm, &ltm}) {
      for (const SkeletonRecord& record : *part) {
        if (record.signature.empty() || record.signature != make_signature(record.signature)) {
          throw Error(ErrorCode::kMalformedSnapshot, "memory: signature must be sorted, unique, non-empty");
        }
        if (record.recurrence < 1 || record.last_seen_tick < record.first_seen_tick) {
          throw Error(ErrorCode::kMalformedSnapshot, "memory: record counters out of range");
        }
        if (!seen.insert(record.signature).second) {
          throw Error(ErrorCode::kMalformedSnapshot, "memory: signature stored twice");
        }
      }
    }
    if (stm.size() > config.stm_capacity) {
      throw Error(ErrorCode::kMalformedSnapshot, "memory: stm exceeds capacity");
    }
    for (auto& record : stm) record.store = Store::kShortTerm;
    for (auto& record : ltm) record.store = Store::kLongTerm;
    store.stm_ = std::move(stm);
    store.ltm_ = std::move(ltm);
    store.last_tick_ = last_tick;
    return store;
  }

  friend bool operator==(const MemoryStore&, const MemoryStore&) = default;

 private:
  static std::vector<SkeletonRecord>::iterator find_in(std::vector<SkeletonRecord>& records, const Signature& signature) {
    return std::find_if(records.begin(), records.end(),
                        [&](const SkeletonRecord& r) { return r.signature == signature; });
  }
  static std::vector<SkeletonRecord>::const_iterator find_in(
      const std::vector<SkeletonRecord>& records, const Signature& signature) {
    return std::find_if(records.begin(), records.end(),
                        [&](const SkeletonRecord& r) { return r.signature == signature; });
  }

  void promote(SkeletonRecord record) {
    record.store = Store::kLongTerm;
    ltm_.push_back(std::move(record));
  }

  MemoryConfig config_;
  std::vector<SkeletonRecord> stm_;
  std::vector<SkeletonRecord> ltm_;
  std::optional<Tick> last_tick_;
};

inline MemoryEvents observe(MemoryStore& store, const std::vector<Skeleton>& skeletons, Tick tick) {
  return store.observe(skeletons, tick);
}

inline std::vector<SkeletonRecord> recall(const MemoryStore& store, const std::set<Label>& query) {
  return store.recall(query);
}

// --------------------------------------------------------------------------
// JSON

inline Json to_json(const MemoryConfig& config) {
  return Json{{"stm_capacity", config.stm_capacity},
              {"promote_recurrence", config.promote_recurrence},
              {"stm_ttl", config.stm_ttl}};
}

inline MemoryConfig memory_config_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  reject_unknown_keys(doc, {"stm_capacity", "promote_recurrence", "stm_ttl"}, "memory", kCode);
  MemoryConfig config;
  if (doc.contains("stm_capacity")) {
    auto n = require_integer(doc, "stm_capacity", "memory", kCode);
    if (n < 1) throw Error(kCode, "memory.stm_capacity must be >= 1");
    config.stm_capacity = static_cast<std::size_t>(n);
  }
  if (doc.contains("promote_recurrence")) {
    config.promote_recurrence = static_cast<int>(require_integer(doc, "promote_recurrence", "memory", kCode));
  }
  if (doc.contains("stm_ttl")) config.stm_ttl = require_integer(doc, "stm_ttl", "memory", kCode);
  validate(config);
  return config;
}

inline Json to_json(const SkeletonRecord& record) {
  return Json{{"signature", record.signature},
              {"recurrence", record.recurrence},
              {"first_seen_tick", record.first_seen_tick},
              {"last_seen_tick", record.last_seen_tick},
              {"store", record.store == Store::kShortTerm ? "stm" : "ltm"}};
}

inline Json to_json(const MemoryStore& store) {
  Json stm = Json::array();
  for (const auto& record : store.stm()) stm.push_back(to_json(record));
  Json ltm = Json::array();
  for (const auto& record : store.ltm()) ltm.push_back(to_json(record));
  Json doc;
  doc["stm"] = std::move(stm);
  doc["ltm"] = std::move(ltm);
  doc["stm_capacity"] = store.config().stm_capacity;
  doc["promote_recurrence"] = store.config().promote_recurrence;
  doc["stm_ttl"] = store.config().stm_ttl;
  doc["last_tick"] = store.last_tick() ? Json(*store.last_tick()) : Json(nullptr);
  return doc;
}

inline MemoryStore memory_from_json(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kMalformedSnapshot;
  reject_unknown_keys(doc, {"stm", "ltm", "stm_capacity", "promote_recurrence", "stm_ttl", "last_tick"},
                      "memory", kCode);
  MemoryConfig config;
  config.stm_capacity = static_cast<std::size_t>(require_integer(doc, "stm_capacity", "memory", kCode));
  config.promote_recurrence = static_cast<int>(require_integer(doc, "promote_recurrence", "memory", kCode));
  config.stm_ttl = require_integer(doc, "stm_ttl", "memory", kCode);

  auto records = [&](std::string_view key) {
    const Json& array = require(doc, key, "memory", kCode);
    if (!array.is_array()) throw Error(kCode, "memory." + std::string(key) + ": expected an array");
    std::vector<SkeletonRecord> out;
    for (const Json& r : array) {
      const std::string where = "memory." + std::string(key) + "[]";
      reject_unknown_keys(r, {"signature", "recurrence", "first_seen_tick", "last_seen_tick", "store"},
                          where, kCode);
      SkeletonRecord record;
      try {
        record.signature = require(r, "signature", where, kCode).get<Signature>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(kCode, where + ".signature: " + e.what());
      }
      record.recurrence = static_cast<int>(require_integer(r, "recurrence", where, kCode));
      record.first_seen_tick = require_integer(r, "first_seen_tick", where, kCode);
      record.last_seen_tick = require_integer(r, "last_seen_tick", where, kCode);
      out.push_back(std::move(record));
    }
    return out;
  };

  std::optional<Tick> last_tick;
  if (doc.contains("last_tick") && !doc.at("last_tick").is_null()) {
    last_tick = require_integer(doc, "last_tick", "memory", kCode);
  }
  try {
    validate(config);
  } catch (const Error& e) {
    throw Error(kCode, e.what());
  }
  return MemoryStore::from_parts(config, records("stm"), records("ltm"), last_tick);
}

}  // namespace mindmeld
