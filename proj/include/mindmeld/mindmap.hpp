#pragma once

// The connectionist mind-map: entity cells joined by weighted undirected
// associations. Mini-networks are merged in (activation + Hebbian learning),
// idle associations decay and are forgotten below sigma, and strongly
// activated connected clumps are extracted as skeletons.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/lexer.hpp"

namespace mindmeld {

using CellId = std::uint64_t;
using LabelPair = std::pair<Label, Label>;

struct EntityCell {
  CellId id = 0;
  Label label;
  double activation = 0.0;
  double relevance = 0.0;
  Tick last_active_tick = 0;

  friend bool operator==(const EntityCell&, const EntityCell&) = default;
};

struct Association {
  CellId a = 0;  // a < b
  CellId b = 0;
  double weight = 0.0;
  Tick last_active_tick = 0;

  friend bool operator==(const Association&, const Association&) = default;
};

struct EngineConfig {
  double phi = 0.1;
  double decay_fraction = 0.1;
  double sigma = 0.01;
  double initial_weight = 0.1;
  double activation_increment = 1.0;
  /// Multiplicative activation loss per decay pass for idle cells; 0 disables it.
  double activation_decay = 0.0;
  double skeleton_threshold = 2.0;
  std::optional<std::size_t> window_size;
  std::uint64_t rng_seed = 0;

  double decay_step() const noexcept { return decay_fraction * phi; }

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

inline void validate(const EngineConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, "engine: " + what); };
  if (!(config.phi > 0.0)) fail("phi must be > 0");
  if (!(config.decay_fraction > 0.0 && config.decay_fraction < 1.0)) {
    fail("decay_fraction must lie in (0,1)");
  }
  if (!(config.sigma >= 0.0)) fail("sigma must be >= 0");
  if (!(config.initial_weight >= config.sigma)) fail("initial_weight must be >= sigma");
  if (!(config.activation_increment > 0.0)) fail("activation_increment must be > 0");
  if (!(config.activation_decay >= 0.0 && config.activation_decay < 1.0)) {
    fail("activation_decay must lie in [0,1)");
  }
  if (!(config.skeleton_threshold >= 0.0)) fail("skeleton_threshold must be >= 0");
  if (config.window_size && *config.window_size == 0) fail("window_size must be positive");
}

struct MergeReport {
  std::vector<Label> created_cells;
  std::vector<Label> reactivated_cells;
  std::vector<LabelPair> created_associations;
  std::vector<LabelPair> reinforced_associations;

  friend bool operator==(const MergeReport&, const MergeReport&) = default;
};

struct ForgetReport {
  std::vector<LabelPair> associations;
  std::vector<Label> cells;

  bool empty() const noexcept { return associations.empty() && cells.empty(); }

  friend bool operator==(const ForgetReport&, const ForgetReport&) = default;
};

struct Skeleton {
  std::vector<Label> labels;  // sorted
  Tick tick = 0;
  double total_activation = 0.0;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

class MindMap {
 public:
  using EdgeKey = std::pair<CellId, CellId>;

  const std::map<CellId, EntityCell>& cells() const noexcept { return cells_; }
  const std::map<EdgeKey, Association>& associations() const noexcept { return edges_; }

  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  Tick tick() const noexcept { return tick_; }
  void set_tick(Tick tick) noexcept { tick_ = tick; }

  bool frozen() const noexcept { return frozen_; }
  void freeze() noexcept { frozen_ = true; }
  void unfreeze() noexcept { frozen_ = false; }

  const EntityCell* find(std::string_view label) const {
    auto it = by_label_.find(label);
    return it == by_label_.end() ? nullptr : &cells_.at(it->second);
  }

  const EntityCell* cell(CellId id) const {
    auto it = cells_.find(id);
    return it == cells_.end() ? nullptr : &it->second;
  }

  const Association* association(std::string_view x, std::string_view y) const {
    const EntityCell* cx = find(x);
    const EntityCell* cy = find(y);
    if (cx == nullptr || cy == nullptr || cx->id == cy->id) return nullptr;
    auto it = edges_.find(key(cx->id, cy->id));
    return it == edges_.end() ? nullptr : &it->second;
  }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(by_label_.size());
    for (const auto& [label, id] : by_label_) out.push_back(label);
    return out;
  }

  /// Direct construction for seeds and restore; bypasses merge semantics.
  const EntityCell& add_cell(Label label, double activation, double relevance = 0.0,
                             Tick last_active_tick = 0) {
    return insert_cell(EntityCell{next_id_, std::move(label), activation, relevance, last_active_tick});
  }

  const EntityCell& insert_cell(EntityCell cell) {
    if (cell.label.empty()) throw Error(ErrorCode::kMalformedSnapshot, "cell label is empty");
    if (by_label_.contains(cell.label)) {
      throw Error(ErrorCode::kMalformedSnapshot, "duplicate label \"" + cell.label + "\"");
    }
    if (cells_.contains(cell.id)) {
      throw Error(ErrorCode::kMalformedSnapshot, "duplicate cell id " + std::to_string(cell.id));
    }
    next_id_ = std::max(next_id_, cell.id + 1);
    by_label_.emplace(cell.label, cell.id);
    return cells_.emplace(cell.id, std::move(cell)).first->second;
  }

  const Association& connect(CellId x, CellId y, double weight, Tick last_active_tick = 0) {
    if (x == y) throw Error(ErrorCode::kMalformedSnapshot, "self-association on cell " + std::to_string(x));
    if (!cells_.contains(x) || !cells_.contains(y)) {
      throw Error(ErrorCode::kMalformedSnapshot, "association endpoint does not exist");
    }
    EdgeKey k = key(x, y);
    if (edges_.contains(k)) throw Error(ErrorCode::kMalformedSnapshot, "duplicate association");
    return edges_.emplace(k, Association{k.first, k.second, weight, last_active_tick}).first->second;
  }

  void set_relevance(CellId id, double relevance) { cells_.at(id).relevance = relevance; }

  MergeReport merge(const MiniNetwork& mini, const EngineConfig& config) {
    if (frozen_) throw Error(ErrorCode::kFrozenMap, "cannot merge into a frozen map");
    if (mini.empty()) throw Error(ErrorCode::kEmptyMiniNetwork, "mini-network has no labels");

    MergeReport report;
    std::vector<CellId> ids;
    ids.reserve(mini.labels.size());
    for (const Label& label : mini.labels) {
      auto it = by_label_.find(label);
      if (it == by_label_.end()) {
        const EntityCell& created = add_cell(label, config.activation_increment, 0.0, tick_);
        ids.push_back(created.id);
        report.created_cells.push_back(label);
      } else {
        EntityCell& cell = cells_.at(it->second);
        cell.activation += config.activation_increment;
        cell.last_active_tick = tick_;
        ids.push_back(cell.id);
        report.reactivated_cells.push_back(label);
      }
    }

    // Labels iterate in sorted order, so pairs come out (first < second).
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        EdgeKey k = key(ids[i], ids[j]);
        LabelPair pair{cells_.at(ids[i]).label, cells_.at(ids[j]).label};
        auto it = edges_.find(k);
        if (it == edges_.end()) {
          edges_.emplace(k, Association{k.first, k.second, config.initial_weight, tick_});
          report.created_associations.push_back(std::move(pair));
        } else {
          it->second.weight += config.phi;
          it->second.last_active_tick = tick_;
          report.reinforced_associations.push_back(std::move(pair));
        }
      }
    }
    return report;
  }

  ForgetReport decay(const std::set<Label>& active_labels, const EngineConfig& config) {
    if (frozen_) throw Error(ErrorCode::kFrozenMap, "cannot decay a frozen map");

    auto is_active = [&](CellId id) { return active_labels.contains(cells_.at(id).label); };
    ForgetReport report;
    const double step = config.decay_step();
    for (auto it = edges_.begin(); it != edges_.end();) {
      Association& edge = it->second;
      if (!is_active(edge.a) && !is_active(edge.b)) {
        edge.weight = std::max(0.0, edge.weight - step);
      }
      if (edge.weight < config.sigma) {
        report.associations.push_back(ordered_labels(edge.a, edge.b));
        it = edges_.erase(it);
      } else {
        ++it;
      }
    }

    if (config.activation_decay > 0.0) {
      for (auto& [id, cell] : cells_) {
        if (!active_labels.contains(cell.label)) cell.activation *= (1.0 - config.activation_decay);
      }
    }

    std::set<CellId> connected;
    for (const auto& [k, edge] : edges_) {
      connected.insert(edge.a);
      connected.insert(edge.b);
    }
    for (auto it = cells_.begin(); it != cells_.end();) {
      const EntityCell& cell = it->second;
      if (!connected.contains(cell.id) && cell.activation < config.activation_increment) {
        report.cells.push_back(cell.label);
        by_label_.erase(cell.label);
        it = cells_.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(report.associations.begin(), report.associations.end());
    std::sort(report.cells.begin(), report.cells.end());
    return report;
  }

  /// Connected components (size >= 2) of the subgraph induced by cells whose
  /// activation reaches the skeleton threshold.
  std::vector<Skeleton> skeletons(const EngineConfig& config) const {
    std::map<CellId, std::vector<CellId>> adjacency;
    for (const auto& [id, cell] : cells_) {
      if (cell.activation >= config.skeleton_threshold) adjacency[id];
    }
    for (const auto& [k, edge] : edges_) {
      if (adjacency.contains(edge.a) && adjacency.contains(edge.b)) {
        adjacency[edge.a].push_back(edge.b);
        adjacency[edge.b].push_back(edge.a);
      }
    }

    std::vector<Skeleton> out;
    std::set<CellId> seen;
    for (const auto& [start, unused] : adjacency) {
      if (seen.contains(start)) continue;
      std::vector<CellId> stack{start};
      std::vector<CellId> members;
      seen.insert(start);
      while (!stack.empty()) {
        CellId current = stack.back();
        stack.pop_back();
        members.push_back(current);
        for (CellId next : adjacency.at(current)) {
          if (seen.insert(next).second) stack.push_back(next);
        }
      }
      if (members.size() < 2) continue;
      Skeleton skeleton;
      skeleton.tick = tick_;
      for (CellId id : members) {
        skeleton.labels.push_back(cells_.at(id).label);
        skeleton.total_activation += cells_.at(id).activation;
      }
      std::sort(skeleton.labels.begin(), skeleton.labels.end());
      out.push_back(std::move(skeleton));
    }
    std::sort(out.begin(), out.end(),
              [](const Skeleton& x, const Skeleton& y) { return x.labels < y.labels; });
    return out;
  }

  friend bool operator==(const MindMap& x, const MindMap& y) {
    return x.tick_ == y.tick_ && x.frozen_ == y.frozen_ && x.cells_ == y.cells_ && x.edges_ == y.edges_;
  }

 private:
  static EdgeKey key(CellId x, CellId y) noexcept { return x < y ? EdgeKey{x, y} : EdgeKey{y, x}; }

  LabelPair ordered_labels(CellId x, CellId y) const {
    const Label& lx = cells_.at(x).label;
    const Label& ly = cells_.at(y).label;
    return lx < ly ? LabelPair{lx, ly} : LabelPair{ly, lx};
  }

  std::map<CellId, EntityCell> cells_;
  std::map<Label, CellId, std::less<>> by_label_;
  std::map<EdgeKey, Association> edges_;
  CellId next_id_ = 1;
  Tick tick_ = 0;
  bool frozen_ = false;
};

inline MergeReport merge_mini_network(MindMap& map, const MiniNetwork& mini, const EngineConfig& config) {
  return map.merge(mini, config);
}

inline ForgetReport apply_decay(MindMap& map, const std::set<Label>& active_labels,
                                const EngineConfig& config) {
  return map.decay(active_labels, config);
}

inline std::vector<Skeleton> extract_skeletons(const MindMap& map, const EngineConfig& config) {
  return map.skeletons(config);
}

// --------------------------------------------------------------------------
// Snapshot documents

inline Json snapshot(const MindMap& map) {
  using json_util::real;
  Json cells = Json::array();
  for (const auto& [id, cell] : map.cells()) {
    cells.push_back(Json{{"id", cell.id},
                         {"label", cell.label},
                         {"activation", real(cell.activation)},
                         {"relevance", real(cell.relevance)},
                         {"last_active_tick", cell.last_active_tick}});
  }
  Json edges = Json::array();
  for (const auto& [k, edge] : map.associations()) {
    edges.push_back(Json{{"a", edge.a},
                         {"b", edge.b},
                         {"weight", real(edge.weight)},
                         {"last_active_tick", edge.last_active_tick}});
  }
  Json doc;
  doc["tick"] = map.tick();
  doc["frozen"] = map.frozen();
  doc["cells"] = std::move(cells);
  doc["edges"] = std::move(edges);
  return doc;
}

inline MindMap restore(const Json& doc) {
  using namespace json_util;
  constexpr auto kCode = ErrorCode::kMalformedSnapshot;
  reject_unknown_keys(doc, {"tick", "frozen", "cells", "edges"}, "snapshot", kCode);

  MindMap map;
  const Json& cells = require(doc, "cells", "snapshot", kCode);
  const Json& edges = require(doc, "edges", "snapshot", kCode);
  if (!cells.is_array()) throw Error(kCode, "snapshot.cells: expected an array");
  if (!edges.is_array()) throw Error(kCode, "snapshot.edges: expected an array");

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string where = "snapshot.cells[" + std::to_string(i) + "]";
    const Json& c = cells[i];
    reject_unknown_keys(c, {"id", "label", "activation", "relevance", "last_active_tick"}, where, kCode);
    auto id = require_integer(c, "id", where, kCode);
    if (id < 0) throw Error(kCode, where + ".id: must be non-negative");
    EntityCell cell{static_cast<CellId>(id), require_string(c, "label", where, kCode),
                    require_number(c, "activation", where, kCode),
                    require_number(c, "relevance", where, kCode),
                    require_integer(c, "last_active_tick", where, kCode)};
    if (cell.activation < 0.0) throw Error(kCode, where + ".activation: must be >= 0");
    if (cell.relevance < 0.0 || cell.relevance > 1.0) {
      throw Error(kCode, where + ".relevance: must lie in [0,1]");
    }
    try {
      map.insert_cell(std::move(cell));
    } catch (const Error& e) {
      throw Error(kCode, where + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "snapshot.edges[" + std::to_string(i) + "]";
    const Json& e = edges[i];
    reject_unknown_keys(e, {"a", "b", "weight", "last_active_tick"}, where, kCode);
    auto a = require_integer(e, "a", where, kCode);
    auto b = require_integer(e, "b", where, kCode);
    double weight = require_number(e, "weight", where, kCode);
    if (weight < 0.0) throw Error(kCode, where + ".weight: must be >= 0");
    if (a < 0 || b < 0 || map.cell(static_cast<CellId>(a)) == nullptr ||
        map.cell(static_cast<CellId>(b)) == nullptr) {
      throw Error(kCode, where + ": references a missing cell");
    }
    try {
      map.connect(static_cast<CellId>(a), static_cast<CellId>(b), weight,
                  require_integer(e, "last_active_tick", where, kCode));
    } catch (const Error& err) {
      throw Error(kCode, where + ": " + err.what());
    }
  }
  map.set_tick(require_integer(doc, "tick", "snapshot", kCode));
  if (require_bool(doc, "frozen", "snapshot", kCode)) map.freeze();
  return map;
}

}  // namespace mindmeld
