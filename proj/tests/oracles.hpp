#pragma once

// Independent reference implementations used only by tests. They work on
// plain label-keyed containers and never call into the engine's algorithms.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mindmeld/mindmap.hpp"

namespace mindmeld::oracle {

/// Label-keyed re-simulation of merge + decay.
struct HebbianSim {
  std::map<std::string, double> activation;
  std::map<std::pair<std::string, std::string>, double> weight;

  static std::pair<std::string, std::string> edge(const std::string& x, const std::string& y) {
    return x < y ? std::make_pair(x, y) : std::make_pair(y, x);
  }

  void merge(const std::set<std::string>& labels, const EngineConfig& c) {
    for (const auto& l : labels) activation[l] += c.activation_increment;
    std::vector<std::string> v(labels.begin(), labels.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        auto k = edge(v[i], v[j]);
        auto it = weight.find(k);
        if (it == weight.end()) {
          weight[k] = c.initial_weight;
        } else {
          it->second += c.phi;
        }
      }
    }
  }

  void decay(const std::set<std::string>& active, const EngineConfig& c) {
    std::map<std::pair<std::string, std::string>, double> kept;
    for (auto [k, w] : weight) {
      if (!active.count(k.first) && !active.count(k.second)) w = std::max(0.0, w - c.decay_fraction * c.phi);
      if (w >= c.sigma) kept[k] = w;
    }
    weight = std::move(kept);
    std::set<std::string> touched;
    for (const auto& [k, w] : weight) {
      touched.insert(k.first);
      touched.insert(k.second);
    }
    for (auto it = activation.begin(); it != activation.end();) {
      if (!touched.count(it->first) && it->second < c.activation_increment) {
        it = activation.erase(it);
      } else {
        ++it;
      }
    }
  }
};

/// Components of the thresholded subgraph via boolean transitive closure.
inline std::set<std::vector<std::string>> hot_components(const std::vector<std::string>& labels,
                                                         const std::vector<double>& activation,
                                                         const std::set<std::pair<int, int>>& edges,
                                                         double threshold) {
  const int n = static_cast<int>(labels.size());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  auto hot = [&](int i) { return activation[i] >= threshold; };
  for (int i = 0; i < n; ++i) reach[i][i] = hot(i);
  for (auto [a, b] : edges) {
    if (hot(a) && hot(b)) reach[a][b] = reach[b][a] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::set<std::vector<std::string>> out;
  for (int i = 0; i < n; ++i) {
    if (!hot(i)) continue;
    std::vector<std::string> members;
    for (int j = 0; j < n; ++j)
      if (reach[i][j]) members.push_back(labels[j]);
    std::sort(members.begin(), members.end());
    if (members.size() >= 2) out.insert(members);
  }
  return out;
}

struct WeightedCell {
  std::string label;
  double relevance;
};

/// Containment formula over every (self, outer) pair.
inline double match_pairs(const std::vector<WeightedCell>& selected_self, const std::vector<WeightedCell>& outer) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : selected_self) {
    den += s.relevance;
    for (const auto& o : outer) {
      if (s.label == o.label) num += std::min(s.relevance, o.relevance);
    }
  }
  return num / den;
}

inline double count_containment(const std::vector<std::string>& selected_self, const std::set<std::string>& outer) {
  std::size_t hits = 0;
  for (const auto& l : selected_self) hits += outer.count(l);
  return static_cast<double>(hits) / static_cast<double>(selected_self.size());
}

/// Random map over labels "w0".."w{vocab-1}": random subset, activations, edges.
inline MindMap random_map(std::mt19937_64& rng, int max_cells, int vocab, double edge_probability = 0.3) {
  std::uniform_int_distribution<int> count(1, max_cells);
  std::uniform_real_distribution<double> act(0.0, 4.0);
  std::bernoulli_distribution coin(edge_probability);
  std::vector<int> pool(vocab);
  for (int i = 0; i < vocab; ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), rng);
  const int n = std::min(count(rng), vocab);
  MindMap map;
  std::vector<CellId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(map.add_cell("w" + std::to_string(pool[i]), act(rng)).id);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) map.connect(ids[i], ids[j], 0.1);
  return map;
}

}  // namespace mindmeld::oracle
