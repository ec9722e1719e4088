#pragma once

// The Alice/Bob conversation and the two self maps it is evaluated against.
// The same documents ship as files under fixtures/alice_bob/.

#include <string_view>

namespace mindmeld::fixtures {

inline constexpr std::string_view kAliceBobSeeds = R"({
  "participants": [
    {
      "id": "alice",
      "alpha": 0.5,
      "graph": {
        "tick": 0,
        "frozen": true,
        "cells": [
          {"id": 1, "label": "sun", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0},
          {"id": 2, "label": "fresh-air", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0},
          {"id": 3, "label": "warm", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0},
          {"id": 4, "label": "beach", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0},
          {"id": 5, "label": "swimming", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0}
        ],
        "edges": [
          {"a": 1, "b": 3, "weight": 0.1, "last_active_tick": 0},
          {"a": 1, "b": 4, "weight": 0.1, "last_active_tick": 0},
          {"a": 2, "b": 4, "weight": 0.1, "last_active_tick": 0},
          {"a": 3, "b": 4, "weight": 0.1, "last_active_tick": 0},
          {"a": 4, "b": 5, "weight": 0.1, "last_active_tick": 0}
        ]
      }
    },
    {
      "id": "bob",
      "alpha": 0.5,
      "graph": {
        "tick": 0,
        "frozen": true,
        "cells": [
          {"id": 1, "label": "hot", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0},
          {"id": 2, "label": "sun", "activation": 1.0, "relevance": 0.0, "last_active_tick": 0}
        ],
        "edges": [
          {"a": 1, "b": 2, "weight": 0.1, "last_active_tick": 0}
        ]
      }
    }
  ]
}
)";

inline constexpr std::string_view kAliceBobTranscript =
    R"({"speaker":"bob","text":"The sun is shining, what a beautiful day."}
{"speaker":"alice","text":"The sun is very hot."}
{"speaker":"bob","text":"That is right, but I like sunny days."}
)";

inline constexpr std::string_view kAliceBobConfig = R"({
  "engine": {
    "phi": 0.1,
    "decay_fraction": 0.1,
    "sigma": 0.01,
    "initial_weight": 0.1,
    "activation_increment": 1.0,
    "skeleton_threshold": 2.0,
    "window_size": null,
    "rng_seed": 7
  },
  "memory": {"stm_capacity": 32, "promote_recurrence": 3, "stm_ttl": 10},
  "relevance_mode": "uniform",
  "default_alpha": 0.5,
  "default_strategy": "all"
}
)";

}  // namespace mindmeld::fixtures
