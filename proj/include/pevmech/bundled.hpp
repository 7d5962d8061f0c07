// Copyright 2026 The pevmech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "pevmech/json_io.hpp"
#include "pevmech/model.hpp"
#include "pevmech/verify.hpp"

namespace pevmech {

// Compiled-in scenario documents. They go through the same strict parser as
// user files, so the catalog doubles as schema examples.
struct BundledScenario {
  std::string name;
  std::string note;
  std::string json;
  std::vector<Tunable> tunables;
};

namespace bundled_json {

// Two routes for one package. The helper's leg on the relay route is sure
// to fail, so the direct route wins despite its coin-flip courier.
inline constexpr const char* kTable1 = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "tau", "tasks": {"0": ["haul"], "1": ["relay"]}},
    {"id": "tau_prime", "tasks": {"0": [], "1": ["direct"]}}
  ],
  "types": {
    "0": {
      "valuations": {"tau": [], "tau_prime": []},
      "pos": {"tau": 0.0, "tau_prime": 0.0}
    },
    "1": {
      "valuations": {
        "tau": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}],
        "tau_prime": [{"coeff": 1.0, "exponents": {"1": 1}}]
      },
      "pos": {"tau": 1.0, "tau_prime": 0.5}
    }
  }
})";

// Same shape, but the receiver values the helper's success squared.
inline constexpr const char* kTable1Square = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "tau", "tasks": {"0": ["haul"], "1": ["relay"]}},
    {"id": "tau_prime", "tasks": {"0": [], "1": ["direct"]}}
  ],
  "types": {
    "0": {
      "valuations": {"tau": [], "tau_prime": []},
      "pos": {"tau": 0.0, "tau_prime": 0.0}
    },
    "1": {
      "valuations": {
        "tau": [{"coeff": 1.0, "exponents": {"0": 2, "1": 1}}],
        "tau_prime": [{"coeff": 1.0, "exponents": {"1": 1}}]
      },
      "pos": {"tau": 1.0, "tau_prime": 0.5}
    }
  }
})";

// Squared helper coordinate with a coin-flip helper and a tunable price on
// the direct route.
inline constexpr const char* kSquareFamily = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "tau", "tasks": {"0": ["haul"], "1": ["relay"]}},
    {"id": "tau_prime", "tasks": {"0": [], "1": ["direct"]}}
  ],
  "types": {
    "0": {
      "valuations": {"tau": [], "tau_prime": []},
      "pos": {"tau": 0.5, "tau_prime": 0.0}
    },
    "1": {
      "valuations": {
        "tau": [{"coeff": 1.0, "exponents": {"0": 2, "1": 1}}],
        "tau_prime": [{"coeff": 0.6, "exponents": {"1": 1}}]
      },
      "pos": {"tau": 1.0, "tau_prime": 0.5}
    }
  }
})";

// Two jobs for one machinist; the onlooker pays for reliability squared on
// the joint job, the solo job has a tunable linear payoff.
inline constexpr const char* kQuadFamily = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "a", "tasks": {"0": ["grind"], "1": ["polish"]}},
    {"id": "b", "tasks": {"0": ["grind"], "1": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "a": [{"coeff": 0.3, "exponents": {}}],
        "b": [{"coeff": 0.7, "exponents": {"0": 1}}]
      },
      "pos": {"a": 0.5, "b": 0.9}
    },
    "1": {
      "valuations": {
        "a": [{"coeff": 1.0, "exponents": {"0": 2}}],
        "b": []
      },
      "pos": {"a": 1.0, "b": 1.0}
    }
  }
})";

// Three-agent pipeline: the consumer values the middle stage squared, with
// a tunable fallback that skips the middle stage.
inline constexpr const char* kCrossFamily = R"({
  "agents": [0, 1, 2],
  "mode": "plain",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["scan"], "2": ["upload"]}},
    {"id": "b", "tasks": {"0": [], "1": [], "2": ["upload"]}}
  ],
  "types": {
    "0": {"valuations": {"a": [], "b": []}, "pos": {"a": 1.0, "b": 1.0}},
    "1": {"valuations": {"a": [], "b": []}, "pos": {"a": 0.5, "b": 1.0}},
    "2": {
      "valuations": {
        "a": [{"coeff": 1.0, "exponents": {"1": 2, "2": 1}}],
        "b": [{"coeff": 0.6, "exponents": {"2": 1}}]
      },
      "pos": {"a": 1.0, "b": 0.5}
    }
  }
})";

// Fully multilinear control family: the tunable knob changes the chosen
// route but never opens a profitable deviation.
inline constexpr const char* kLinearFamily = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "tau", "tasks": {"0": ["haul"], "1": ["relay"]}},
    {"id": "tau_prime", "tasks": {"0": [], "1": ["direct"]}}
  ],
  "types": {
    "0": {
      "valuations": {"tau": [], "tau_prime": []},
      "pos": {"tau": 0.0, "tau_prime": 0.0}
    },
    "1": {
      "valuations": {
        "tau": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}],
        "tau_prime": [{"coeff": 1.0, "exponents": {"1": 1}}]
      },
      "pos": {"tau": 1.0, "tau_prime": 0.5}
    }
  }
})";

// Driver, packer, and courier with four ways to move a parcel.
inline constexpr const char* kDeliveryChain = R"({
  "agents": [0, 1, 2],
  "mode": "plain",
  "allocations": [
    {"id": "truck", "tasks": {"0": ["drive"], "1": ["pack"], "2": []}},
    {"id": "bike", "tasks": {"0": [], "1": ["pack"], "2": ["ride"]}},
    {"id": "pickup", "tasks": {"0": [], "1": ["pack"], "2": []}},
    {"id": "drone", "tasks": {"0": ["fly"], "1": [], "2": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "truck": [{"coeff": 0.2, "exponents": {"0": 1}}],
        "bike": [],
        "pickup": [],
        "drone": [{"coeff": 0.1, "exponents": {"0": 1}}]
      },
      "pos": {"truck": 0.9, "bike": 1.0, "pickup": 1.0, "drone": 0.5}
    },
    "1": {
      "valuations": {
        "truck": [{"coeff": 0.1, "exponents": {}}],
        "bike": [{"coeff": 0.2, "exponents": {"2": 1}}],
        "pickup": [],
        "drone": []
      },
      "pos": {"truck": 0.8, "bike": 0.9, "pickup": 0.95, "drone": 1.0}
    },
    "2": {
      "valuations": {
        "truck": [{"coeff": 0.9, "exponents": {"0": 1, "1": 1}}],
        "bike": [{"coeff": 0.6, "exponents": {"1": 1, "2": 1}}],
        "pickup": [{"coeff": 0.3, "exponents": {"1": 1}}],
        "drone": [{"coeff": 0.5, "exponents": {"0": 1}}]
      },
      "pos": {"truck": 1.0, "bike": 0.7, "pickup": 1.0, "drone": 1.0}
    }
  }
})";

// Two drivers who can ride solo, share a car, or sit out. The sit-out
// option doubles as the do-nothing allocation.
inline constexpr const char* kRideShare = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "solo_a", "tasks": {"0": ["drive"], "1": []}},
    {"id": "solo_b", "tasks": {"0": [], "1": ["drive"]}},
    {"id": "carpool", "tasks": {"0": ["drive"], "1": ["navigate"]}},
    {"id": "wait", "tasks": {"0": [], "1": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "solo_a": [{"coeff": 0.4, "exponents": {"0": 1}}],
        "solo_b": [{"coeff": 0.2, "exponents": {"1": 1}}],
        "carpool": [{"coeff": 0.3, "exponents": {"0": 1, "1": 1}}],
        "wait": [{"coeff": 0.05, "exponents": {}}]
      },
      "pos": {"solo_a": 0.8, "solo_b": 1.0, "carpool": 0.9, "wait": 1.0}
    },
    "1": {
      "valuations": {
        "solo_a": [{"coeff": 0.3, "exponents": {"0": 1}}],
        "solo_b": [{"coeff": 0.5, "exponents": {"1": 1}}],
        "carpool": [{"coeff": 0.4, "exponents": {"0": 1, "1": 1}}],
        "wait": []
      },
      "pos": {"solo_a": 1.0, "solo_b": 0.6, "carpool": 0.9, "wait": 1.0}
    }
  }
})";

// Four compute nodes splitting jobs; the client on node 3 pays for joint
// completion.
inline constexpr const char* kComputeGrid = R"({
  "agents": [0, 1, 2, 3],
  "mode": "plain",
  "allocations": [
    {"id": "big_job", "tasks": {"0": ["c0"], "1": ["c1"], "2": ["c2"], "3": []}},
    {"id": "split_01", "tasks": {"0": ["c0"], "1": ["c1"], "2": [], "3": []}},
    {"id": "split_23", "tasks": {"0": [], "1": [], "2": ["c2"], "3": ["c3"]}},
    {"id": "solo_0", "tasks": {"0": ["c0"], "1": [], "2": [], "3": []}},
    {"id": "solo_2", "tasks": {"0": [], "1": [], "2": ["c2"], "3": []}},
    {"id": "idle", "tasks": {"0": [], "1": [], "2": [], "3": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "big_job": [{"coeff": 0.1, "exponents": {"0": 1}}],
        "split_01": [],
        "split_23": [{"coeff": 0.5, "exponents": {"2": 1, "3": 1}}],
        "solo_0": [{"coeff": 0.05, "exponents": {"0": 1}}],
        "solo_2": [],
        "idle": []
      },
      "pos": {"big_job": 0.9, "split_01": 0.8, "split_23": 1.0, "solo_0": 0.6, "solo_2": 1.0, "idle": 1.0}
    },
    "1": {
      "valuations": {
        "big_job": [],
        "split_01": [],
        "split_23": [{"coeff": 0.2, "exponents": {"3": 1}}],
        "solo_0": [],
        "solo_2": [{"coeff": 0.35, "exponents": {"2": 1}}],
        "idle": []
      },
      "pos": {"big_job": 0.9, "split_01": 0.8, "split_23": 1.0, "solo_0": 1.0, "solo_2": 1.0, "idle": 1.0}
    },
    "2": {
      "valuations": {
        "big_job": [],
        "split_01": [{"coeff": 0.1, "exponents": {}}],
        "split_23": [],
        "solo_0": [],
        "solo_2": [],
        "idle": []
      },
      "pos": {"big_job": 0.9, "split_01": 1.0, "split_23": 0.7, "solo_0": 1.0, "solo_2": 0.75, "idle": 1.0}
    },
    "3": {
      "valuations": {
        "big_job": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1, "2": 1}}],
        "split_01": [{"coeff": 0.6, "exponents": {"0": 1, "1": 1}}],
        "split_23": [],
        "solo_0": [{"coeff": 0.4, "exponents": {"0": 1}}],
        "solo_2": [],
        "idle": []
      },
      "pos": {"big_job": 1.0, "split_01": 1.0, "split_23": 0.9, "solo_0": 1.0, "solo_2": 1.0, "idle": 1.0}
    }
  }
})";

// Three traders shipping goods to one another, all payoffs linear.
inline constexpr const char* kMarketLinear = R"({
  "agents": [0, 1, 2],
  "mode": "plain",
  "allocations": [
    {"id": "sell_01", "tasks": {"0": ["ship"], "1": [], "2": []}},
    {"id": "sell_02", "tasks": {"0": ["ship"], "1": [], "2": []}},
    {"id": "sell_12", "tasks": {"0": [], "1": ["ship"], "2": []}},
    {"id": "swap", "tasks": {"0": [], "1": ["ship"], "2": ["ship"]}},
    {"id": "hold", "tasks": {"0": [], "1": [], "2": ["store"]}}
  ],
  "types": {
    "0": {
      "valuations": {
        "sell_01": [{"coeff": 0.1, "exponents": {"0": 1}}],
        "sell_02": [{"coeff": 0.1, "exponents": {"0": 1}}],
        "sell_12": [],
        "swap": [{"coeff": 0.2, "exponents": {"1": 1, "2": 1}}],
        "hold": []
      },
      "pos": {"sell_01": 0.9, "sell_02": 0.9, "sell_12": 1.0, "swap": 1.0, "hold": 1.0}
    },
    "1": {
      "valuations": {
        "sell_01": [{"coeff": 0.8, "exponents": {"0": 1}}],
        "sell_02": [],
        "sell_12": [{"coeff": 0.05, "exponents": {"1": 1}}],
        "swap": [{"coeff": 0.3, "exponents": {"2": 1}}],
        "hold": []
      },
      "pos": {"sell_01": 1.0, "sell_02": 1.0, "sell_12": 0.7, "swap": 0.8, "hold": 1.0}
    },
    "2": {
      "valuations": {
        "sell_01": [],
        "sell_02": [{"coeff": 0.7, "exponents": {"0": 1}}],
        "sell_12": [{"coeff": 0.9, "exponents": {"1": 1}}],
        "swap": [{"coeff": 0.3, "exponents": {"1": 1}}],
        "hold": [{"coeff": 0.15, "exponents": {"2": 1}}]
      },
      "pos": {"sell_01": 1.0, "sell_02": 1.0, "sell_12": 1.0, "swap": 0.8, "hold": 1.0}
    }
  }
})";

// A bystander who is hurt by the worker's success. Welfare ties the
// do-nothing allocation, so the harmful allocation is still chosen.
inline constexpr const char* kIrNegative = R"({
  "agents": [0, 1],
  "mode": "plain",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["work"]}}
  ],
  "types": {
    "0": {
      "valuations": {"a": [{"coeff": -1.0, "exponents": {"1": 1}}]},
      "pos": {"a": 1.0}
    },
    "1": {
      "valuations": {"a": [{"coeff": 1.0, "exponents": {"1": 1}}]},
      "pos": {"a": 0.8}
    }
  }
})";

// Opinions blended by a fixed weighted average.
inline constexpr const char* kTrustWeighted = R"({
  "agents": [0, 1],
  "mode": "trust",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["serve"]}},
    {"id": "b", "tasks": {"0": ["serve"], "1": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "a": [{"coeff": 0.4, "exponents": {"1": 1}}],
        "b": [{"coeff": 0.6, "exponents": {"0": 1}}]
      },
      "trust_row": {"a": [1.0, 0.8], "b": [0.7, 1.0]}
    },
    "1": {
      "valuations": {
        "a": [{"coeff": 0.5, "exponents": {"1": 1}}],
        "b": [{"coeff": 0.2, "exponents": {"0": 1}}]
      },
      "trust_row": {"a": [1.0, 0.9], "b": [0.6, 1.0]}
    }
  },
  "aggregation": {
    "0": {
      "a": [{"coeff": 0.3, "exponents": {"0": 1}}, {"coeff": 0.7, "exponents": {"1": 1}}],
      "b": [{"coeff": 0.3, "exponents": {"0": 1}}, {"coeff": 0.7, "exponents": {"1": 1}}]
    },
    "1": {
      "a": [{"coeff": 0.3, "exponents": {"0": 1}}, {"coeff": 0.7, "exponents": {"1": 1}}],
      "b": [{"coeff": 0.3, "exponents": {"0": 1}}, {"coeff": 0.7, "exponents": {"1": 1}}]
    }
  }
})";

// Opinions blended by their product, so any doubter can sink a rating.
inline constexpr const char* kTrustProduct = R"({
  "agents": [0, 1],
  "mode": "trust",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["serve"]}},
    {"id": "b", "tasks": {"0": ["serve"], "1": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "a": [{"coeff": 0.3, "exponents": {"1": 1}}],
        "b": [{"coeff": 0.5, "exponents": {"0": 1}}]
      },
      "trust_row": {"a": [1.0, 0.9], "b": [0.8, 1.0]}
    },
    "1": {
      "valuations": {
        "a": [{"coeff": 0.6, "exponents": {"1": 1}}],
        "b": [{"coeff": 0.1, "exponents": {"0": 1}}]
      },
      "trust_row": {"a": [1.0, 0.8], "b": [0.9, 1.0]}
    }
  },
  "aggregation": {
    "0": {
      "a": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}],
      "b": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}]
    },
    "1": {
      "a": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}],
      "b": [{"coeff": 1.0, "exponents": {"0": 1, "1": 1}}]
    }
  }
})";

// Aggregation squares agent 0's opinion of agent 1, so the blend itself is
// not multilinear. Valuations stay multilinear.
inline constexpr const char* kTrustSquare = R"({
  "agents": [0, 1],
  "mode": "trust",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["serve"]}},
    {"id": "b", "tasks": {"0": ["serve"], "1": []}}
  ],
  "types": {
    "0": {
      "valuations": {
        "a": [{"coeff": 0.4, "exponents": {"1": 1}}],
        "b": [{"coeff": 0.7, "exponents": {"0": 1}}]
      },
      "trust_row": {"a": [1.0, 0.7], "b": [0.9, 1.0]}
    },
    "1": {
      "valuations": {
        "a": [{"coeff": 0.4, "exponents": {"1": 1}}],
        "b": []
      },
      "trust_row": {"a": [1.0, 0.5], "b": [0.8, 1.0]}
    }
  },
  "aggregation": {
    "0": {
      "a": [{"coeff": 1.0, "exponents": {"0": 1}}],
      "b": [{"coeff": 1.0, "exponents": {"0": 1}}]
    },
    "1": {
      "a": [{"coeff": 1.0, "exponents": {"0": 2}}],
      "b": [{"coeff": 1.0, "exponents": {"0": 2}}]
    }
  }
})";

// Multilinear aggregation but a squared valuation on the served rating, so
// a server can profit by talking its own rating up.
inline constexpr const char* kTrustNonlinVal = R"({
  "agents": [0, 1],
  "mode": "trust",
  "allocations": [
    {"id": "a", "tasks": {"0": [], "1": ["serve"]}},
    {"id": "b", "tasks": {"0": [], "1": ["serve"]}}
  ],
  "types": {
    "0": {
      "valuations": {
        "a": [{"coeff": 1.0, "exponents": {"1": 2}}],
        "b": []
      },
      "trust_row": {"a": [1.0, 0.5], "b": [1.0, 0.5]}
    },
    "1": {
      "valuations": {
        "a": [{"coeff": 0.2, "exponents": {"1": 1}}],
        "b": [{"coeff": 1.0, "exponents": {"1": 1}}]
      },
      "trust_row": {"a": [1.0, 0.5], "b": [1.0, 0.5]}
    }
  },
  "aggregation": {
    "0": {
      "a": [{"coeff": 0.5, "exponents": {"0": 1}}, {"coeff": 0.5, "exponents": {"1": 1}}],
      "b": [{"coeff": 0.5, "exponents": {"0": 1}}, {"coeff": 0.5, "exponents": {"1": 1}}]
    },
    "1": {
      "a": [{"coeff": 0.5, "exponents": {"0": 1}}, {"coeff": 0.5, "exponents": {"1": 1}}],
      "b": [{"coeff": 0.5, "exponents": {"0": 1}}, {"coeff": 0.5, "exponents": {"1": 1}}]
    }
  }
})";

}  // namespace bundled_json

inline const std::vector<BundledScenario>& bundled_catalog() {
  static const std::vector<BundledScenario> catalog = {
      {"table1", "two-route relay whose helper leg is sure to fail",
       bundled_json::kTable1, {}},
      {"table1_square",
       "relay variant valuing the helper's success squared",
       bundled_json::kTable1Square, {}},
      {"square_family",
       "tunable relay with a squared helper coordinate",
       bundled_json::kSquareFamily, {Tunable{1, "tau_prime", 0}}},
      {"quad_family",
       "tunable two-job shop with a squared cross valuation",
       bundled_json::kQuadFamily, {Tunable{0, "b", 0}}},
      {"cross_family",
       "tunable three-agent pipeline with a squared middle stage",
       bundled_json::kCrossFamily, {Tunable{2, "b", 0}}},
      {"linear_family", "tunable fully multilinear control",
       bundled_json::kLinearFamily, {Tunable{1, "tau_prime", 0}}},
      {"delivery_chain", "three-agent delivery market, multilinear",
       bundled_json::kDeliveryChain, {}},
      {"ride_share", "two drivers with solo, carpool, and wait options",
       bundled_json::kRideShare, {}},
      {"compute_grid", "four compute nodes with split and solo jobs",
       bundled_json::kComputeGrid, {}},
      {"market_linear", "three traders, all payoffs linear",
       bundled_json::kMarketLinear, {}},
      {"ir_negative", "bystander harmed by the worker's success",
       bundled_json::kIrNegative, {}},
      {"trust_weighted", "opinions blended by weighted average",
       bundled_json::kTrustWeighted, {}},
      {"trust_product", "opinions blended by product",
       bundled_json::kTrustProduct, {}},
      {"trust_square", "aggregation squares one opinion coordinate",
       bundled_json::kTrustSquare, {}},
      {"trust_nonlin_val",
       "multilinear aggregation with a squared valuation",
       bundled_json::kTrustNonlinVal, {}},
  };
  return catalog;
}

inline const BundledScenario& find_bundled(const std::string& name) {
  for (const BundledScenario& b : bundled_catalog()) {
    if (b.name == name) return b;
  }
  std::string names;
  for (const BundledScenario& b : bundled_catalog()) {
    if (!names.empty()) names += ", ";
    names += b.name;
  }
  throw ValidationError("unknown bundled scenario \"" + name +
                        "\" (available: " + names + ")");
}

inline Scenario load_bundled(const std::string& name) {
  return parse_scenario_text(find_bundled(name).json);
}

inline ScenarioFamily load_bundled_family(const std::string& name) {
  const BundledScenario& b = find_bundled(name);
  return ScenarioFamily{parse_scenario_text(b.json), b.tunables};
}

}  // namespace pevmech
