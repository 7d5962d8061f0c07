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

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pevmech/polynomial.hpp"
#include "pevmech/rng.hpp"

namespace pevmech {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { plain, trust };

// A joint task assignment: tasks[i] is the (sorted, deduplicated) set of task
// labels agent i must complete under this allocation.
struct Allocation {
  std::string id;
  std::vector<std::vector<std::string>> tasks;

  bool empty_for(AgentId i) const { return tasks[i].empty(); }
  bool all_empty() const {
    return std::all_of(tasks.begin(), tasks.end(),
                       [](const auto& t) { return t.empty(); });
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// One agent's private type: a valuation polynomial per allocation, plus either
// a scalar probability-of-success per allocation (plain mode) or a trust row
// per allocation (trust mode; entry j is this agent's opinion of agent j).
struct AgentType {
  std::map<std::string, PolynomialValuation> valuations;
  std::map<std::string, double> pos;
  std::map<std::string, std::vector<double>> trust_row;

  friend bool operator==(const AgentType&, const AgentType&) = default;
};

// Trust aggregation: aggregation[i] maps allocation id to the polynomial
// f_i combining the column of opinions about agent i (variable j = the opinion
// held by agent j) into agent i's effective probability of success.
using AggregationSpec = std::vector<std::map<std::string, PolynomialValuation>>;

struct Scenario {
  std::size_t num_agents = 0;
  Mode mode = Mode::plain;
  std::vector<Allocation> allocations;   // declared order decides tie-breaks
  std::vector<AgentType> true_types;     // indexed by agent
  AggregationSpec aggregation;           // trust mode only

  std::size_t allocation_index(const std::string& id) const {
    for (std::size_t k = 0; k < allocations.size(); ++k) {
      if (allocations[k].id == id) return k;
    }
    throw ValidationError("unknown allocation id: " + id);
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Reports submitted to the mechanism. Agents absent from the map are
// non-participants; allocations assigning them tasks become infeasible.
struct TypeReportProfile {
  std::map<AgentId, AgentType> reports;

  bool is_reporter(AgentId i) const { return reports.count(i) != 0; }

  friend bool operator==(const TypeReportProfile&,
                         const TypeReportProfile&) = default;
};

namespace detail {

// Evaluation points used for range/sign/identity checks over [0,1]^n:
// the step-0.25 lattice plus 32 seeded uniform points. The lattice is
// truncated to a deterministic sample once it would exceed 100k points.
inline constexpr std::uint64_t kValidationSeed = 0x9E3779B9ULL;

inline std::vector<std::vector<double>> validation_points(std::size_t n) {
  std::vector<std::vector<double>> pts;
  static constexpr double kLevels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  double lattice = 1.0;
  for (std::size_t i = 0; i < n; ++i) lattice *= 5.0;
  if (lattice <= 100000.0) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = kLevels[idx[i]];
      pts.push_back(std::move(p));
      std::size_t d = n;
      while (d > 0 && idx[d - 1] == 4) idx[--d] = 0;
      if (d == 0) break;
      ++idx[d - 1];
    }
  } else {
    SplitMix64 g(split_seed(kValidationSeed, n));
    for (std::size_t k = 0; k < 100000; ++k) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = kLevels[g.next() % 5];
      pts.push_back(std::move(p));
    }
  }
  SplitMix64 g(split_seed(kValidationSeed, 1000003 + n));
  for (int k = 0; k < 32; ++k) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = g.next_unit();
    pts.push_back(std::move(p));
  }
  return pts;
}

inline std::string fresh_null_id(const std::vector<Allocation>& allocs) {
  std::string id = "null";
  auto taken = [&](const std::string& s) {
    return std::any_of(allocs.begin(), allocs.end(),
                       [&](const Allocation& a) { return a.id == s; });
  };
  while (taken(id)) id += "_";
  return id;
}

}  // namespace detail

inline constexpr double kAggregationTolerance = 1e-9;

// Checks every declared invariant and returns the canonical form: task lists
// sorted and deduplicated, polynomial terms merged, and a do-nothing
// allocation (every task set empty) appended when none was declared. Throws
// ValidationError naming the violated invariant. Idempotent.
inline Scenario validate_scenario(Scenario s) {
  const std::size_t n = s.num_agents;
  if (n == 0) throw ValidationError("scenario must declare at least one agent");
  if (s.true_types.size() != n)
    throw ValidationError("types must cover every agent");

  std::set<std::string> seen_ids;
  for (auto& a : s.allocations) {
    if (a.id.empty()) throw ValidationError("allocation id must be nonempty");
    if (!seen_ids.insert(a.id).second)
      throw ValidationError("duplicate allocation id: " + a.id);
    if (a.tasks.size() != n)
      throw ValidationError("allocation " + a.id +
                            ": task map must cover every agent");
    for (auto& t : a.tasks) {
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
  }

  const bool has_null =
      std::any_of(s.allocations.begin(), s.allocations.end(),
                  [](const Allocation& a) { return a.all_empty(); });
  if (!has_null) {
    Allocation null_alloc;
    null_alloc.id = detail::fresh_null_id(s.allocations);
    null_alloc.tasks.assign(n, {});
    s.allocations.push_back(std::move(null_alloc));
    const std::string& nid = s.allocations.back().id;
    for (auto& ty : s.true_types) {
      ty.valuations.emplace(nid, PolynomialValuation::zero());
      if (s.mode == Mode::plain) ty.pos.emplace(nid, 1.0);
      if (s.mode == Mode::trust)
        ty.trust_row.emplace(nid, std::vector<double>(n, 1.0));
    }
    if (s.mode == Mode::trust) {
      if (s.aggregation.size() != n)
        throw ValidationError("aggregation must cover every agent");
      for (std::size_t i = 0; i < n; ++i) {
        // A fresh null pays nobody; aggregate to the self-opinion so the
        // entry is still a valid probability.
        s.aggregation[i].emplace(
            nid, PolynomialValuation{{MonomialTerm{1.0, {{i, 1}}}}});
      }
    }
  }

  for (AgentId i = 0; i < n; ++i) {
    AgentType& ty = s.true_types[i];
    if (s.mode == Mode::plain && !ty.trust_row.empty())
      throw ValidationError("plain mode forbids trust rows (agent " +
                            std::to_string(i) + ")");
    if (s.mode == Mode::trust && !ty.pos.empty())
      throw ValidationError("trust mode forbids scalar pos entries (agent " +
                            std::to_string(i) + ")");
    for (const auto& a : s.allocations) {
      auto v = ty.valuations.find(a.id);
      if (v == ty.valuations.end())
        throw ValidationError("agent " + std::to_string(i) +
                              ": missing valuation for allocation " + a.id);
      // Re-canonicalize so hand-built scenarios and JSON input land in the
      // same form.
      v->second = PolynomialValuation{v->second.terms()};
      const AgentId mv = v->second.max_variable();
      if (mv != PolynomialValuation::kNoVariable && mv >= n)
        throw ValidationError("agent " + std::to_string(i) + ", allocation " +
                              a.id + ": valuation references agent " +
                              std::to_string(mv));
      if (s.mode == Mode::plain) {
        auto p = ty.pos.find(a.id);
        if (p == ty.pos.end())
          throw ValidationError("agent " + std::to_string(i) +
                                ": missing pos for allocation " + a.id);
        if (!(p->second >= 0.0 && p->second <= 1.0))
          throw ValidationError("agent " + std::to_string(i) +
                                ": pos outside [0,1] for allocation " + a.id);
      } else {
        auto r = ty.trust_row.find(a.id);
        if (r == ty.trust_row.end())
          throw ValidationError("agent " + std::to_string(i) +
                                ": missing trust row for allocation " + a.id);
        if (r->second.size() != n)
          throw ValidationError("agent " + std::to_string(i) +
                                ": trust row for allocation " + a.id +
                                " must have one entry per agent");
        for (double x : r->second) {
          if (!(x >= 0.0 && x <= 1.0))
            throw ValidationError("agent " + std::to_string(i) +
                                  ": trust entry outside [0,1] for allocation " +
                                  a.id);
        }
      }
    }
    if (s.mode == Mode::plain && ty.pos.size() != s.allocations.size())
      throw ValidationError("agent " + std::to_string(i) +
                            ": pos entry for undeclared allocation");
    if (s.mode == Mode::trust && ty.trust_row.size() != s.allocations.size())
      throw ValidationError("agent " + std::to_string(i) +
                            ": trust row for undeclared allocation");
    if (ty.valuations.size() != s.allocations.size())
      throw ValidationError("agent " + std::to_string(i) +
                            ": valuation for undeclared allocation");
  }

  if (s.mode == Mode::plain) {
    if (!s.aggregation.empty())
      throw ValidationError("plain mode forbids an aggregation block");
  } else {
    if (s.aggregation.size() != n)
      throw ValidationError("aggregation must cover every agent");
    const auto pts = detail::validation_points(n);
    for (AgentId i = 0; i < n; ++i) {
      for (const auto& a : s.allocations) {
        auto f = s.aggregation[i].find(a.id);
        if (f == s.aggregation[i].end())
          throw ValidationError("aggregation for agent " + std::to_string(i) +
                                ": missing entry for allocation " + a.id);
        f->second = PolynomialValuation{f->second.terms()};
        const AgentId mv = f->second.max_variable();
        if (mv != PolynomialValuation::kNoVariable && mv >= n)
          throw ValidationError("aggregation for agent " + std::to_string(i) +
                                " references agent " + std::to_string(mv));
        for (const auto& p : pts) {
          const double val = f->second.eval(p);
          if (val < -kAggregationTolerance ||
              val > 1.0 + kAggregationTolerance)
            throw ValidationError(
                "aggregation for agent " + std::to_string(i) +
                ", allocation " + a.id + ": value outside [0,1]");
        }
      }
      if (s.aggregation[i].size() != s.allocations.size())
        throw ValidationError("aggregation for agent " + std::to_string(i) +
                              ": entry for undeclared allocation");
    }
  }
  return s;
}

inline TypeReportProfile truthful_reports(const Scenario& s) {
  TypeReportProfile prof;
  for (AgentId i = 0; i < s.num_agents; ++i) prof.reports[i] = s.true_types[i];
  return prof;
}

// Removes one reporter. Excluding an agent that is not reporting is a
// caller bug, so it is rejected rather than ignored.
inline TypeReportProfile restrict_reports(TypeReportProfile prof,
                                          AgentId excluded) {
  if (prof.reports.erase(excluded) == 0)
    throw ValidationError("agent " + std::to_string(excluded) +
                          " is not among the reporters");
  return prof;
}

}  // namespace pevmech
