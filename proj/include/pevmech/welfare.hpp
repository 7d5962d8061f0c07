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
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pevmech/model.hpp"
#include "pevmech/polynomial.hpp"

namespace pevmech {

// Two allocations tie when their expected welfare differs by at most this.
inline constexpr double kTieTolerance = 1e-12;

// Witness gaps below this are treated as floating-point noise.
inline constexpr double kCheckTolerance = 1e-9;

inline double eval_valuation(const PolynomialValuation& v,
                             std::span<const double> p) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0))
      throw ValidationError("evaluation point outside [0,1]");
  }
  return v.eval(p);
}

namespace detail {

// Effective success-probability coordinate for one agent:
//   not participating        -> 0 (their tasks will never be executed)
//   participating, no tasks  -> 1 (vacuous completion, matches simulation)
//   otherwise                -> the type's scalar pos, or the aggregated
//                               opinion column in trust mode.
// type_of(j) returns the type supplying agent j's data, or nullptr when j
// does not participate. In trust mode the opinion column about each agent is
// built from the same participant set; `opinion_override` substitutes one
// holder's entire opinion row (the worst-trust candidate).
using TypeOf = std::function<const AgentType*(AgentId)>;

struct OpinionOverride {
  AgentId holder;
  std::span<const double> row;  // row[j] = holder's opinion about j
};

inline double aggregated_rho(const Scenario& s, std::size_t alloc_idx,
                             const TypeOf& type_of, AgentId target,
                             const std::optional<OpinionOverride>& ov) {
  const std::string& aid = s.allocations[alloc_idx].id;
  std::vector<double> column(s.num_agents, 0.0);
  for (AgentId j = 0; j < s.num_agents; ++j) {
    if (const AgentType* ty = type_of(j))
      column[j] = ty->trust_row.at(aid)[target];
  }
  if (ov) column[ov->holder] = ov->row[target];
  const double raw = s.aggregation[target].at(aid).eval(column);
  if (raw < -kAggregationTolerance || raw > 1.0 + kAggregationTolerance)
    throw ValidationError("aggregation for agent " + std::to_string(target) +
                          ", allocation " + aid + ": value outside [0,1]");
  return std::clamp(raw, 0.0, 1.0);
}

inline std::vector<double> effective_pos(
    const Scenario& s, std::size_t alloc_idx, const TypeOf& type_of,
    const std::optional<OpinionOverride>& ov = std::nullopt) {
  const Allocation& a = s.allocations[alloc_idx];
  std::vector<double> p(s.num_agents, 0.0);
  for (AgentId i = 0; i < s.num_agents; ++i) {
    const AgentType* ty = type_of(i);
    if (!ty) continue;
    if (a.empty_for(i)) {
      p[i] = 1.0;
    } else if (s.mode == Mode::plain) {
      p[i] = ty->pos.at(a.id);
    } else {
      p[i] = aggregated_rho(s, alloc_idx, type_of, i, ov);
    }
  }
  return p;
}

inline TypeOf reported_types(const Scenario&, const TypeReportProfile& r) {
  return [&r](AgentId j) -> const AgentType* {
    auto it = r.reports.find(j);
    return it == r.reports.end() ? nullptr : &it->second;
  };
}

// True types, with participation still taken from the report profile.
inline TypeOf oracle_types(const Scenario& s, const TypeReportProfile& r) {
  return [&s, &r](AgentId j) -> const AgentType* {
    return r.is_reporter(j) ? &s.true_types[j] : nullptr;
  };
}

}  // namespace detail

inline std::vector<double> reported_effective_pos(
    const Scenario& s, const TypeReportProfile& reports,
    std::size_t alloc_idx) {
  return detail::effective_pos(s, alloc_idx,
                               detail::reported_types(s, reports));
}

inline std::vector<double> true_effective_pos(const Scenario& s,
                                              const TypeReportProfile& reports,
                                              std::size_t alloc_idx) {
  return detail::effective_pos(s, alloc_idx, detail::oracle_types(s, reports));
}

// Raw aggregated PoS vector from reported opinion columns, before the
// participation and empty-task conventions are applied.
inline std::vector<double> aggregate_pos(const Scenario& s,
                                         const TypeReportProfile& reports,
                                         const std::string& alloc_id) {
  if (s.mode != Mode::trust)
    throw ValidationError("aggregate_pos requires trust mode");
  const std::size_t k = s.allocation_index(alloc_id);
  const auto type_of = detail::reported_types(s, reports);
  std::vector<double> rho(s.num_agents);
  for (AgentId i = 0; i < s.num_agents; ++i)
    rho[i] = detail::aggregated_rho(s, k, type_of, i, std::nullopt);
  return rho;
}

// An allocation can only be carried out if everyone it assigns work to is
// actually participating.
inline bool allocation_feasible(const Allocation& a,
                                const TypeReportProfile& reports) {
  for (AgentId i = 0; i < a.tasks.size(); ++i) {
    if (!a.empty_for(i) && !reports.is_reporter(i)) return false;
  }
  return true;
}

// Sum of the reporters' declared valuations at the reported effective PoS.
// Agents are summed in ascending id order so results are bit-reproducible.
inline double expected_social_welfare(const Scenario& s,
                                      const TypeReportProfile& reports,
                                      const std::string& alloc_id) {
  const std::size_t k = s.allocation_index(alloc_id);
  const std::vector<double> p = reported_effective_pos(s, reports, k);
  double sw = 0.0;
  for (AgentId j = 0; j < s.num_agents; ++j) {
    auto it = reports.reports.find(j);
    if (it == reports.reports.end()) continue;
    sw += it->second.valuations.at(alloc_id).eval(p);
  }
  return sw;
}

struct WelfareLedger {
  // Feasible allocations in declared order with their expected welfare.
  std::vector<std::pair<std::string, double>> entries;
  std::string argmax_id;
  std::vector<std::string> tie_set;  // everything within kTieTolerance of max
};

inline std::pair<std::string, WelfareLedger> efficient_allocation(
    const Scenario& s, const TypeReportProfile& reports) {
  WelfareLedger ledger;
  for (const Allocation& a : s.allocations) {
    if (!allocation_feasible(a, reports)) continue;
    ledger.entries.emplace_back(a.id, expected_social_welfare(s, reports, a.id));
  }
  // The null allocation is always feasible, so entries is nonempty.
  double best = ledger.entries.front().second;
  for (const auto& [id, sw] : ledger.entries) best = std::max(best, sw);
  for (const auto& [id, sw] : ledger.entries) {
    if (sw >= best - kTieTolerance) {
      ledger.tie_set.push_back(id);
      if (ledger.argmax_id.empty()) ledger.argmax_id = id;
    }
  }
  return {ledger.argmax_id, ledger};
}

struct MultilinearWitness {
  std::string allocation_id;  // empty for bare polynomial checks
  AgentId agent = 0;          // owner of the checked function, if any
  AgentId variable = 0;       // coordinate at which the identity fails
  std::vector<double> point;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct MultilinearityReport {
  bool is_multilinear = true;
  std::optional<MultilinearWitness> witness;
};

// The exponent test decides; the witness is diagnostic. The witness is the
// grid point maximizing |lhs - rhs| for the per-coordinate interpolation
// identity, so near-zero coefficients can yield gaps under kCheckTolerance.
inline MultilinearityReport check_multilinear_valuation(
    const PolynomialValuation& v) {
  if (v.is_multilinear()) return {};
  MultilinearityReport rep;
  rep.is_multilinear = false;
  const AgentId mv = v.max_variable();
  const std::size_t n = mv == PolynomialValuation::kNoVariable ? 0 : mv + 1;
  MultilinearWitness best;
  double best_gap = -1.0;
  for (const auto& pt : detail::validation_points(n)) {
    for (AgentId j = 0; j < n; ++j) {
      std::vector<double> hi = pt, lo = pt;
      hi[j] = 1.0;
      lo[j] = 0.0;
      const double lhs = v.eval(pt);
      const double rhs = pt[j] * v.eval(hi) + (1.0 - pt[j]) * v.eval(lo);
      const double gap = std::abs(lhs - rhs);
      if (gap > best_gap) {
        best_gap = gap;
        best = MultilinearWitness{"", 0, j, pt, lhs, rhs};
      }
    }
  }
  rep.witness = best;
  return rep;
}

inline MultilinearityReport check_multilinear_aggregation(
    const PolynomialValuation& f) {
  return check_multilinear_valuation(f);
}

// Scenario-wide scan: every valuation, and in trust mode every aggregation
// entry. The report's witness carries the first offender in declared order
// (allocations outer, agents inner), with the largest-gap point for that
// polynomial.
inline MultilinearityReport check_multilinear_scenario(const Scenario& s) {
  for (const Allocation& a : s.allocations) {
    for (AgentId i = 0; i < s.num_agents; ++i) {
      auto rep = check_multilinear_valuation(s.true_types[i].valuations.at(a.id));
      if (!rep.is_multilinear) {
        rep.witness->allocation_id = a.id;
        rep.witness->agent = i;
        return rep;
      }
      if (s.mode == Mode::trust) {
        auto arep = check_multilinear_aggregation(s.aggregation[i].at(a.id));
        if (!arep.is_multilinear) {
          arep.witness->allocation_id = a.id;
          arep.witness->agent = i;
          return arep;
        }
      }
    }
  }
  return {};
}

}  // namespace pevmech
