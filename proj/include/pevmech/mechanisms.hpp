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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pevmech/model.hpp"
#include "pevmech/welfare.hpp"

namespace pevmech {

enum class Mechanism { groves_zero, groves_clarke, pev, pev_trust };

inline bool is_pev(Mechanism m) {
  return m == Mechanism::pev || m == Mechanism::pev_trust;
}

inline void require_mode(const Scenario& s, Mechanism m) {
  if (m == Mechanism::pev && s.mode != Mode::plain)
    throw ValidationError("mechanism pev requires plain mode");
  if (m == Mechanism::pev_trust && s.mode != Mode::trust)
    throw ValidationError("mechanism pev-trust requires trust mode");
}

struct PaymentBreakdown {
  AgentId agent = 0;
  double h_i = 0.0;
  double v_minus_i_success = 0.0;  // others' reported value, own coordinate 1
  double v_minus_i_failure = 0.0;  // own coordinate 0
  double payment_if_success = 0.0;
  double payment_if_failure = 0.0;
};

namespace detail {

// Sum of the reporting agents' declared valuations, excluding `skip`, at the
// point p. Ascending id order for reproducibility.
inline double others_value(const Scenario& s, const TypeReportProfile& reports,
                           const std::string& alloc_id, AgentId skip,
                           std::span<const double> p) {
  double acc = 0.0;
  for (AgentId j = 0; j < s.num_agents; ++j) {
    if (j == skip) continue;
    auto it = reports.reports.find(j);
    if (it == reports.reports.end()) continue;
    acc += it->second.valuations.at(alloc_id).eval(p);
  }
  return acc;
}

inline double ledger_max(const WelfareLedger& ledger) {
  double best = ledger.entries.front().second;
  for (const auto& [id, sw] : ledger.entries) best = std::max(best, sw);
  return best;
}

}  // namespace detail

// Best welfare the others can reach without i, at their reported types and
// with i's coordinate dropped to 0.
inline double pev_h(const Scenario& s, const TypeReportProfile& reports,
                    AgentId i) {
  TypeReportProfile rest = reports;
  rest.reports.erase(i);
  auto [id, ledger] = efficient_allocation(s, rest);
  return detail::ledger_max(ledger);
}

// Trust-mode pivot: the best welfare the others can reach without i when i
// holds the least favorable opinions about them. The minimization is over
// i's hypothetical opinion row; since each allocation's welfare sees only
// that allocation's row, min over rows and max over allocations commute and
// the search runs per allocation. Vertex candidates {0,1} are exact when
// both the aggregation entries and the reported valuations are multilinear
// (the composed welfare is then affine in each opinion); otherwise a 0.1
// grid, which still contains the vertices.
enum class OpinionSearch { automatic, vertices, grid };

inline double worst_trust_h(const Scenario& s,
                            const TypeReportProfile& reports, AgentId i,
                            OpinionSearch search = OpinionSearch::automatic) {
  if (s.mode != Mode::trust)
    throw ValidationError("worst_trust_h requires trust mode");
  TypeReportProfile rest = reports;
  rest.reports.erase(i);
  const auto type_of = detail::reported_types(s, rest);

  bool exact = true;
  for (AgentId j = 0; j < s.num_agents && exact; ++j) {
    for (const auto& a : s.allocations) {
      if (!s.aggregation[j].at(a.id).is_multilinear()) exact = false;
    }
  }
  for (const auto& [j, ty] : rest.reports) {
    for (const auto& [aid, v] : ty.valuations) {
      if (!v.is_multilinear()) exact = false;
    }
  }
  if (search == OpinionSearch::vertices) exact = true;
  if (search == OpinionSearch::grid) exact = false;
  std::vector<double> levels;
  if (exact) {
    levels = {0.0, 1.0};
  } else {
    for (int k = 0; k <= 10; ++k) levels.push_back(k / 10.0);
  }

  std::optional<double> best;
  for (std::size_t k = 0; k < s.allocations.size(); ++k) {
    const Allocation& a = s.allocations[k];
    if (!allocation_feasible(a, rest)) continue;
    // Only opinions about agents whose rho is actually aggregated matter.
    std::vector<AgentId> slots;
    for (AgentId j = 0; j < s.num_agents; ++j) {
      if (j != i && rest.is_reporter(j) && !a.empty_for(j)) slots.push_back(j);
    }
    std::vector<double> row(s.num_agents, 0.0);
    std::vector<std::size_t> idx(slots.size(), 0);
    std::optional<double> worst;
    while (true) {
      for (std::size_t t = 0; t < slots.size(); ++t)
        row[slots[t]] = levels[idx[t]];
      const auto p = detail::effective_pos(
          s, k, type_of, detail::OpinionOverride{i, row});
      const double sw = detail::others_value(s, rest, a.id, i, p);
      if (!worst || sw < *worst) worst = sw;
      std::size_t d = slots.size();
      while (d > 0 && idx[d - 1] + 1 == levels.size()) idx[--d] = 0;
      if (d == 0) break;
      ++idx[d - 1];
    }
    if (!best || *worst > *best) best = *worst;
  }
  return best.value_or(0.0);
}

inline double pivot_h(const Scenario& s, const TypeReportProfile& reports,
                      Mechanism mech, AgentId i) {
  return mech == Mechanism::pev_trust ? worst_trust_h(s, reports, i)
                                      : pev_h(s, reports, i);
}

enum class GrovesPivot { zero, clarke };

// Up-front payments x_i = h_i - V_{-i}, both computed from reports alone.
inline std::map<AgentId, double> groves_payment(const Scenario& s,
                                                const TypeReportProfile& reports,
                                                GrovesPivot pivot) {
  auto [chosen, ledger] = efficient_allocation(s, reports);
  const std::size_t k = s.allocation_index(chosen);
  const std::vector<double> p = reported_effective_pos(s, reports, k);
  std::map<AgentId, double> x;
  for (const auto& [i, ty] : reports.reports) {
    double h = 0.0;
    if (pivot == GrovesPivot::clarke) {
      TypeReportProfile rest = reports;
      rest.reports.erase(i);
      h = detail::ledger_max(efficient_allocation(s, rest).second);
    }
    x[i] = h - detail::others_value(s, reports, chosen, i, p);
  }
  return x;
}

// Success/failure payments for one agent, with the others held at the given
// true coordinates. Only i's own coordinate is substituted, so the payments
// do not depend on i's report once the chosen allocation is fixed.
inline PaymentBreakdown pev_payment_breakdown_at(
    const Scenario& s, const TypeReportProfile& reports, Mechanism mech,
    AgentId i, std::vector<double> true_pos) {
  require_mode(s, mech);
  auto [chosen, ledger] = efficient_allocation(s, reports);
  PaymentBreakdown bd;
  bd.agent = i;
  bd.h_i = pivot_h(s, reports, mech, i);
  true_pos[i] = 1.0;
  bd.v_minus_i_success = detail::others_value(s, reports, chosen, i, true_pos);
  true_pos[i] = 0.0;
  bd.v_minus_i_failure = detail::others_value(s, reports, chosen, i, true_pos);
  bd.payment_if_success = bd.h_i - bd.v_minus_i_success;
  bd.payment_if_failure = bd.h_i - bd.v_minus_i_failure;
  return bd;
}

inline PaymentBreakdown pev_payment_breakdown(const Scenario& s,
                                              const TypeReportProfile& reports,
                                              Mechanism mech, AgentId i) {
  auto [chosen, ledger] = efficient_allocation(s, reports);
  const std::size_t k = s.allocation_index(chosen);
  return pev_payment_breakdown_at(s, reports, mech, i,
                                  true_effective_pos(s, reports, k));
}

// Deployed-mode payment after observing the full completion vector: the
// expected value of the others is replaced by its realization.
inline std::map<AgentId, double> pev_payment_realized(
    const Scenario& s, const TypeReportProfile& reports, Mechanism mech,
    const std::vector<bool>& success) {
  require_mode(s, mech);
  auto [chosen, ledger] = efficient_allocation(s, reports);
  std::vector<double> sv(s.num_agents, 0.0);
  for (AgentId j = 0; j < s.num_agents; ++j) sv[j] = success[j] ? 1.0 : 0.0;
  std::map<AgentId, double> x;
  for (const auto& [i, ty] : reports.reports) {
    x[i] = pivot_h(s, reports, mech, i) -
           detail::others_value(s, reports, chosen, i, sv);
  }
  return x;
}

// Expected utility of agent i with true type `truth`, given the submitted
// reports. Groves utilities resolve before execution; PEV utilities average
// the success and failure branches under i's true probability, with the
// others' coordinates at their true values.
inline double expected_utility(const Scenario& s, const AgentType& truth,
                               const TypeReportProfile& reports,
                               Mechanism mech, AgentId i) {
  auto [chosen, ledger] = efficient_allocation(s, reports);
  const std::size_t k = s.allocation_index(chosen);
  const detail::TypeOf oracle = [&](AgentId j) -> const AgentType* {
    if (j == i) return &truth;
    return reports.is_reporter(j) ? &s.true_types[j] : nullptr;
  };
  std::vector<double> p = detail::effective_pos(s, k, oracle);
  const PolynomialValuation& v = truth.valuations.at(chosen);

  if (!is_pev(mech)) {
    const GrovesPivot pivot = mech == Mechanism::groves_clarke
                                  ? GrovesPivot::clarke
                                  : GrovesPivot::zero;
    const double x = groves_payment(s, reports, pivot).at(i);
    return v.eval(p) - x;
  }

  const PaymentBreakdown bd = pev_payment_breakdown_at(s, reports, mech, i, p);
  const double pi = p[i];
  p[i] = 1.0;
  const double u_succ = v.eval(p) - bd.payment_if_success;
  p[i] = 0.0;
  const double u_fail = v.eval(p) - bd.payment_if_failure;
  return pi * u_succ + (1.0 - pi) * u_fail;
}

}  // namespace pevmech
