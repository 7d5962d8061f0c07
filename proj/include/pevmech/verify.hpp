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
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pevmech/mechanisms.hpp"
#include "pevmech/model.hpp"
#include "pevmech/rng.hpp"
#include "pevmech/welfare.hpp"

namespace pevmech {

// Utility gains above this are treated as real manipulations, below as
// floating-point noise. Bundled counterexamples are built with gains >= 0.01.
inline constexpr double kGainEpsilon = 1e-9;

struct DeviationSpace {
  enum class Scope { pos_only, valuations_only, both };

  std::vector<double> pos_grid;
  std::vector<double> coeff_scales{0.0, 0.5, 1.0, 2.0};
  Scope scope = Scope::both;

  DeviationSpace() {
    for (int k = 0; k <= 10; ++k) pos_grid.push_back(k / 10.0);
  }
};

namespace detail {

inline std::string trim_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline std::string row_to_string(const std::vector<double>& row) {
  std::string s = "(";
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j) s += ",";
    s += trim_num(row[j]);
  }
  return s + ")";
}

}  // namespace detail

struct Misreport {
  AgentType type;
  std::string summary;
};

// Every candidate report of one agent, truthful first. Reports deviate from
// the truth one allocation at a time: in plain mode the pos entry runs over
// the grid (plus the true value when the grid misses it) crossed with whole-
// polynomial coefficient scales; trust mode replaces the pos axis with the
// full opinion row over grid^n. The exact-truthful cell of each cross
// product is skipped since row zero already covers it.
inline std::vector<Misreport> enumerate_misreports(const Scenario& s,
                                                   const DeviationSpace& space,
                                                   AgentId i) {
  const AgentType& truth = s.true_types[i];
  std::vector<Misreport> out;
  out.push_back({truth, "truthful"});

  const bool vary_pos = space.scope != DeviationSpace::Scope::valuations_only;
  const bool vary_val = space.scope != DeviationSpace::Scope::pos_only;
  std::vector<double> scales =
      vary_val ? space.coeff_scales : std::vector<double>{1.0};

  for (const Allocation& a : s.allocations) {
    if (s.mode == Mode::plain) {
      const double true_pos = truth.pos.at(a.id);
      std::vector<double> grid =
          vary_pos ? space.pos_grid : std::vector<double>{true_pos};
      if (vary_pos &&
          std::find(grid.begin(), grid.end(), true_pos) == grid.end())
        grid.push_back(true_pos);
      for (double g : grid) {
        for (double sc : scales) {
          if (g == true_pos && sc == 1.0) continue;
          AgentType m = truth;
          m.pos[a.id] = g;
          m.valuations[a.id] = truth.valuations.at(a.id).scaled(sc);
          out.push_back({std::move(m), "alloc=" + a.id +
                                           " pos=" + detail::trim_num(g) +
                                           " scale=" + detail::trim_num(sc)});
        }
      }
    } else {
      const std::vector<double>& true_row = truth.trust_row.at(a.id);
      std::vector<std::vector<double>> rows;
      if (vary_pos) {
        std::vector<std::size_t> idx(s.num_agents, 0);
        while (true) {
          std::vector<double> row(s.num_agents);
          for (AgentId j = 0; j < s.num_agents; ++j)
            row[j] = space.pos_grid[idx[j]];
          rows.push_back(std::move(row));
          std::size_t d = s.num_agents;
          while (d > 0 && idx[d - 1] + 1 == space.pos_grid.size()) idx[--d] = 0;
          if (d == 0) break;
          ++idx[d - 1];
        }
        if (std::find(rows.begin(), rows.end(), true_row) == rows.end())
          rows.push_back(true_row);
      } else {
        rows.push_back(true_row);
      }
      for (const auto& row : rows) {
        for (double sc : scales) {
          if (row == true_row && sc == 1.0) continue;
          AgentType m = truth;
          m.trust_row[a.id] = row;
          m.valuations[a.id] = truth.valuations.at(a.id).scaled(sc);
          out.push_back({std::move(m), "alloc=" + a.id +
                                           " row=" + detail::row_to_string(row) +
                                           " scale=" + detail::trim_num(sc)});
        }
      }
    }
  }
  return out;
}

struct DeviationEntry {
  std::string misreport;
  double truthful_eu = 0.0;
  double deviating_eu = 0.0;

  double gain() const { return deviating_eu - truthful_eu; }
};

struct DeviationReport {
  AgentId agent = 0;
  double max_gain = 0.0;
  std::optional<AgentType> best_misreport;
  std::string best_summary;
  // First entry in scan order whose gain clears kGainEpsilon.
  std::optional<DeviationEntry> first_profitable;
  std::vector<DeviationEntry> ledger;

  bool manipulation_found() const { return max_gain > kGainEpsilon; }
};

// Ex-post sweep: the others stay truthful, the chosen agent runs through the
// deviation space. Scan order is fixed (allocations as declared, grid
// ascending, scales as declared) so witnesses are reproducible.
inline DeviationReport check_ex_post_truthful_agent(const Scenario& s,
                                                    Mechanism mech,
                                                    const DeviationSpace& space,
                                                    AgentId i) {
  require_mode(s, mech);
  const TypeReportProfile truthful = truthful_reports(s);
  const double eu_truth =
      expected_utility(s, s.true_types[i], truthful, mech, i);

  DeviationReport rep;
  rep.agent = i;
  rep.max_gain = -std::numeric_limits<double>::infinity();
  for (const Misreport& m : enumerate_misreports(s, space, i)) {
    TypeReportProfile prof = truthful;
    prof.reports[i] = m.type;
    const double eu_dev = expected_utility(s, s.true_types[i], prof, mech, i);
    DeviationEntry entry{m.summary, eu_truth, eu_dev};
    if (entry.gain() > rep.max_gain) {
      rep.max_gain = entry.gain();
      rep.best_misreport = m.type;
      rep.best_summary = m.summary;
    }
    if (!rep.first_profitable && entry.gain() > kGainEpsilon)
      rep.first_profitable = entry;
    rep.ledger.push_back(std::move(entry));
  }
  return rep;
}

inline std::vector<DeviationReport> check_ex_post_truthful(
    const Scenario& s, Mechanism mech, const DeviationSpace& space,
    std::optional<AgentId> agent = std::nullopt) {
  std::vector<DeviationReport> reps;
  if (agent) {
    reps.push_back(check_ex_post_truthful_agent(s, mech, space, *agent));
  } else {
    for (AgentId i = 0; i < s.num_agents; ++i)
      reps.push_back(check_ex_post_truthful_agent(s, mech, space, i));
  }
  return reps;
}

// Independent Bernoulli draws from the scenario's true success
// probabilities. Agents without tasks succeed vacuously and consume no
// randomness, so adding a spectator agent never shifts the others' draws.
inline std::vector<bool> simulate_execution(const Scenario& s,
                                            const std::string& alloc_id,
                                            std::uint64_t seed) {
  const std::size_t k = s.allocation_index(alloc_id);
  const detail::TypeOf everyone = [&s](AgentId j) {
    return &s.true_types[j];
  };
  const std::vector<double> p = detail::effective_pos(s, k, everyone);
  SplitMix64 gen(split_seed(seed, k));
  std::vector<bool> success(s.num_agents, false);
  for (AgentId i = 0; i < s.num_agents; ++i) {
    if (s.allocations[k].empty_for(i)) {
      success[i] = true;
    } else {
      success[i] = gen.next_unit() < p[i];
    }
  }
  return success;
}

struct MechanismOutcome {
  std::string chosen;
  std::string mode_tag;  // "realized" for simulated episodes
  std::map<AgentId, double> payments;
  std::map<AgentId, bool> success;
  std::map<AgentId, double> utilities;

  friend bool operator==(const MechanismOutcome&,
                         const MechanismOutcome&) = default;
};

// One full round: choose the allocation from reports, simulate execution
// against the true types, settle payments, score realized utilities.
inline MechanismOutcome run_episode(const Scenario& s,
                                    const TypeReportProfile& reports,
                                    Mechanism mech, std::uint64_t seed) {
  require_mode(s, mech);
  MechanismOutcome out;
  out.mode_tag = "realized";
  auto [chosen, ledger] = efficient_allocation(s, reports);
  out.chosen = chosen;
  const std::vector<bool> success = simulate_execution(s, chosen, seed);
  if (is_pev(mech)) {
    out.payments = pev_payment_realized(s, reports, mech, success);
  } else {
    out.payments = groves_payment(s, reports,
                                  mech == Mechanism::groves_clarke
                                      ? GrovesPivot::clarke
                                      : GrovesPivot::zero);
  }
  std::vector<double> sv(s.num_agents, 0.0);
  for (AgentId j = 0; j < s.num_agents; ++j) sv[j] = success[j] ? 1.0 : 0.0;
  for (const auto& [i, x] : out.payments) {
    out.success[i] = success[i];
    out.utilities[i] = s.true_types[i].valuations.at(chosen).eval(sv) - x;
  }
  return out;
}

struct MonteCarloRow {
  AgentId agent = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  double z = 0.0;
};

// Replication k runs on child seed split_seed(seed, k). The z column is
// |mean - closed form| in standard-error units; a zero-variance run scores 0
// when the means agree to 1e-12 and infinity otherwise.
inline std::vector<MonteCarloRow> monte_carlo_check(
    const Scenario& s, const TypeReportProfile& reports, Mechanism mech,
    std::size_t replications, std::uint64_t seed) {
  if (replications < 2)
    throw ValidationError("monte carlo needs at least 2 replications");
  std::map<AgentId, double> mean, m2;
  for (const auto& [i, ty] : reports.reports) mean[i] = m2[i] = 0.0;
  for (std::size_t k = 0; k < replications; ++k) {
    const MechanismOutcome out =
        run_episode(s, reports, mech, split_seed(seed, k));
    for (const auto& [i, u] : out.utilities) {
      const double delta = u - mean[i];
      mean[i] += delta / static_cast<double>(k + 1);
      m2[i] += delta * (u - mean[i]);
    }
  }
  std::vector<MonteCarloRow> rows;
  for (const auto& [i, mu] : mean) {
    MonteCarloRow row;
    row.agent = i;
    row.mean = mu;
    const double var = m2[i] / static_cast<double>(replications - 1);
    row.std_error = std::sqrt(var / static_cast<double>(replications));
    row.closed_form = expected_utility(s, s.true_types[i], reports, mech, i);
    const double diff = std::abs(row.mean - row.closed_form);
    if (row.std_error > 0.0) {
      row.z = diff / row.std_error;
    } else {
      row.z = diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

struct IrStaticWitness {
  AgentId agent = 0;
  std::string allocation_id;
  std::vector<double> point;
  double value = 0.0;
};

struct IrEmpiricalWitness {
  AgentId agent = 0;
  std::string context;  // the others' type profile that produced the minimum
  double utility = 0.0;
};

struct IrReport {
  bool static_ok = true;
  std::optional<IrStaticWitness> static_witness;
  double empirical_min_utility = std::numeric_limits<double>::infinity();
  std::optional<IrEmpiricalWitness> empirical_witness;

  bool ir_violated() const {
    return !static_ok || empirical_min_utility < -kGainEpsilon;
  }
};

// Static side of the participation constraint: an agent left without tasks
// must never value the outcome negatively. Checked on the validation grid;
// the witness is the most negative point found.
inline IrReport check_ir_condition(const Scenario& s) {
  IrReport rep;
  const auto pts = detail::validation_points(s.num_agents);
  double worst = -kGainEpsilon;
  for (AgentId i = 0; i < s.num_agents; ++i) {
    for (const Allocation& a : s.allocations) {
      if (!a.empty_for(i)) continue;
      const PolynomialValuation& v = s.true_types[i].valuations.at(a.id);
      if (v.is_zero()) continue;
      for (const auto& pt : pts) {
        const double val = v.eval(pt);
        if (val < worst) {
          worst = val;
          rep.static_witness = IrStaticWitness{i, a.id, pt, val};
        }
      }
    }
  }
  rep.static_ok = !rep.static_witness.has_value();
  return rep;
}

// Empirical side: the others' reports range over the deviation space and are
// taken at face value as their types, so the sweep covers type profiles with
// everyone reporting truthfully, while agent i keeps its own true type and
// reports it. Minimum expected utility across the product space, one agent
// at a time.
inline IrReport check_ir_empirical(const Scenario& s, Mechanism mech,
                                   const DeviationSpace& space) {
  require_mode(s, mech);
  IrReport rep = check_ir_condition(s);
  rep.empirical_min_utility = std::numeric_limits<double>::infinity();
  for (AgentId i = 0; i < s.num_agents; ++i) {
    std::vector<AgentId> others;
    for (AgentId j = 0; j < s.num_agents; ++j)
      if (j != i) others.push_back(j);
    std::vector<std::vector<Misreport>> menus;
    for (AgentId j : others) menus.push_back(enumerate_misreports(s, space, j));

    std::vector<std::size_t> idx(others.size(), 0);
    while (true) {
      Scenario world = s;
      std::string context;
      for (std::size_t t = 0; t < others.size(); ++t) {
        const Misreport& m = menus[t][idx[t]];
        world.true_types[others[t]] = m.type;
        if (m.summary != "truthful") {
          if (!context.empty()) context += "; ";
          context += "agent " + std::to_string(others[t]) + ": " + m.summary;
        }
      }
      if (context.empty()) context = "all truthful";
      const TypeReportProfile prof = truthful_reports(world);
      const double eu = expected_utility(world, s.true_types[i], prof, mech, i);
      if (eu < rep.empirical_min_utility) {
        rep.empirical_min_utility = eu;
        rep.empirical_witness = IrEmpiricalWitness{i, context, eu};
      }
      std::size_t d = others.size();
      while (d > 0 && idx[d - 1] + 1 == menus[d - 1].size()) idx[--d] = 0;
      if (d == 0) break;
      ++idx[d - 1];
    }
  }
  if (rep.empirical_min_utility >= -kGainEpsilon) rep.empirical_witness.reset();
  return rep;
}

// One coefficient of one agent's valuation that a scenario family sweeps.
struct Tunable {
  AgentId agent = 0;
  std::string allocation;
  std::size_t term = 0;  // canonical term index
};

struct ScenarioFamily {
  Scenario base;
  std::vector<Tunable> tunables;
};

struct ManipulationWitness {
  std::vector<double> tuning;  // scale per tunable, aligned with the family
  Scenario tuned;
  AgentId agent = 0;
  std::string misreport;
  double truthful_eu = 0.0;
  double deviating_eu = 0.0;
  double gain = 0.0;
};

namespace detail {

inline Scenario tuned_scenario(const ScenarioFamily& family,
                               const std::vector<double>& scales) {
  Scenario s = family.base;
  // Group scalings per polynomial, then rebuild each once: canonical term
  // indices refer to the base polynomial and must not shift mid-application.
  std::map<std::pair<AgentId, std::string>, std::vector<MonomialTerm>> edited;
  for (std::size_t t = 0; t < family.tunables.size(); ++t) {
    const Tunable& tun = family.tunables[t];
    const auto key = std::make_pair(tun.agent, tun.allocation);
    if (!edited.count(key))
      edited[key] =
          family.base.true_types[tun.agent].valuations.at(tun.allocation).terms();
    if (tun.term >= edited[key].size())
      throw ValidationError("tunable term index out of range");
    edited[key][tun.term].coeff *= scales[t];
  }
  for (auto& [key, terms] : edited) {
    s.true_types[key.first].valuations[key.second] =
        PolynomialValuation{std::move(terms)};
  }
  return s;
}

}  // namespace detail

// Walks tuned true-type profiles (coefficient scales, lexicographic), and for
// each one sweeps every agent against the deviation space. Returns the first
// profitable deviation found, or nothing when the whole family is clean.
inline std::optional<ManipulationWitness> find_manipulation(
    const ScenarioFamily& family, Mechanism mech, const DeviationSpace& space) {
  std::vector<std::size_t> idx(family.tunables.size(), 0);
  while (true) {
    std::vector<double> scales(family.tunables.size());
    for (std::size_t t = 0; t < scales.size(); ++t)
      scales[t] = space.coeff_scales[idx[t]];
    const Scenario world = detail::tuned_scenario(family, scales);
    const TypeReportProfile truthful = truthful_reports(world);
    for (AgentId i = 0; i < world.num_agents; ++i) {
      const double eu_truth =
          expected_utility(world, world.true_types[i], truthful, mech, i);
      for (const Misreport& m : enumerate_misreports(world, space, i)) {
        TypeReportProfile prof = truthful;
        prof.reports[i] = m.type;
        const double eu_dev =
            expected_utility(world, world.true_types[i], prof, mech, i);
        if (eu_dev - eu_truth > kGainEpsilon) {
          ManipulationWitness w;
          w.tuning = scales;
          w.tuned = world;
          w.agent = i;
          w.misreport = m.summary;
          w.truthful_eu = eu_truth;
          w.deviating_eu = eu_dev;
          w.gain = eu_dev - eu_truth;
          return w;
        }
      }
    }
    std::size_t d = idx.size();
    while (d > 0 && idx[d - 1] + 1 == space.coeff_scales.size()) idx[--d] = 0;
    if (d == 0) break;
    ++idx[d - 1];
  }
  return std::nullopt;
}

}  // namespace pevmech
