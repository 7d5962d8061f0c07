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

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace pevmech {

using AgentId = std::size_t;

// One monomial: coeff * prod_j p_j^exponents[j]. Exponent maps hold only
// strictly positive exponents, so a variable absent from the map contributes
// the factor 1 (this is what makes 0^0 = 1 hold by construction).
struct MonomialTerm {
  double coeff = 0.0;
  std::map<AgentId, unsigned> exponents;

  friend bool operator==(const MonomialTerm&, const MonomialTerm&) = default;
};

// Polynomial over per-agent probability coordinates. Canonical form: zero
// exponents erased, terms with identical exponent maps merged, terms sorted by
// exponent map, exact-zero coefficients dropped. Two polynomials denote the
// same function iff their canonical term lists compare equal, and the
// syntactic multilinearity test below is honest only on this form.
class PolynomialValuation {
 public:
  PolynomialValuation() = default;

  explicit PolynomialValuation(std::vector<MonomialTerm> terms) {
    std::map<std::map<AgentId, unsigned>, double> merged;
    for (auto& t : terms) {
      std::map<AgentId, unsigned> exps;
      for (auto [var, e] : t.exponents) {
        if (e > 0) exps.emplace(var, e);
      }
      merged[std::move(exps)] += t.coeff;
    }
    for (auto& [exps, coeff] : merged) {
      if (coeff != 0.0) terms_.push_back(MonomialTerm{coeff, exps});
    }
  }

  static PolynomialValuation zero() { return PolynomialValuation{}; }

  static PolynomialValuation constant(double c) {
    return PolynomialValuation{{MonomialTerm{c, {}}}};
  }

  const std::vector<MonomialTerm>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }

  // Largest variable index referenced, or npos for constants.
  static constexpr AgentId kNoVariable = static_cast<AgentId>(-1);
  AgentId max_variable() const {
    AgentId m = kNoVariable;
    for (const auto& t : terms_) {
      if (!t.exponents.empty()) {
        AgentId v = t.exponents.rbegin()->first;
        if (m == kNoVariable || v > m) m = v;
      }
    }
    return m;
  }

  // All exponents are 0 or 1. On canonical form this decides multilinearity
  // exactly, since no term cancellation can hide a higher power.
  bool is_multilinear() const {
    for (const auto& t : terms_) {
      for (auto [var, e] : t.exponents) {
        if (e > 1) return false;
      }
    }
    return true;
  }

  double eval(std::span<const double> p) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
      double m = t.coeff;
      for (auto [var, e] : t.exponents) {
        const double x = var < p.size() ? p[var] : 0.0;
        for (unsigned k = 0; k < e; ++k) m *= x;
      }
      acc += m;
    }
    return acc;
  }

  PolynomialValuation scaled(double factor) const {
    std::vector<MonomialTerm> ts = terms_;
    for (auto& t : ts) t.coeff *= factor;
    return PolynomialValuation{std::move(ts)};
  }

  // Scale a single canonical term; indices refer to the canonical order.
  PolynomialValuation with_term_scaled(std::size_t index, double factor) const {
    std::vector<MonomialTerm> ts = terms_;
    if (index < ts.size()) ts[index].coeff *= factor;
    return PolynomialValuation{std::move(ts)};
  }

  friend bool operator==(const PolynomialValuation&,
                         const PolynomialValuation&) = default;

 private:
  std::vector<MonomialTerm> terms_;
};

}  // namespace pevmech
