// Copyright 2026 The tempocorr Authors
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
#include <variant>
#include <vector>

#include "tempocorr/scenario.hpp"

namespace tempocorr {

struct ProbabilityTerm {
    double coefficient = 0.0;
    SettingSeq settings;
    OutcomeSeq outcomes;
};

/// coefficient * < prod_{i in positions} value(q_i) > under the sequence `settings`.
struct CorrelatorTerm {
    double coefficient = 0.0;
    SettingSeq settings;
    std::vector<std::size_t> positions;
};

using Term = std::variant<ProbabilityTerm, CorrelatorTerm>;

/// Direction of the classical bound: value <= bound (upper) or value >= bound (lower).
enum class Sense { upper, lower };

using ProbabilityKey = std::pair<SettingSeq, OutcomeSeq>;
using CoefficientMap = std::map<ProbabilityKey, double>;

struct LinearExpression {
    std::string name;
    Scenario scenario;
    std::vector<Term> terms;
    std::optional<double> classical_bound;
    std::optional<double> quantum_bound;
    Sense sense = Sense::upper;

    /// Throws StructuralError for terms that do not fit the scenario.
    void validate() const;
    /// Distinct setting sequences referenced by the terms, sorted.
    std::vector<SettingSeq> setting_sequences() const;
    /// The expression as a sum over sequence probabilities. Correlators expand to every outcome word of their
    /// sequence, so zero coefficients may appear.
    CoefficientMap coefficients() const;
};

LinearExpression operator*(double alpha, const LinearExpression &e);
LinearExpression operator+(const LinearExpression &a, const LinearExpression &b);

/// Correlator term over the non-skip positions of `settings`.
CorrelatorTerm correlator(const Scenario &scenario, double coefficient, SettingSeq settings);

double evaluate(const LinearExpression &expr, const Behavior &b);
double evaluate(const CoefficientMap &coefficients, const Behavior &b);

LinearExpression lgi_n(std::size_t n);
LinearExpression lgi3();
LinearExpression lgi4();
/// C_02 + branch * (C_01 + C_12) >= -1; for stationary correlators this is C(2t) + branch * 2 C(t) >= -1.
/// branch is +1 or -1.
LinearExpression lgi_stationary(int branch = -1);
/// p(01|00) + p(10|10) + p(10|11) over binary inputs and outputs; inputs are ordinary settings.
LinearExpression eq31_expression();

struct UntestableItem {
    SettingSeq settings;
    std::size_t position = 0;
    std::string reason;
};

struct AotDeviation {
    SettingSeq first;
    SettingSeq second;
    std::size_t prefix_length = 0;
    double deviation = 0.0;
};

struct AotReport {
    double tol = 0.0;
    std::vector<AotDeviation> checked;
    std::vector<UntestableItem> untestable;

    std::vector<AotDeviation> violations() const;
    bool ok() const { return violations().empty(); }
    double max_deviation() const;
};

AotReport check_aot(const Behavior &b, double tol = 1e-9);

struct NsitDeviation {
    SettingSeq measured;
    std::size_t position = 0;
    double deviation = 0.0;
    /// Keyed by the outcome words of the counterpart sequence (skip at `position`).
    std::map<OutcomeSeq, double> per_outcome;
};

struct NsitReport {
    double tol = 0.0;
    std::vector<NsitDeviation> checked;
    std::vector<UntestableItem> untestable;

    std::vector<NsitDeviation> violations() const;
    bool ok() const { return violations().empty(); }
    std::map<std::size_t, double> max_by_position() const;
};

/// Compares every stored sequence measured at position i with its counterpart skipping position i.
NsitReport check_nsit(const Behavior &b, double tol = 1e-9);

/// |p(rest) - sum_{q_i} p(q_i, rest)| where `rest` holds the outcomes of all positions except `position`.
double quantum_witness(const Behavior &b, const SettingSeq &measured, std::size_t position, const OutcomeSeq &rest);

struct RobensWitness {
    double value = 0.0;
    double mr_bound = 0.0;
    bool violates() const { return value > mr_bound; }
};

/// <Q_last> with the intermediate measurement minus <Q_last> without it. Values default to the scenario's.
RobensWitness robens_witness(const Behavior &b, const SettingSeq &measured, std::size_t intermediate,
                             const std::map<Label, double> &values = {});

/// I(q) = |1 - p(q_2 = q | q_1 = q)| over the first two measured positions of `control`;
/// empty when p(q_1 = q) = 0.
std::map<Label, std::optional<double>> invasivity(const Behavior &b, const SettingSeq &control);

double adroitness_deviation(const Behavior &b_with, const Behavior &b_without, const LinearExpression &target);

bool huffman_mizel_accepts(double lgi_value, std::span<const double> deviations);

struct QuasiDistribution {
    std::map<Label, double> p;
    bool is_quasi = false;
};

/// p(q) = (pA(q') + pA(q'') - pA(q)) / 2 from the statistics pA(q) of the complementary projectors.
QuasiDistribution eim_reconstruct(const std::map<Label, double> &ambiguous);

/// Ambiguous joint statistics keyed by the later outcome q2, then the complement label of q1.
using AmbiguousJoint = std::map<Label, std::map<Label, double>>;

/// delta_A(q2) = p(q2) - sum_{q1} p_A(q1, q2); p(q2) comes from `reference` (first measurement skipped).
std::map<Label, double> eim_delta(const Behavior &b, const SettingSeq &reference, std::size_t position,
                                  const AmbiguousJoint &ambiguous);

struct CorrectedLgi {
    double lhs = 0.0;
    double bound = 1.0;
    bool violated() const { return lhs > bound; }
};

/// <Q1> + <Q1 Q2> - <Q2> from sequences (m, m) and (skip, m), against 1 + sum |delta_A(q2)|.
CorrectedLgi eim_corrected_lgi(const Behavior &b, const AmbiguousJoint &ambiguous, const Label &measure = "1");

}  // namespace tempocorr
