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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tempocorr/behavior.hpp"
#include "tempocorr/optimize.hpp"
#include "tempocorr/quantum.hpp"

namespace tempocorr {

/// Input label of machines that take no input.
inline const Label kNoInput = "*";

/// Classical d-state machine reused at every step. transfer[s][q](r', r) = p(q, r' | r, s).
struct ClassicalMachine {
    LabelSeq inputs;
    LabelSeq outputs;
    RVector initial;
    std::vector<std::vector<RMatrix>> transfer;

    std::size_t states() const { return static_cast<std::size_t>(initial.size()); }
    /// Shape problems raise StructuralError; negative or unnormalized probabilities are reported.
    ValidationReport validate(double tol = 1e-12) const;
    std::size_t input_index(const Label &s) const;
    std::size_t output_index(const Label &q) const;
};

/// Quantum machine: one instrument per input, all with the machine's output labels, reused at every step.
struct QuantumMachine {
    LabelSeq inputs;
    LabelSeq outputs;
    QuantumState initial = QuantumState::maximally_mixed(1);
    std::vector<Instrument> instruments;

    int dim() const { return initial.dim(); }
    void validate() const;
};

double machine_probability(const ClassicalMachine &m, const SettingSeq &inputs, const OutcomeSeq &outputs);
double machine_probability(const QuantumMachine &m, const SettingSeq &inputs, const OutcomeSeq &outputs);
/// Input-free form: the single input is repeated.
double machine_probability(const ClassicalMachine &m, const OutcomeSeq &outputs);
double machine_probability(const QuantumMachine &m, const OutcomeSeq &outputs);

/// Diagonal quantum machine with the same behavior.
QuantumMachine embed(const ClassicalMachine &m);
/// The same machine on a larger space; the extra levels are never populated.
QuantumMachine embed(const QuantumMachine &m, int dim);

/// Behavior over the scenario's settings for the given sequences. The scenario must have no skip setting and use
/// the machine's inputs and outputs.
Behavior behavior_from_machine(const ClassicalMachine &m, const Scenario &scenario,
                               const std::vector<SettingSeq> &schedule);
Behavior behavior_from_machine(const QuantumMachine &m, const Scenario &scenario,
                               const std::vector<SettingSeq> &schedule);

/// Scenario of input-free sequences of length n over `outputs`.
Scenario sequence_scenario(std::size_t n, const LabelSeq &outputs = {"0", "1"});
/// p(q) as an expression over `sequence_scenario`.
LinearExpression sequence_expression(const OutcomeSeq &q, const LabelSeq &outputs = {"0", "1"});

/// Input-free deterministic machine walking states 0, 1, ..., tail + period - 1 and then back to `tail`.
ClassicalMachine rho_machine(const OutcomeSeq &q, std::size_t tail, std::size_t period,
                             const LabelSeq &outputs = {"0", "1"});

struct DeterministicComplexity {
    std::size_t complexity = 0;
    std::size_t tail = 0;
    std::size_t period = 0;
    /// Emits the sequence with probability 1 using exactly `complexity` states.
    ClassicalMachine machine;
    /// True when a search over all machines with one state fewer found none.
    bool minimality_checked = false;
};

/// Throws InputError for an empty sequence.
DeterministicComplexity deterministic_complexity(const OutcomeSeq &q, const LabelSeq &outputs = {"0", "1"});

/// Exhaustive backtracking over deterministic machines with at most d states.
bool deterministic_machine_exists(const OutcomeSeq &q, std::size_t d);

enum class Certification { none, grid, exhaustive };
std::string to_string(Certification c);

struct ClassicalOptimum {
    double value = 0.0;
    ClassicalMachine machine;
    std::string method;
    Certification certification = Certification::none;
    RestartStats stats;
};

/// Extreme value of `expr` (maximum for upper sense, minimum for lower) over d-state machines by multistart L-BFGS.
/// A lower bound on the true maximum.
ClassicalOptimum max_expression_classical(const LinearExpression &expr, std::size_t d,
                                          const OptimizerConfig &config = {});
/// Same over deterministic d-state machines by exhaustive enumeration. Throws SizeGuardError above 10^7 machines.
ClassicalOptimum max_expression_deterministic(const LinearExpression &expr, std::size_t d);

ClassicalOptimum max_sequence_probability_classical(const OutcomeSeq &q, std::size_t d,
                                                    const OptimizerConfig &config = {},
                                                    const LabelSeq &outputs = {"0", "1"});
/// Dense simplex grid over machines with d <= 2 starting in state 0, followed by L-BFGS from the best grid points.
ClassicalOptimum grid_sequence_probability(const OutcomeSeq &q, std::size_t d, int resolution = 16,
                                           const LabelSeq &outputs = {"0", "1"});

struct TickDistribution {
    /// p[t - 1] = probability that the first tick happens at step t.
    std::vector<double> p;
    /// Probability of no tick within p.size() steps.
    double tail = 0.0;
};

TickDistribution machine_tick_distribution(const ClassicalMachine &m, std::size_t t_max, const Label &tick = "1");
TickDistribution machine_tick_distribution(const QuantumMachine &m, std::size_t t_max, const Label &tick = "1");
TickDistribution geometric_ticks(double rate, std::size_t t_max);

struct ClockAccuracy {
    double mean = 0.0;
    double variance = 0.0;
    /// mean^2 / variance; empty for a deterministic clock (zero variance).
    std::optional<double> accuracy;
    bool deterministic() const { return !accuracy.has_value(); }
};

/// Throws InputError when the tail mass exceeds 1e-9.
ClockAccuracy clock_accuracy(const TickDistribution &ticks);

}  // namespace tempocorr
