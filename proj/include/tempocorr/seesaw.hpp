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

#include <optional>
#include <string>
#include <vector>

#include "tempocorr/automata.hpp"

namespace tempocorr {

struct QuantumSearchConfig {
    OptimizerConfig optimizer;
    /// Kraus operators per outcome; 0 means the dimension (enough for every extremal instrument).
    int kraus_per_outcome = 0;
    /// Alternations between the state update and the instrument update after each joint ascent.
    int rounds = 5;
    /// Included as an extra starting point after embedding into the target dimension.
    std::optional<QuantumMachine> warm_start;
};

struct QuantumOptimum {
    double value = 0.0;
    QuantumMachine machine;
    RestartStats stats;
};

/// Extreme value of `expr` over d-dimensional quantum machines: joint L-BFGS over a pure initial state and
/// instruments, then alternating exact state updates (top eigenvector) with instrument ascent. A lower bound.
QuantumOptimum max_expression_quantum_seesaw(const LinearExpression &expr, int d, const QuantumSearchConfig &config = {});

QuantumOptimum max_sequence_probability_quantum(const OutcomeSeq &q, int d, const QuantumSearchConfig &config = {},
                                                const LabelSeq &outputs = {"0", "1"});

/// Two-step model with von Neumann updates: setting "a" measures the computational basis, setting "b" a basis
/// whose "+1" part is the optimized projector.
struct WitnessModel {
    double value = 0.0;
    CVector state;
    CMatrix projector;
    /// Builds the model in quantum_core terms; the witness is quantum_witness(b, {"a", "b"}, 0, {"+1"}) on the
    /// behavior over {("a", "b"), ("0", "b")}.
    QuantumSequenceModel model() const;
};

/// See-saw over the initial state and the second measurement for an n-level system.
WitnessModel max_von_neumann_witness(int n, const OptimizerConfig &config = {});

struct SpinLgiResult {
    double value = 0.0;
    /// Precession angle about x between steps.
    double angle = 0.0;
    CVector state;
    int two_j = 0;
    /// Model: J_z measured with the lowest level labelled -1 and the rest +1, von Neumann update.
    QuantumSequenceModel model() const;
};

/// Maximizes the three-term inequality over the initial state and the precession angle.
SpinLgiResult max_spin_lgi(int two_j, const OptimizerConfig &config = {});

}  // namespace tempocorr
