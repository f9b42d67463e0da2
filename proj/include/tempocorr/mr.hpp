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

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tempocorr/behavior.hpp"

namespace tempocorr {

inline constexpr double kLpTolerance = 1e-7;
inline constexpr std::size_t kMaxTranscriptNodes = 1'000'000;
inline constexpr std::size_t kMaxEnumeration = 10'000'000;

/// The value of the quantity measured by `setting` at time `step`.
struct HiddenVariable {
    std::size_t step = 0;
    Label setting;
    auto operator<=>(const HiddenVariable &) const = default;
};

/// Hidden variables of a set of setting sequences: one per (step, measured setting), ordered.
std::vector<HiddenVariable> hidden_variables(const Scenario &scenario, const std::vector<SettingSeq> &sequences);

struct JointDistribution {
    std::vector<HiddenVariable> variables;
    /// Keyed by the values of `variables`, in order.
    std::map<LabelSeq, double> probabilities;

    /// Marginal prediction for a stored table entry.
    double predict(const Scenario &scenario, const SettingSeq &settings, const OutcomeSeq &outcomes) const;
};

struct Certificate {
    /// Valid for every macrorealist behavior: value <= classical_bound.
    LinearExpression inequality;
    double value = 0.0;
    double margin() const { return value - *inequality.classical_bound; }
};

struct MrResult {
    bool accepted = false;
    std::optional<JointDistribution> joint;
    std::optional<Certificate> certificate;
    /// L1 distance between the table and the closest macrorealist prediction.
    double distance = 0.0;
    /// Largest entry-wise deviation of the reported joint (accepted) or of the LP optimum.
    double max_residual = 0.0;
};

/// Throws AotViolationError when the behavior fails check_aot at `tol`.
MrResult is_macrorealist(const Behavior &b, double tol = kLpTolerance);

struct DeterministicStrategy {
    /// Output for the last setting of each setting prefix.
    std::map<SettingSeq, Label> response;

    OutcomeSeq outputs(const SettingSeq &settings) const;
    Behavior behavior(const Scenario &scenario) const;
};

/// Count of deterministic strategies without enumerating them; saturates at UINT64_MAX.
std::uint64_t count_deterministic_strategies(const Scenario &scenario);

/// Every deterministic strategy in a canonical order. Throws SizeGuardError when the transcript tree exceeds
/// kMaxTranscriptNodes or the strategy count exceeds kMaxEnumeration.
std::vector<DeterministicStrategy> enumerate_deterministic_strategies(const Scenario &scenario);

enum class ClassicalModel { macrorealist, aot };

struct ClassicalBoundResult {
    double value = 0.0;
    std::vector<std::pair<HiddenVariable, Label>> assignment;
    std::optional<DeterministicStrategy> strategy;
};

/// Maximum (or minimum for lower-sense expressions) over the model's deterministic points.
ClassicalBoundResult classical_bound(const LinearExpression &expr, ClassicalModel model);

}  // namespace tempocorr
