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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempocorr/errors.hpp"

namespace tempocorr {

/// Setting and outcome labels are opaque strings.
using Label = std::string;
using LabelSeq = std::vector<Label>;
using SettingSeq = LabelSeq;
using OutcomeSeq = LabelSeq;

/// Distribution over outcome words for one setting sequence.
using Distribution = std::map<OutcomeSeq, double>;

/// Default label of the "no measurement" setting and of its unique outcome.
inline const Label kSkip = "0";

/// Measurement scenario: sequence length, setting alphabet and per-setting outcomes.
///
/// When `no_measurement` names a setting, that setting has the single outcome
/// `kSkip` which occurs with probability one.
struct Scenario {
    std::size_t length = 0;
    LabelSeq settings;
    std::map<Label, LabelSeq> outcomes;
    std::optional<Label> no_measurement = kSkip;
    /// Numeric values of outcome labels, used by correlators.
    std::map<Label, double> outcome_values;

    void validate() const;
    const LabelSeq &outcomes_of(const Label &setting) const;
    bool is_skip(const Label &setting) const { return no_measurement && *no_measurement == setting; }
    bool has_setting(const Label &setting) const;
    /// Every outcome word compatible with the given setting sequence, in lexicographic order.
    std::vector<OutcomeSeq> outcome_words(const SettingSeq &settings) const;
    /// Every setting sequence of the scenario's length.
    std::vector<SettingSeq> all_setting_sequences() const;
    double value_of(const Label &outcome) const;

    /// The Leggett-Garg scenario: settings {0 = skip, 1 = measure} with outcomes {+1, -1}.
    static Scenario leggett_garg(std::size_t length);
};

bool operator==(const Scenario &a, const Scenario &b);

/// Table of conditional probabilities p(q|s) over a declared scenario.
struct Behavior {
    Scenario scenario;
    std::map<SettingSeq, Distribution> table;

    /// Checks nonnegativity, normalization within `tol` and that labels fit the scenario.
    void validate(double tol = 1e-9) const;
    bool contains(const SettingSeq &settings) const { return table.count(settings) > 0; }
    const Distribution &distribution(const SettingSeq &settings) const;
    double probability(const SettingSeq &settings, const OutcomeSeq &outcomes) const;
    /// Marginal of the first `k` outcomes of sequence `settings`.
    Distribution prefix_marginal(const SettingSeq &settings, std::size_t k) const;
};

std::string format_word(const LabelSeq &word);

}  // namespace tempocorr
