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

#include "tempocorr/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace tempocorr {

std::string format_word(const LabelSeq &word) {
    std::string out = "(";
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (k > 0) {
            out += ",";
        }
        out += word[k];
    }
    return out + ")";
}

void Scenario::validate() const {
    if (settings.empty()) {
        throw StructuralError("scenario has no settings");
    }
    for (const auto &s : settings) {
        auto it = outcomes.find(s);
        if (it == outcomes.end() || it->second.empty()) {
            throw StructuralError("setting '" + s + "' has no outcome alphabet");
        }
        if (is_skip(s) && (it->second.size() != 1 || it->second.front() != kSkip)) {
            throw StructuralError("no-measurement setting '" + s + "' must have the single outcome 0");
        }
    }
    for (const auto &[s, q] : outcomes) {
        if (!has_setting(s)) {
            throw StructuralError("outcome alphabet for undeclared setting '" + s + "'");
        }
    }
}

bool Scenario::has_setting(const Label &setting) const {
    return std::find(settings.begin(), settings.end(), setting) != settings.end();
}

const LabelSeq &Scenario::outcomes_of(const Label &setting) const {
    auto it = outcomes.find(setting);
    if (it == outcomes.end()) {
        throw StructuralError("unknown setting '" + setting + "'");
    }
    return it->second;
}

std::vector<OutcomeSeq> Scenario::outcome_words(const SettingSeq &seq) const {
    std::vector<OutcomeSeq> words{OutcomeSeq{}};
    for (const auto &s : seq) {
        const auto &qs = outcomes_of(s);
        std::vector<OutcomeSeq> next;
        next.reserve(words.size() * qs.size());
        for (const auto &w : words) {
            for (const auto &q : qs) {
                auto extended = w;
                extended.push_back(q);
                next.push_back(std::move(extended));
            }
        }
        words = std::move(next);
    }
    std::sort(words.begin(), words.end());
    return words;
}

std::vector<SettingSeq> Scenario::all_setting_sequences() const {
    std::vector<SettingSeq> seqs{SettingSeq{}};
    for (std::size_t k = 0; k < length; ++k) {
        std::vector<SettingSeq> next;
        for (const auto &w : seqs) {
            for (const auto &s : settings) {
                auto extended = w;
                extended.push_back(s);
                next.push_back(std::move(extended));
            }
        }
        seqs = std::move(next);
    }
    return seqs;
}

double Scenario::value_of(const Label &outcome) const {
    auto it = outcome_values.find(outcome);
    if (it == outcome_values.end()) {
        throw MissingDataError("no numeric value declared for outcome '" + outcome + "'");
    }
    return it->second;
}

Scenario Scenario::leggett_garg(std::size_t length) {
    Scenario sc;
    sc.length = length;
    sc.settings = {kSkip, "1"};
    sc.outcomes = {{kSkip, {kSkip}}, {"1", {"+1", "-1"}}};
    sc.outcome_values = {{"+1", 1.0}, {"-1", -1.0}};
    return sc;
}

bool operator==(const Scenario &a, const Scenario &b) {
    return a.length == b.length && a.settings == b.settings && a.outcomes == b.outcomes &&
           a.no_measurement == b.no_measurement && a.outcome_values == b.outcome_values;
}

void Behavior::validate(double tol) const {
    scenario.validate();
    for (const auto &[s, dist] : table) {
        if (s.size() != scenario.length) {
            throw StructuralError("setting sequence " + format_word(s) + " has wrong length");
        }
        double total = 0.0;
        for (const auto &[q, p] : dist) {
            if (q.size() != s.size()) {
                throw StructuralError("outcome word " + format_word(q) + " has wrong length");
            }
            for (std::size_t k = 0; k < q.size(); ++k) {
                const auto &qs = scenario.outcomes_of(s[k]);
                if (std::find(qs.begin(), qs.end(), q[k]) == qs.end()) {
                    throw StructuralError("outcome '" + q[k] + "' not allowed for setting '" + s[k] + "'");
                }
            }
            if (!(p >= -tol)) {
                ValidationReport report;
                report.violations.push_back({"nonnegative", -p, format_word(s) + " " + format_word(q)});
                throw InvariantError("behavior", report);
            }
            total += p;
        }
        if (std::abs(total - 1.0) > tol) {
            ValidationReport report;
            report.violations.push_back({"normalized", std::abs(total - 1.0), format_word(s)});
            throw InvariantError("behavior", report);
        }
    }
}

const Distribution &Behavior::distribution(const SettingSeq &settings) const {
    auto it = table.find(settings);
    if (it == table.end()) {
        throw MissingDataError("behavior has no entry for settings " + format_word(settings));
    }
    return it->second;
}

double Behavior::probability(const SettingSeq &settings, const OutcomeSeq &outcomes) const {
    const auto &dist = distribution(settings);
    auto it = dist.find(outcomes);
    if (it == dist.end()) {
        throw MissingDataError("behavior has no entry p(" + format_word(outcomes) + "|" + format_word(settings) +
                               ")");
    }
    return it->second;
}

Distribution Behavior::prefix_marginal(const SettingSeq &settings, std::size_t k) const {
    Distribution out;
    for (const auto &[q, p] : distribution(settings)) {
        out[OutcomeSeq(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(k))] += p;
    }
    return out;
}

}  // namespace tempocorr
