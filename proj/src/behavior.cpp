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

#include "tempocorr/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace tempocorr {

namespace {

void check_settings(const Scenario &sc, const SettingSeq &s) {
    if (s.size() != sc.length) {
        throw StructuralError("setting sequence " + format_word(s) + " does not match scenario length " +
                              std::to_string(sc.length));
    }
    for (const auto &x : s) {
        if (!sc.has_setting(x)) {
            throw StructuralError("unknown setting '" + x + "' in " + format_word(s));
        }
    }
}

OutcomeSeq with_position(OutcomeSeq word, std::size_t position, const Label &value) {
    word.insert(word.begin() + static_cast<std::ptrdiff_t>(position), value);
    return word;
}

SettingSeq skipped(SettingSeq s, std::size_t position, const Label &skip) {
    s[position] = skip;
    return s;
}

std::vector<std::size_t> measured_positions(const Scenario &sc, const SettingSeq &s) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!sc.is_skip(s[k])) {
            out.push_back(k);
        }
    }
    return out;
}

double lookup(const Distribution &d, const OutcomeSeq &q) {
    auto it = d.find(q);
    return it == d.end() ? 0.0 : it->second;
}

double mean_value(const Behavior &b, const SettingSeq &s, const std::vector<std::size_t> &positions,
                  const std::map<Label, double> &values) {
    auto value = [&](const Label &q) {
        auto it = values.find(q);
        if (it == values.end()) {
            throw MissingDataError("no numeric value declared for outcome '" + q + "'");
        }
        return it->second;
    };
    double sum = 0.0;
    for (const auto &q : b.scenario.outcome_words(s)) {
        double prod = 1.0;
        for (auto k : positions) {
            prod *= value(q[k]);
        }
        sum += prod * b.probability(s, q);
    }
    return sum;
}

}  // namespace

void LinearExpression::validate() const {
    scenario.validate();
    for (const auto &term : terms) {
        if (const auto *p = std::get_if<ProbabilityTerm>(&term)) {
            check_settings(scenario, p->settings);
            if (p->outcomes.size() != p->settings.size()) {
                throw StructuralError("outcome word " + format_word(p->outcomes) + " has wrong length");
            }
            for (std::size_t k = 0; k < p->settings.size(); ++k) {
                const auto &qs = scenario.outcomes_of(p->settings[k]);
                if (std::find(qs.begin(), qs.end(), p->outcomes[k]) == qs.end()) {
                    throw StructuralError("outcome '" + p->outcomes[k] + "' not allowed for setting '" +
                                          p->settings[k] + "'");
                }
            }
        } else {
            const auto &c = std::get<CorrelatorTerm>(term);
            check_settings(scenario, c.settings);
            for (auto k : c.positions) {
                if (k >= c.settings.size()) {
                    throw StructuralError("correlator position out of range in " + format_word(c.settings));
                }
                if (scenario.is_skip(c.settings[k])) {
                    throw StructuralError("correlator position " + std::to_string(k) + " is unmeasured in " +
                                          format_word(c.settings));
                }
            }
        }
    }
}

std::vector<SettingSeq> LinearExpression::setting_sequences() const {
    std::set<SettingSeq> seqs;
    for (const auto &term : terms) {
        std::visit([&](const auto &t) { seqs.insert(t.settings); }, term);
    }
    return {seqs.begin(), seqs.end()};
}

CoefficientMap LinearExpression::coefficients() const {
    CoefficientMap out;
    for (const auto &term : terms) {
        if (const auto *p = std::get_if<ProbabilityTerm>(&term)) {
            out[{p->settings, p->outcomes}] += p->coefficient;
            continue;
        }
        const auto &c = std::get<CorrelatorTerm>(term);
        for (const auto &q : scenario.outcome_words(c.settings)) {
            double prod = c.coefficient;
            for (auto k : c.positions) {
                prod *= scenario.value_of(q[k]);
            }
            out[{c.settings, q}] += prod;
        }
    }
    return out;
}

LinearExpression operator*(double alpha, const LinearExpression &e) {
    LinearExpression out;
    out.name = e.name;
    out.scenario = e.scenario;
    out.sense = e.sense;
    for (auto term : e.terms) {
        std::visit([&](auto &t) { t.coefficient *= alpha; }, term);
        out.terms.push_back(std::move(term));
    }
    return out;
}

LinearExpression operator+(const LinearExpression &a, const LinearExpression &b) {
    if (!(a.scenario == b.scenario)) {
        throw StructuralError("cannot add expressions over different scenarios");
    }
    LinearExpression out;
    out.name = a.name + "+" + b.name;
    out.scenario = a.scenario;
    out.sense = a.sense;
    out.terms = a.terms;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

CorrelatorTerm correlator(const Scenario &scenario, double coefficient, SettingSeq settings) {
    auto positions = measured_positions(scenario, settings);
    return CorrelatorTerm{coefficient, std::move(settings), std::move(positions)};
}

double evaluate(const CoefficientMap &coefficients, const Behavior &b) {
    double total = 0.0;
    for (const auto &[key, c] : coefficients) {
        total += c * b.probability(key.first, key.second);
    }
    return total;
}

double evaluate(const LinearExpression &expr, const Behavior &b) {
    return evaluate(expr.coefficients(), b);
}

LinearExpression lgi_n(std::size_t n) {
    if (n < 3) {
        throw StructuralError("lgi_n needs at least 3 time steps");
    }
    LinearExpression e;
    e.name = "lgi_n(" + std::to_string(n) + ")";
    e.scenario = Scenario::leggett_garg(n);
    auto pair = [n](std::size_t i, std::size_t j) {
        SettingSeq s(n, kSkip);
        s[i] = "1";
        s[j] = "1";
        return s;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        e.terms.push_back(correlator(e.scenario, 1.0, pair(i, i + 1)));
    }
    e.terms.push_back(correlator(e.scenario, -1.0, pair(0, n - 1)));
    e.classical_bound = static_cast<double>(n) - 2.0;
    e.quantum_bound = static_cast<double>(n) * std::cos(std::numbers::pi / static_cast<double>(n));
    return e;
}

LinearExpression lgi3() {
    auto e = lgi_n(3);
    e.name = "lgi3";
    return e;
}

LinearExpression lgi4() {
    auto e = lgi_n(4);
    e.name = "lgi4";
    return e;
}

LinearExpression lgi_stationary(int branch) {
    if (branch != 1 && branch != -1) {
        throw StructuralError("lgi_stationary branch must be +1 or -1");
    }
    LinearExpression e;
    e.name = branch > 0 ? "lgi_stationary(+)" : "lgi_stationary(-)";
    e.scenario = Scenario::leggett_garg(3);
    e.terms.push_back(correlator(e.scenario, 1.0, {"1", kSkip, "1"}));
    e.terms.push_back(correlator(e.scenario, branch, {"1", "1", kSkip}));
    e.terms.push_back(correlator(e.scenario, branch, {kSkip, "1", "1"}));
    e.classical_bound = -1.0;
    e.sense = Sense::lower;
    return e;
}

LinearExpression eq31_expression() {
    LinearExpression e;
    e.name = "eq31";
    e.scenario.length = 2;
    e.scenario.settings = {"0", "1"};
    e.scenario.outcomes = {{"0", {"0", "1"}}, {"1", {"0", "1"}}};
    e.scenario.no_measurement = std::nullopt;
    e.terms.push_back(ProbabilityTerm{1.0, {"0", "0"}, {"0", "1"}});
    e.terms.push_back(ProbabilityTerm{1.0, {"1", "0"}, {"1", "0"}});
    e.terms.push_back(ProbabilityTerm{1.0, {"1", "1"}, {"1", "0"}});
    e.classical_bound = 2.25;
    return e;
}

std::vector<AotDeviation> AotReport::violations() const {
    std::vector<AotDeviation> out;
    std::copy_if(checked.begin(), checked.end(), std::back_inserter(out),
                 [this](const AotDeviation &d) { return d.deviation > tol; });
    return out;
}

double AotReport::max_deviation() const {
    double m = 0.0;
    for (const auto &d : checked) {
        m = std::max(m, d.deviation);
    }
    return m;
}

AotReport check_aot(const Behavior &b, double tol) {
    AotReport report;
    report.tol = tol;
    std::vector<SettingSeq> seqs;
    for (const auto &[s, d] : b.table) {
        seqs.push_back(s);
    }
    for (std::size_t x = 0; x < seqs.size(); ++x) {
        for (std::size_t y = x + 1; y < seqs.size(); ++y) {
            const auto &a = seqs[x];
            const auto &c = seqs[y];
            const auto mismatch = std::mismatch(a.begin(), a.end(), c.begin(), c.end());
            const auto k = static_cast<std::size_t>(mismatch.first - a.begin());
            if (k == 0 || k == a.size()) {
                continue;
            }
            const auto ma = b.prefix_marginal(a, k);
            const auto mc = b.prefix_marginal(c, k);
            double dev = 0.0;
            for (const auto &[q, p] : ma) {
                dev = std::max(dev, std::abs(p - lookup(mc, q)));
            }
            for (const auto &[q, p] : mc) {
                dev = std::max(dev, std::abs(p - lookup(ma, q)));
            }
            report.checked.push_back({a, c, k, dev});
        }
    }
    std::set<std::pair<SettingSeq, std::size_t>> missing;
    for (const auto &s : seqs) {
        for (std::size_t k = 1; k < s.size(); ++k) {
            for (const auto &alt : b.scenario.settings) {
                if (alt == s[k]) {
                    continue;
                }
                SettingSeq prefix(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
                prefix.push_back(alt);
                const bool found = std::any_of(seqs.begin(), seqs.end(), [&](const SettingSeq &other) {
                    return std::equal(prefix.begin(), prefix.end(), other.begin());
                });
                if (!found) {
                    missing.insert({prefix, k});
                }
            }
        }
    }
    for (const auto &[prefix, k] : missing) {
        report.untestable.push_back({prefix, k, "no stored sequence extends this prefix"});
    }
    return report;
}

std::vector<NsitDeviation> NsitReport::violations() const {
    std::vector<NsitDeviation> out;
    std::copy_if(checked.begin(), checked.end(), std::back_inserter(out),
                 [this](const NsitDeviation &d) { return d.deviation > tol; });
    return out;
}

std::map<std::size_t, double> NsitReport::max_by_position() const {
    std::map<std::size_t, double> out;
    for (const auto &d : checked) {
        out[d.position] = std::max(out[d.position], d.deviation);
    }
    return out;
}

NsitReport check_nsit(const Behavior &b, double tol) {
    NsitReport report;
    report.tol = tol;
    if (!b.scenario.no_measurement) {
        return report;
    }
    const Label &skip = *b.scenario.no_measurement;
    for (const auto &[s, dist] : b.table) {
        for (auto i : measured_positions(b.scenario, s)) {
            const auto counterpart = skipped(s, i, skip);
            auto it = b.table.find(counterpart);
            if (it == b.table.end()) {
                report.untestable.push_back({s, i, "counterpart " + format_word(counterpart) + " missing"});
                continue;
            }
            std::map<OutcomeSeq, double> marginal;
            for (const auto &[q, p] : dist) {
                auto w = q;
                w[i] = kSkip;
                marginal[w] += p;
            }
            NsitDeviation dev{s, i, 0.0, {}};
            for (const auto &[w, p] : it->second) {
                dev.per_outcome[w] = std::abs(p - lookup(marginal, w));
            }
            for (const auto &[w, p] : marginal) {
                if (!dev.per_outcome.count(w)) {
                    dev.per_outcome[w] = std::abs(p);
                }
            }
            for (const auto &[w, d] : dev.per_outcome) {
                dev.deviation = std::max(dev.deviation, d);
            }
            report.checked.push_back(std::move(dev));
        }
    }
    return report;
}

double quantum_witness(const Behavior &b, const SettingSeq &measured, std::size_t position, const OutcomeSeq &rest) {
    if (!b.scenario.no_measurement) {
        throw StructuralError("scenario declares no skip setting");
    }
    if (position >= measured.size() || rest.size() + 1 != measured.size()) {
        throw StructuralError("witness position or outcome word does not fit " + format_word(measured));
    }
    const auto counterpart = skipped(measured, position, *b.scenario.no_measurement);
    const double unmeasured = b.probability(counterpart, with_position(rest, position, kSkip));
    double summed = 0.0;
    for (const auto &q : b.scenario.outcomes_of(measured[position])) {
        summed += b.probability(measured, with_position(rest, position, q));
    }
    return std::abs(unmeasured - summed);
}

RobensWitness robens_witness(const Behavior &b, const SettingSeq &measured, std::size_t intermediate,
                             const std::map<Label, double> &values) {
    if (!b.scenario.no_measurement) {
        throw StructuralError("scenario declares no skip setting");
    }
    const auto positions = measured_positions(b.scenario, measured);
    if (positions.empty() || positions.back() <= intermediate ||
        std::find(positions.begin(), positions.end(), intermediate) == positions.end()) {
        throw StructuralError("intermediate position must be measured and precede the final measurement");
    }
    const auto &vals = values.empty() ? b.scenario.outcome_values : values;
    const std::vector<std::size_t> last{positions.back()};
    const auto counterpart = skipped(measured, intermediate, *b.scenario.no_measurement);
    RobensWitness w;
    w.value = mean_value(b, measured, last, vals) - mean_value(b, counterpart, last, vals);
    return w;
}

std::map<Label, std::optional<double>> invasivity(const Behavior &b, const SettingSeq &control) {
    const auto positions = measured_positions(b.scenario, control);
    if (positions.size() < 2) {
        throw StructuralError("control sequence needs two measured positions");
    }
    const auto i = positions[0];
    const auto j = positions[1];
    const auto &dist = b.distribution(control);
    std::map<Label, std::optional<double>> out;
    for (const auto &q : b.scenario.outcomes_of(control[i])) {
        double first = 0.0;
        double both = 0.0;
        for (const auto &[w, p] : dist) {
            if (w[i] == q) {
                first += p;
                if (w[j] == q) {
                    both += p;
                }
            }
        }
        out[q] = first > 0.0 ? std::optional<double>(std::abs(1.0 - both / first)) : std::nullopt;
    }
    return out;
}

double adroitness_deviation(const Behavior &b_with, const Behavior &b_without, const LinearExpression &target) {
    return std::abs(evaluate(target, b_with) - evaluate(target, b_without));
}

bool huffman_mizel_accepts(double lgi_value, std::span<const double> deviations) {
    return std::abs(lgi_value) >= std::accumulate(deviations.begin(), deviations.end(), 0.0);
}

QuasiDistribution eim_reconstruct(const std::map<Label, double> &ambiguous) {
    if (ambiguous.size() != 3) {
        throw StructuralError("ambiguous-measurement reconstruction needs exactly three outcomes");
    }
    double total = 0.0;
    for (const auto &[q, p] : ambiguous) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InputError("ambiguous statistics must lie in [0, 1]");
        }
        total += p;
    }
    QuasiDistribution out;
    for (const auto &[q, p] : ambiguous) {
        const double value = 0.5 * (total - p) - 0.5 * p;
        out.p[q] = value;
        out.is_quasi = out.is_quasi || value < -1e-12;
    }
    return out;
}

std::map<Label, double> eim_delta(const Behavior &b, const SettingSeq &reference, std::size_t position,
                                  const AmbiguousJoint &ambiguous) {
    if (position >= reference.size()) {
        throw StructuralError("position out of range for " + format_word(reference));
    }
    std::map<Label, double> marginal;
    for (const auto &[w, p] : b.distribution(reference)) {
        marginal[w[position]] += p;
    }
    std::map<Label, double> out;
    for (const auto &[q2, p] : marginal) {
        auto it = ambiguous.find(q2);
        if (it == ambiguous.end()) {
            throw MissingDataError("no ambiguous statistics for later outcome '" + q2 + "'");
        }
        double joint = 0.0;
        for (const auto &[q1, v] : eim_reconstruct(it->second).p) {
            joint += v;
        }
        out[q2] = p - joint;
    }
    return out;
}

CorrectedLgi eim_corrected_lgi(const Behavior &b, const AmbiguousJoint &ambiguous, const Label &measure) {
    if (b.scenario.length != 2 || !b.scenario.no_measurement) {
        throw StructuralError("corrected LGI needs a two-step scenario with a skip setting");
    }
    const SettingSeq both{measure, measure};
    const SettingSeq later{*b.scenario.no_measurement, measure};
    const auto &vals = b.scenario.outcome_values;
    CorrectedLgi out;
    out.lhs = mean_value(b, both, {0}, vals) + mean_value(b, both, {0, 1}, vals) - mean_value(b, later, {1}, vals);
    for (const auto &[q, d] : eim_delta(b, later, 1, ambiguous)) {
        out.bound += std::abs(d);
    }
    return out;
}

}  // namespace tempocorr
