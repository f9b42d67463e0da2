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

#include "tempocorr/moment.hpp"

#include <algorithm>

#include "tempocorr/errors.hpp"

namespace tempocorr {

namespace {

bool same_measurement(const Projector &a, const Projector &b) { return a.step == b.step && a.setting == b.setting; }

bool is_last(const Scenario &sc, const Projector &p) { return sc.outcomes_of(p.setting).back() == p.outcome; }

Word oriented(Word w) {
    Word r(w.rbegin(), w.rend());
    return std::min(w, r);
}

// Non-last projectors of the measurement `setting` at `step`.
std::vector<Projector> free_projectors(const Scenario &sc, std::size_t step, const Label &setting) {
    std::vector<Projector> out;
    const auto &alphabet = sc.outcomes_of(setting);
    for (std::size_t k = 0; k + 1 < alphabet.size(); ++k) {
        out.push_back({step, setting, alphabet[k]});
    }
    return out;
}

// Each projector becomes itself when free, otherwise identity minus the free projectors of its measurement.
WordSum expand(const Scenario &sc, const Word &w) {
    WordSum sum{{Word{}, 1.0}};
    for (const auto &p : w) {
        std::vector<std::pair<std::optional<Projector>, double>> factor;
        if (is_last(sc, p)) {
            factor.emplace_back(std::nullopt, 1.0);
            for (const auto &f : free_projectors(sc, p.step, p.setting)) {
                factor.emplace_back(f, -1.0);
            }
        } else {
            factor.emplace_back(p, 1.0);
        }
        WordSum next;
        for (const auto &[u, c] : sum) {
            for (const auto &[f, d] : factor) {
                Word v = u;
                if (f) {
                    v.push_back(*f);
                }
                next[v] += c * d;
            }
        }
        sum = std::move(next);
    }
    return sum;
}

void extend_index(const Scenario &sc, std::size_t level, std::size_t first_step, Word &prefix,
                  std::vector<Word> &out) {
    if (prefix.size() == level) {
        return;
    }
    for (std::size_t step = first_step; step < sc.length; ++step) {
        for (const auto &s : sc.settings) {
            if (sc.is_skip(s)) {
                continue;
            }
            for (const auto &p : free_projectors(sc, step, s)) {
                prefix.push_back(p);
                out.push_back(prefix);
                extend_index(sc, level, step + 1, prefix, out);
                prefix.pop_back();
            }
        }
    }
}

}  // namespace

std::optional<Word> reduce(Word w) {
    Word out;
    for (auto &p : w) {
        if (!out.empty() && same_measurement(out.back(), p)) {
            if (out.back().outcome != p.outcome) {
                return std::nullopt;
            }
            continue;
        }
        out.push_back(std::move(p));
    }
    return out;
}

WordSum canonicalize(const Scenario &scenario, const Word &w) {
    WordSum out;
    const auto r = reduce(w);
    if (!r) {
        return out;
    }
    for (const auto &[u, c] : expand(scenario, *r)) {
        if (auto v = reduce(u)) {
            out[oriented(*v)] += c;
        }
    }
    std::erase_if(out, [](const auto &kv) { return kv.second == 0.0; });
    return out;
}

std::string format_word(const Word &w) {
    if (w.empty()) {
        return "1";
    }
    std::string s;
    for (const auto &p : w) {
        s += "P[" + std::to_string(p.step) + "," + p.setting + "," + p.outcome + "]";
    }
    return s;
}

std::map<int, double> MomentMatrix::probability(const SettingSeq &settings, const OutcomeSeq &outcomes) const {
    if (settings.size() != scenario.length || outcomes.size() != scenario.length) {
        throw StructuralError("sequence length does not match the scenario");
    }
    Word w;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        if (scenario.is_skip(settings[k])) {
            continue;
        }
        const auto &alphabet = scenario.outcomes_of(settings[k]);
        if (std::find(alphabet.begin(), alphabet.end(), outcomes[k]) == alphabet.end()) {
            throw StructuralError("outcome " + outcomes[k] + " is not an outcome of setting " + settings[k]);
        }
        w.push_back({k, settings[k], outcomes[k]});
    }
    if (w.size() > level) {
        throw StructuralError("sequence " + tempocorr::format_word(settings) + " needs level " +
                              std::to_string(w.size()) + ", moment matrix has level " + std::to_string(level));
    }
    std::map<Word, std::size_t> position;
    for (std::size_t i = 0; i < index.size(); ++i) {
        position[index[i]] = i;
    }
    std::map<int, double> out;
    const auto terms = expand(scenario, w);
    for (const auto &[u, cu] : terms) {
        for (const auto &[v, cv] : terms) {
            const int cls = entry[position.at(u)][position.at(v)];
            if (cls >= 0) {
                out[cls] += cu * cv;
            }
        }
    }
    return out;
}

RMatrix MomentMatrix::assemble(const RVector &values) const {
    const auto n = static_cast<Eigen::Index>(index.size());
    RMatrix m = RMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const int cls = entry[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (cls == 0) {
                m(i, j) = 1.0;
            } else if (cls > 0) {
                m(i, j) = values[cls];
            }
        }
    }
    return m;
}

MomentMatrix build_moment_matrix(const Scenario &scenario, std::size_t level) {
    scenario.validate();
    if (level == 0) {
        throw StructuralError("moment matrix level must be positive");
    }
    MomentMatrix mm;
    mm.scenario = scenario;
    mm.level = level;
    mm.index.push_back({});
    Word prefix;
    extend_index(scenario, level, 0, prefix, mm.index);
    std::stable_sort(mm.index.begin(), mm.index.end(),
                     [](const Word &a, const Word &b) { return a.size() < b.size(); });

    std::map<Word, int> class_of{{Word{}, 0}};
    mm.classes.push_back({});
    const std::size_t n = mm.index.size();
    mm.entry.assign(n, std::vector<int>(n, -1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Word w = mm.index[i];
            w.insert(w.end(), mm.index[j].rbegin(), mm.index[j].rend());
            const auto r = reduce(std::move(w));
            if (!r) {
                continue;
            }
            const Word key = oriented(*r);
            auto [it, inserted] = class_of.try_emplace(key, static_cast<int>(mm.classes.size()));
            if (inserted) {
                mm.classes.push_back(key);
            }
            mm.entry[i][j] = mm.entry[j][i] = it->second;
        }
    }
    return mm;
}

std::size_t measured_length(const LinearExpression &expr) {
    std::size_t longest = 0;
    for (const auto &s : expr.setting_sequences()) {
        longest = std::max(longest, static_cast<std::size_t>(std::count_if(
                                        s.begin(), s.end(), [&](const Label &x) { return !expr.scenario.is_skip(x); })));
    }
    return longest;
}

ExpressionSdp expression_sdp(const LinearExpression &expr, const MomentMatrix &mm) {
    expr.validate();
    if (!(expr.scenario == mm.scenario)) {
        throw StructuralError("expression and moment matrix use different scenarios");
    }
    std::vector<double> g(mm.classes.size(), 0.0);
    for (const auto &[key, c] : expr.coefficients()) {
        if (c == 0.0) {
            continue;
        }
        for (const auto &[cls, w] : mm.probability(key.first, key.second)) {
            g[static_cast<std::size_t>(cls)] += c * w;
        }
    }
    ExpressionSdp out;
    out.offset = g[0];
    out.sign = expr.sense == Sense::upper ? 1.0 : -1.0;
    const int n = static_cast<int>(mm.size());
    auto &p = out.problem;
    p.blocks = {{conic::BlockKind::psd, n}};
    p.a.resize(mm.num_free());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const int cls = mm.entry[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (cls == 0) {
                p.c.push_back({0, i, j, 1.0});
            } else if (cls > 0) {
                p.a[static_cast<std::size_t>(cls - 1)].push_back({0, i, j, -1.0});
            }
        }
    }
    for (std::size_t c = 1; c < g.size(); ++c) {
        p.b.push_back(out.sign * g[c]);
    }
    return out;
}

ProjectiveBound max_expression_projective(const LinearExpression &expr, std::optional<std::size_t> level,
                                          const conic::Settings &settings) {
    const std::size_t l = level.value_or(std::max<std::size_t>(1, measured_length(expr)));
    const auto mm = build_moment_matrix(expr.scenario, l);
    const auto sdp = expression_sdp(expr, mm);
    auto sol = conic::solve(sdp.problem, settings);
    if (!sol.converged()) {
        throw SolverError("moment matrix SDP for " + expr.name + ": " + sol.diagnostic());
    }
    ProjectiveBound out;
    out.level = l;
    out.value = sdp.offset + sdp.sign * sol.dual_objective;
    RVector values = RVector::Zero(static_cast<Eigen::Index>(mm.classes.size()));
    values[0] = 1.0;
    values.tail(static_cast<Eigen::Index>(mm.num_free())) = sol.y;
    out.moments = mm.assemble(values);
    out.solution = std::move(sol);
    return out;
}

}  // namespace tempocorr
