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

#include "tempocorr/mr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "tempocorr/conic.hpp"

namespace tempocorr {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

// Maps a table entry onto the hidden variables it reads; nullopt when it can never occur.
constexpr double kCrossoverTolerance = 1e-4;

struct EntryPattern {
    std::vector<std::pair<std::size_t, Label>> required;  // variable index -> value
    bool impossible = false;
};

EntryPattern pattern_for(const Scenario &sc, const std::vector<HiddenVariable> &vars, const SettingSeq &s,
                         const OutcomeSeq &q) {
    EntryPattern pat;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (sc.is_skip(s[k])) {
            pat.impossible = pat.impossible || q[k] != kSkip;
            continue;
        }
        auto it = std::lower_bound(vars.begin(), vars.end(), HiddenVariable{k, s[k]});
        if (it == vars.end() || !(*it == HiddenVariable{k, s[k]})) {
            throw StructuralError("entry reads an undeclared hidden variable");
        }
        pat.required.emplace_back(static_cast<std::size_t>(it - vars.begin()), q[k]);
    }
    return pat;
}

bool matches(const EntryPattern &pat, const LabelSeq &vertex) {
    if (pat.impossible) {
        return false;
    }
    return std::all_of(pat.required.begin(), pat.required.end(),
                       [&](const auto &r) { return vertex[r.first] == r.second; });
}

// Calls f on every joint assignment of `vars`, in lexicographic order of alphabet indices.
void for_each_vertex(const Scenario &sc, const std::vector<HiddenVariable> &vars,
                     const std::function<void(const LabelSeq &)> &f) {
    std::uint64_t count = 1;
    std::vector<const LabelSeq *> alphabets;
    for (const auto &v : vars) {
        alphabets.push_back(&sc.outcomes_of(v.setting));
        count = saturating_mul(count, alphabets.back()->size());
    }
    if (count > kMaxEnumeration) {
        throw SizeGuardError("joint assignment count exceeds the enumeration limit");
    }
    std::vector<std::size_t> idx(vars.size(), 0);
    LabelSeq vertex(vars.size());
    for (;;) {
        for (std::size_t k = 0; k < vars.size(); ++k) {
            vertex[k] = (*alphabets[k])[idx[k]];
        }
        f(vertex);
        std::size_t k = vars.size();
        while (k > 0) {
            --k;
            if (++idx[k] < alphabets[k]->size()) {
                break;
            }
            idx[k] = 0;
            if (k == 0) {
                return;
            }
        }
        if (vars.empty()) {
            return;
        }
    }
}

std::vector<SettingSeq> strategy_prefixes(const Scenario &sc) {
    std::size_t nodes = 0;
    std::size_t layer = 1;
    for (std::size_t k = 0; k < sc.length; ++k) {
        layer = static_cast<std::size_t>(saturating_mul(layer, sc.settings.size()));
        nodes += layer;
        if (nodes > kMaxTranscriptNodes) {
            throw SizeGuardError("transcript tree exceeds " + std::to_string(kMaxTranscriptNodes) + " nodes");
        }
    }
    std::vector<SettingSeq> prefixes;
    std::vector<SettingSeq> current{SettingSeq{}};
    for (std::size_t k = 0; k < sc.length; ++k) {
        std::vector<SettingSeq> next;
        for (const auto &p : current) {
            for (const auto &s : sc.settings) {
                auto q = p;
                q.push_back(s);
                next.push_back(q);
                prefixes.push_back(std::move(q));
            }
        }
        current = std::move(next);
    }
    return prefixes;
}

void for_each_strategy(const Scenario &sc, const std::function<void(const std::vector<SettingSeq> &,
                                                                   const std::vector<std::size_t> &)> &f) {
    const auto prefixes = strategy_prefixes(sc);
    if (count_deterministic_strategies(sc) > kMaxEnumeration) {
        throw SizeGuardError("deterministic strategy count exceeds the enumeration limit");
    }
    std::vector<std::size_t> sizes;
    for (const auto &p : prefixes) {
        sizes.push_back(sc.outcomes_of(p.back()).size());
    }
    std::vector<std::size_t> idx(prefixes.size(), 0);
    for (;;) {
        f(prefixes, idx);
        std::size_t k = prefixes.size();
        for (;;) {
            if (k == 0) {
                return;
            }
            --k;
            if (++idx[k] < sizes[k]) {
                break;
            }
            idx[k] = 0;
        }
    }
}

DeterministicStrategy make_strategy(const Scenario &sc, const std::vector<SettingSeq> &prefixes,
                                    const std::vector<std::size_t> &idx) {
    DeterministicStrategy st;
    for (std::size_t k = 0; k < prefixes.size(); ++k) {
        st.response[prefixes[k]] = sc.outcomes_of(prefixes[k].back())[idx[k]];
    }
    return st;
}

}  // namespace

std::vector<HiddenVariable> hidden_variables(const Scenario &scenario, const std::vector<SettingSeq> &sequences) {
    std::set<HiddenVariable> vars;
    for (const auto &s : sequences) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!scenario.is_skip(s[k])) {
                vars.insert({k, s[k]});
            }
        }
    }
    return {vars.begin(), vars.end()};
}

double JointDistribution::predict(const Scenario &scenario, const SettingSeq &settings,
                                  const OutcomeSeq &outcomes) const {
    const auto pat = pattern_for(scenario, variables, settings, outcomes);
    double total = 0.0;
    for (const auto &[v, p] : probabilities) {
        if (matches(pat, v)) {
            total += p;
        }
    }
    return total;
}

MrResult is_macrorealist(const Behavior &b, double tol) {
    b.scenario.validate();
    const auto aot = check_aot(b, tol);
    if (!aot.ok()) {
        throw AotViolationError("behavior violates the arrow-of-time constraints by " +
                                std::to_string(aot.max_deviation()) + "; macrorealism is not testable");
    }
    std::vector<SettingSeq> seqs;
    std::vector<ProbabilityKey> entries;
    std::vector<double> raw;
    for (const auto &[s, dist] : b.table) {
        seqs.push_back(s);
        for (const auto &[q, p] : dist) {
            entries.push_back({s, q});
            raw.push_back(p);
        }
    }
    const auto vars = hidden_variables(b.scenario, seqs);
    std::vector<EntryPattern> patterns;
    for (const auto &[s, q] : entries) {
        patterns.push_back(pattern_for(b.scenario, vars, s, q));
    }
    std::vector<LabelSeq> vertices;
    for_each_vertex(b.scenario, vars, [&](const LabelSeq &v) { vertices.push_back(v); });

    const int nv = static_cast<int>(vertices.size());
    const int m = static_cast<int>(entries.size());
    conic::Problem lp;
    lp.blocks = {{conic::BlockKind::diagonal, nv + 2 * m}};
    for (int j = 0; j < 2 * m; ++j) {
        lp.c.push_back({0, nv + j, nv + j, 1.0});
    }
    for (int j = 0; j < m; ++j) {
        conic::SparseSymmetric row;
        for (int v = 0; v < nv; ++v) {
            if (matches(patterns[static_cast<std::size_t>(j)], vertices[static_cast<std::size_t>(v)])) {
                row.push_back({0, v, v, 1.0});
            }
        }
        row.push_back({0, nv + j, nv + j, 1.0});
        row.push_back({0, nv + m + j, nv + m + j, -1.0});
        lp.a.push_back(std::move(row));
        lp.b.push_back(raw[static_cast<std::size_t>(j)]);
    }
    conic::SparseSymmetric norm;
    for (int v = 0; v < nv; ++v) {
        norm.push_back({0, v, v, 1.0});
    }
    lp.a.push_back(norm);
    lp.b.push_back(1.0);

    conic::Settings settings;
    settings.tolerance = std::min(1e-9, tol * 1e-2);
    settings.max_iterations = 200;
    const auto sol = conic::solve(lp, settings);
    const double worst = std::max({sol.primal_infeasibility, sol.dual_infeasibility, sol.relative_gap});
    if (!sol.converged() && !(worst <= kCrossoverTolerance)) {
        throw SolverError("macrorealism LP: " + sol.diagnostic());
    }

    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(m, nv);
    for (int j = 0; j < m; ++j) {
        for (int v = 0; v < nv; ++v) {
            if (matches(patterns[static_cast<std::size_t>(j)], vertices[static_cast<std::size_t>(v)])) {
                incidence(j, v) = 1.0;
            }
        }
    }
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(raw.data(), m);
    auto residual_of = [&](const Eigen::VectorXd &p) {
        return m == 0 ? 0.0 : (incidence * p - target).cwiseAbs().maxCoeff();
    };
    auto normalized = [&](Eigen::VectorXd p) {
        p = p.cwiseMax(0.0);
        const double mass = p.sum();
        if (mass > 0.0) {
            p /= mass;
        }
        return p;
    };

    Eigen::VectorXd p = normalized(sol.x[0].col(0).head(nv));
    double residual = residual_of(p);
    if (residual > tol) {
        // Crossover: re-solve the equalities exactly on the support picked out by the interior point.
        const double cut = 1e-3 * p.maxCoeff();
        std::vector<int> support;
        for (int v = 0; v < nv; ++v) {
            if (p(v) > cut) {
                support.push_back(v);
            }
        }
        const int ns = static_cast<int>(support.size());
        Eigen::MatrixXd sys(m + 1, ns);
        for (int k = 0; k < ns; ++k) {
            sys.col(k).head(m) = incidence.col(support[static_cast<std::size_t>(k)]);
            sys(m, k) = 1.0;
        }
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = target;
        rhs(m) = 1.0;
        const Eigen::VectorXd ps = sys.completeOrthogonalDecomposition().solve(rhs);
        if (ps.allFinite() && ps.minCoeff() >= -tol) {
            Eigen::VectorXd polished = Eigen::VectorXd::Zero(nv);
            for (int k = 0; k < ns; ++k) {
                polished(support[static_cast<std::size_t>(k)]) = ps(k);
            }
            polished = normalized(polished);
            const double r = residual_of(polished);
            if (r < residual) {
                p = polished;
                residual = r;
            }
        }
    }

    MrResult result;
    result.distance = std::max(0.0, sol.primal_objective);
    result.max_residual = residual;
    result.accepted = residual <= tol;
    if (result.accepted) {
        result.distance = 0.0;
        JointDistribution joint;
        joint.variables = vars;
        for (int v = 0; v < nv; ++v) {
            joint.probabilities[vertices[static_cast<std::size_t>(v)]] = p(v);
        }
        result.joint = std::move(joint);
        return result;
    }

    double scale = 0.0;
    for (int j = 0; j < m; ++j) {
        scale = std::max(scale, std::abs(sol.y[j]));
    }
    if (!(scale > 0.0)) {
        throw SolverError("macrorealism LP: rejection without a dual certificate");
    }
    Certificate cert;
    cert.inequality.name = "mr_certificate";
    cert.inequality.scenario = b.scenario;
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<double> coef(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double c = sol.y[j] / scale;
        coef[static_cast<std::size_t>(j)] = std::abs(c) < 1e-9 ? 0.0 : c;
        if (coef[static_cast<std::size_t>(j)] != 0.0) {
            const auto &[s, q] = entries[static_cast<std::size_t>(j)];
            cert.inequality.terms.push_back(ProbabilityTerm{coef[static_cast<std::size_t>(j)], s, q});
            cert.value += coef[static_cast<std::size_t>(j)] * raw[static_cast<std::size_t>(j)];
        }
    }
    for (const auto &v : vertices) {
        double value = 0.0;
        for (int j = 0; j < m; ++j) {
            if (coef[static_cast<std::size_t>(j)] != 0.0 && incidence(j, static_cast<int>(&v - vertices.data()))) {
                value += coef[static_cast<std::size_t>(j)];
            }
        }
        bound = std::max(bound, value);
    }
    cert.inequality.classical_bound = bound;
    result.certificate = std::move(cert);
    return result;
}

OutcomeSeq DeterministicStrategy::outputs(const SettingSeq &settings) const {
    OutcomeSeq out;
    SettingSeq prefix;
    for (const auto &s : settings) {
        prefix.push_back(s);
        auto it = response.find(prefix);
        if (it == response.end()) {
            throw MissingDataError("strategy has no response for prefix " + format_word(prefix));
        }
        out.push_back(it->second);
    }
    return out;
}

Behavior DeterministicStrategy::behavior(const Scenario &scenario) const {
    Behavior b{scenario, {}};
    for (const auto &s : scenario.all_setting_sequences()) {
        const auto q = outputs(s);
        for (const auto &w : scenario.outcome_words(s)) {
            b.table[s][w] = w == q ? 1.0 : 0.0;
        }
    }
    return b;
}

std::uint64_t count_deterministic_strategies(const Scenario &scenario) {
    std::uint64_t count = 1;
    std::uint64_t prefixes = 1;
    for (std::size_t k = 0; k < scenario.length; ++k) {
        for (const auto &s : scenario.settings) {
            for (std::uint64_t r = 0; r < prefixes; ++r) {
                count = saturating_mul(count, scenario.outcomes_of(s).size());
                if (count == std::numeric_limits<std::uint64_t>::max()) {
                    return count;
                }
            }
        }
        prefixes = saturating_mul(prefixes, scenario.settings.size());
    }
    return count;
}

std::vector<DeterministicStrategy> enumerate_deterministic_strategies(const Scenario &scenario) {
    scenario.validate();
    std::vector<DeterministicStrategy> out;
    for_each_strategy(scenario, [&](const std::vector<SettingSeq> &prefixes, const std::vector<std::size_t> &idx) {
        out.push_back(make_strategy(scenario, prefixes, idx));
    });
    return out;
}

ClassicalBoundResult classical_bound(const LinearExpression &expr, ClassicalModel model) {
    expr.validate();
    const auto &sc = expr.scenario;
    const auto coefficients = expr.coefficients();
    const double sign = expr.sense == Sense::upper ? 1.0 : -1.0;
    ClassicalBoundResult best;
    best.value = -std::numeric_limits<double>::infinity();

    if (model == ClassicalModel::macrorealist) {
        const auto vars = hidden_variables(sc, sc.all_setting_sequences());
        std::vector<std::pair<EntryPattern, double>> terms;
        for (const auto &[key, c] : coefficients) {
            terms.emplace_back(pattern_for(sc, vars, key.first, key.second), c);
        }
        LabelSeq arg;
        for_each_vertex(sc, vars, [&](const LabelSeq &v) {
            double value = 0.0;
            for (const auto &[pat, c] : terms) {
                if (matches(pat, v)) {
                    value += c;
                }
            }
            if (sign * value > best.value) {
                best.value = sign * value;
                arg = v;
            }
        });
        for (std::size_t k = 0; k < vars.size(); ++k) {
            best.assignment.emplace_back(vars[k], arg[k]);
        }
        best.value *= sign;
        return best;
    }

    std::vector<SettingSeq> arg_prefixes;
    std::vector<std::size_t> arg_idx;
    std::map<SettingSeq, std::size_t> slot;
    for_each_strategy(sc, [&](const std::vector<SettingSeq> &prefixes, const std::vector<std::size_t> &idx) {
        if (slot.empty()) {
            for (std::size_t k = 0; k < prefixes.size(); ++k) {
                slot[prefixes[k]] = k;
            }
        }
        double value = 0.0;
        for (const auto &[key, c] : coefficients) {
            const auto &[s, q] = key;
            bool hit = true;
            SettingSeq prefix;
            for (std::size_t k = 0; k < s.size() && hit; ++k) {
                prefix.push_back(s[k]);
                hit = sc.outcomes_of(s[k])[idx[slot.at(prefix)]] == q[k];
            }
            if (hit) {
                value += c;
            }
        }
        if (sign * value > best.value) {
            best.value = sign * value;
            arg_prefixes = prefixes;
            arg_idx = idx;
        }
    });
    best.value *= sign;
    best.strategy = make_strategy(sc, arg_prefixes, arg_idx);
    return best;
}

}  // namespace tempocorr
