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

#include "tempocorr/automata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "tempocorr/errors.hpp"

namespace tempocorr {

namespace {

constexpr std::size_t kMaxDeterministicMachines = 10'000'000;

std::size_t index_in(const LabelSeq &alphabet, const Label &x, const char *what) {
    auto it = std::find(alphabet.begin(), alphabet.end(), x);
    if (it == alphabet.end()) {
        throw StructuralError(std::string("unknown ") + what + " " + x);
    }
    return static_cast<std::size_t>(it - alphabet.begin());
}

struct IndexedTerm {
    double coefficient = 0.0;
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> outputs;
};

// Machine inputs and outputs implied by an expression's scenario.
struct MachineShape {
    LabelSeq inputs;
    LabelSeq outputs;
    std::vector<IndexedTerm> terms;
    double sign = 1.0;
};

MachineShape shape_of(const LinearExpression &expr) {
    expr.validate();
    const auto &sc = expr.scenario;
    if (sc.no_measurement && sc.has_setting(*sc.no_measurement)) {
        throw StructuralError("machine scenarios treat every setting as an input; drop the no-measurement setting");
    }
    MachineShape shape;
    shape.inputs = sc.settings;
    shape.outputs = sc.outcomes_of(sc.settings.front());
    for (const auto &s : sc.settings) {
        if (sc.outcomes_of(s) != shape.outputs) {
            throw StructuralError("machine scenarios need the same outcomes for every setting");
        }
    }
    shape.sign = expr.sense == Sense::upper ? 1.0 : -1.0;
    for (const auto &[key, c] : expr.coefficients()) {
        if (c == 0.0) {
            continue;
        }
        IndexedTerm t;
        t.coefficient = c;
        for (std::size_t k = 0; k < key.first.size(); ++k) {
            t.inputs.push_back(index_in(shape.inputs, key.first[k], "input"));
            t.outputs.push_back(index_in(shape.outputs, key.second[k], "output"));
        }
        shape.terms.push_back(std::move(t));
    }
    return shape;
}

double term_probability(const ClassicalMachine &m, const IndexedTerm &t) {
    RVector a = m.initial;
    for (std::size_t k = 0; k < t.inputs.size(); ++k) {
        a = m.transfer[t.inputs[k]][t.outputs[k]] * a;
    }
    return a.sum();
}

double expression_value(const ClassicalMachine &m, const MachineShape &shape) {
    double v = 0.0;
    for (const auto &t : shape.terms) {
        v += t.coefficient * term_probability(m, t);
    }
    return v;
}

// Parameters: initial distribution, then one block per (input, state) over (output, next state).
class ClassicalParameterization {
   public:
    ClassicalParameterization(std::size_t d, std::size_t ni, std::size_t no) : d_(d), ni_(ni), no_(no) {}

    std::size_t size() const { return d_ + ni_ * d_ * no_ * d_; }

    ClassicalMachine machine(const double *x, const MachineShape &shape) const {
        ClassicalMachine m;
        m.inputs = shape.inputs;
        m.outputs = shape.outputs;
        m.initial = normalized(x, d_);
        m.transfer.assign(ni_, std::vector<RMatrix>(no_, RMatrix::Zero(static_cast<Eigen::Index>(d_),
                                                                       static_cast<Eigen::Index>(d_))));
        for (std::size_t s = 0; s < ni_; ++s) {
            for (std::size_t r = 0; r < d_; ++r) {
                const RVector p = normalized(x + block(s, r), no_ * d_);
                for (std::size_t q = 0; q < no_; ++q) {
                    for (std::size_t rn = 0; rn < d_; ++rn) {
                        m.transfer[s][q](static_cast<Eigen::Index>(rn), static_cast<Eigen::Index>(r)) =
                            p[static_cast<Eigen::Index>(q * d_ + rn)];
                    }
                }
            }
        }
        return m;
    }

    // sign * expression value with its gradient in x.
    double evaluate(const double *x, double *grad, const MachineShape &shape) const {
        const auto m = machine(x, shape);
        double value = 0.0;
        RVector g0 = RVector::Zero(static_cast<Eigen::Index>(d_));
        std::vector<std::vector<RMatrix>> gt(
            ni_, std::vector<RMatrix>(no_, RMatrix::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_))));
        for (const auto &t : shape.terms) {
            const std::size_t n = t.inputs.size();
            std::vector<RVector> fwd{m.initial};
            for (std::size_t k = 0; k < n; ++k) {
                fwd.push_back(m.transfer[t.inputs[k]][t.outputs[k]] * fwd.back());
            }
            const double c = shape.sign * t.coefficient;
            value += c * fwd.back().sum();
            if (!grad) {
                continue;
            }
            RVector back = RVector::Ones(static_cast<Eigen::Index>(d_));
            for (std::size_t k = n; k-- > 0;) {
                gt[t.inputs[k]][t.outputs[k]] += c * back * fwd[k].transpose();
                back = m.transfer[t.inputs[k]][t.outputs[k]].transpose() * back;
            }
            g0 += c * back;
        }
        if (grad) {
            chain(x, g0.data(), d_, grad);
            std::vector<double> gp(no_ * d_);
            for (std::size_t s = 0; s < ni_; ++s) {
                for (std::size_t r = 0; r < d_; ++r) {
                    for (std::size_t q = 0; q < no_; ++q) {
                        for (std::size_t rn = 0; rn < d_; ++rn) {
                            gp[q * d_ + rn] = gt[s][q](static_cast<Eigen::Index>(rn), static_cast<Eigen::Index>(r));
                        }
                    }
                    chain(x + block(s, r), gp.data(), no_ * d_, grad + block(s, r));
                }
            }
        }
        return value;
    }

    // Parameters reproducing a machine (square roots of its probabilities).
    std::vector<double> encode(const ClassicalMachine &m) const {
        std::vector<double> x(size());
        for (std::size_t r = 0; r < d_; ++r) {
            x[r] = std::sqrt(std::max(0.0, m.initial[static_cast<Eigen::Index>(r)]));
        }
        for (std::size_t s = 0; s < ni_; ++s) {
            for (std::size_t r = 0; r < d_; ++r) {
                for (std::size_t q = 0; q < no_; ++q) {
                    for (std::size_t rn = 0; rn < d_; ++rn) {
                        x[block(s, r) + q * d_ + rn] = std::sqrt(std::max(
                            0.0, m.transfer[s][q](static_cast<Eigen::Index>(rn), static_cast<Eigen::Index>(r))));
                    }
                }
            }
        }
        return x;
    }

   private:
    std::size_t block(std::size_t s, std::size_t r) const { return d_ + (s * d_ + r) * no_ * d_; }

    static RVector normalized(const double *x, std::size_t n) {
        RVector p(static_cast<Eigen::Index>(n));
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[static_cast<Eigen::Index>(i)] = x[i] * x[i];
            total += x[i] * x[i];
        }
        if (!(total > 0.0)) {
            return RVector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
        }
        return p / total;
    }

    // Gradient through p_i = x_i^2 / sum x^2.
    static void chain(const double *x, const double *g, std::size_t n, double *out) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += x[i] * x[i];
        }
        total = std::max(total, 1e-300);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += g[i] * x[i] * x[i] / total;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = 2.0 * x[i] / total * (g[i] - mean);
        }
    }

    std::size_t d_;
    std::size_t ni_;
    std::size_t no_;
};

bool dfs_machine(const OutcomeSeq &q, std::size_t d, std::size_t t, std::size_t r, std::size_t used,
                 std::vector<std::optional<Label>> &out, std::vector<std::size_t> &next) {
    if (t == q.size()) {
        return true;
    }
    if (out[r]) {
        return *out[r] == q[t] && dfs_machine(q, d, t + 1, next[r], used, out, next);
    }
    out[r] = q[t];
    for (std::size_t nr = 0; nr <= std::min(used, d - 1); ++nr) {
        next[r] = nr;
        if (dfs_machine(q, d, t + 1, nr, std::max(used, nr + 1), out, next)) {
            return true;
        }
    }
    out[r].reset();
    return false;
}

// Compositions of `total` into `parts` nonnegative integers.
void compositions(int total, int parts, std::vector<int> &cur, std::vector<std::vector<int>> &out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        cur.push_back(k);
        compositions(total - k, parts - 1, cur, out);
        cur.pop_back();
    }
}

template <class Step>
TickDistribution ticks_by(std::size_t t_max, Step step) {
    TickDistribution out;
    for (std::size_t t = 0; t < t_max; ++t) {
        out.p.push_back(step());
    }
    return out;
}

}  // namespace

ValidationReport ClassicalMachine::validate(double tol) const {
    const auto d = initial.size();
    if (d == 0 || inputs.empty() || outputs.empty() || transfer.size() != inputs.size()) {
        throw StructuralError("machine needs states, inputs, outputs and one transfer set per input");
    }
    for (const auto &per_input : transfer) {
        if (per_input.size() != outputs.size()) {
            throw StructuralError("machine needs one transfer matrix per output");
        }
        for (const auto &t : per_input) {
            if (t.rows() != d || t.cols() != d) {
                throw StructuralError("transfer matrices must be d x d");
            }
        }
    }
    ValidationReport report;
    if (initial.minCoeff() < -tol) {
        report.violations.push_back({"nonnegative", -initial.minCoeff(), "initial distribution"});
    }
    if (const double e = std::abs(initial.sum() - 1.0); e > tol) {
        report.violations.push_back({"normalization", e, "initial distribution"});
    }
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        RVector total = RVector::Zero(d);
        for (const auto &t : transfer[s]) {
            if (t.minCoeff() < -tol) {
                report.violations.push_back({"nonnegative", -t.minCoeff(), "input " + inputs[s]});
            }
            total += t.colwise().sum().transpose();
        }
        if (const double e = (total.array() - 1.0).abs().maxCoeff(); e > tol) {
            report.violations.push_back({"normalization", e, "input " + inputs[s]});
        }
    }
    return report;
}

std::size_t ClassicalMachine::input_index(const Label &s) const { return index_in(inputs, s, "input"); }
std::size_t ClassicalMachine::output_index(const Label &q) const { return index_in(outputs, q, "output"); }

void QuantumMachine::validate() const {
    if (inputs.empty() || instruments.size() != inputs.size()) {
        throw StructuralError("quantum machine needs one instrument per input");
    }
    for (const auto &inst : instruments) {
        if (inst.dim() != dim()) {
            throw StructuralError("instrument dimension differs from the state dimension");
        }
        if (inst.outcomes() != outputs) {
            throw StructuralError("instrument outcomes differ from the machine outputs");
        }
    }
}

double machine_probability(const ClassicalMachine &m, const SettingSeq &inputs, const OutcomeSeq &outputs) {
    if (inputs.size() != outputs.size()) {
        throw StructuralError("input and output sequences differ in length");
    }
    RVector a = m.initial;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        a = m.transfer.at(m.input_index(inputs[k])).at(m.output_index(outputs[k])) * a;
    }
    return a.sum();
}

double machine_probability(const QuantumMachine &m, const SettingSeq &inputs, const OutcomeSeq &outputs) {
    if (inputs.size() != outputs.size()) {
        throw StructuralError("input and output sequences differ in length");
    }
    CMatrix rho = m.initial.matrix();
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto &inst = m.instruments.at(index_in(m.inputs, inputs[k], "input"));
        rho = inst.apply(inst.outcome_index(outputs[k]), rho);
    }
    return rho.trace().real();
}

double machine_probability(const ClassicalMachine &m, const OutcomeSeq &outputs) {
    if (m.inputs.size() != 1) {
        throw StructuralError("input-free evaluation needs a single-input machine");
    }
    return machine_probability(m, SettingSeq(outputs.size(), m.inputs.front()), outputs);
}

double machine_probability(const QuantumMachine &m, const OutcomeSeq &outputs) {
    if (m.inputs.size() != 1) {
        throw StructuralError("input-free evaluation needs a single-input machine");
    }
    return machine_probability(m, SettingSeq(outputs.size(), m.inputs.front()), outputs);
}

QuantumMachine embed(const ClassicalMachine &m) {
    if (auto report = m.validate(); !report.ok()) {
        throw InvariantError("invalid classical machine", std::move(report));
    }
    const auto d = static_cast<int>(m.states());
    QuantumMachine out;
    out.inputs = m.inputs;
    out.outputs = m.outputs;
    CMatrix rho = CMatrix::Zero(d, d);
    for (int r = 0; r < d; ++r) {
        rho(r, r) = std::max(0.0, m.initial[r]);
    }
    out.initial = QuantumState::from_matrix(rho);
    for (const auto &per_input : m.transfer) {
        std::vector<std::vector<CMatrix>> kraus;
        for (const auto &t : per_input) {
            std::vector<CMatrix> ops;
            for (int r = 0; r < d; ++r) {
                for (int rn = 0; rn < d; ++rn) {
                    if (t(rn, r) > 0.0) {
                        CMatrix k = CMatrix::Zero(d, d);
                        k(rn, r) = std::sqrt(t(rn, r));
                        ops.push_back(std::move(k));
                    }
                }
            }
            if (ops.empty()) {
                ops.push_back(CMatrix::Zero(d, d));
            }
            kraus.push_back(std::move(ops));
        }
        out.instruments.push_back(Instrument::create(m.outputs, std::move(kraus)));
    }
    return out;
}

QuantumMachine embed(const QuantumMachine &m, int dim) {
    m.validate();
    const int d = m.dim();
    if (dim < d) {
        throw StructuralError("cannot embed into a smaller dimension");
    }
    QuantumMachine out;
    out.inputs = m.inputs;
    out.outputs = m.outputs;
    CMatrix rho = CMatrix::Zero(dim, dim);
    rho.topLeftCorner(d, d) = m.initial.matrix();
    out.initial = QuantumState::from_matrix(rho);
    CMatrix extra = CMatrix::Zero(dim, dim);
    extra.bottomRightCorner(dim - d, dim - d).setIdentity();
    for (const auto &inst : m.instruments) {
        std::vector<std::vector<CMatrix>> kraus;
        for (std::size_t q = 0; q < inst.outcomes().size(); ++q) {
            std::vector<CMatrix> ops;
            for (const auto &k : inst.kraus(q)) {
                CMatrix big = CMatrix::Zero(dim, dim);
                big.topLeftCorner(d, d) = k;
                ops.push_back(std::move(big));
            }
            if (q == 0 && dim > d) {
                ops.push_back(extra);
            }
            kraus.push_back(std::move(ops));
        }
        out.instruments.push_back(Instrument::create(m.outputs, std::move(kraus)));
    }
    return out;
}

namespace {

template <class Machine>
Behavior machine_behavior(const Machine &m, const Scenario &scenario, const std::vector<SettingSeq> &schedule) {
    scenario.validate();
    if (scenario.no_measurement && scenario.has_setting(*scenario.no_measurement)) {
        throw StructuralError("machine scenarios treat every setting as an input; drop the no-measurement setting");
    }
    Behavior b{scenario, {}};
    for (const auto &s : schedule) {
        if (s.size() != scenario.length) {
            throw StructuralError("schedule entry " + format_word(s) + " does not match the scenario length");
        }
        auto &dist = b.table[s];
        for (const auto &q : scenario.outcome_words(s)) {
            dist[q] = machine_probability(m, s, q);
        }
    }
    return b;
}

}  // namespace

Behavior behavior_from_machine(const ClassicalMachine &m, const Scenario &scenario,
                               const std::vector<SettingSeq> &schedule) {
    return machine_behavior(m, scenario, schedule);
}

Behavior behavior_from_machine(const QuantumMachine &m, const Scenario &scenario,
                               const std::vector<SettingSeq> &schedule) {
    return machine_behavior(m, scenario, schedule);
}

Scenario sequence_scenario(std::size_t n, const LabelSeq &outputs) {
    Scenario sc;
    sc.length = n;
    sc.settings = {kNoInput};
    sc.outcomes = {{kNoInput, outputs}};
    sc.no_measurement = std::nullopt;
    return sc;
}

LinearExpression sequence_expression(const OutcomeSeq &q, const LabelSeq &outputs) {
    LinearExpression e;
    e.scenario = sequence_scenario(q.size(), outputs);
    e.name = "p" + format_word(q);
    e.terms.push_back(ProbabilityTerm{1.0, SettingSeq(q.size(), kNoInput), q});
    return e;
}

ClassicalMachine rho_machine(const OutcomeSeq &q, std::size_t tail, std::size_t period, const LabelSeq &outputs) {
    if (period == 0) {
        throw StructuralError("rho machine needs a positive period");
    }
    const std::size_t d = tail + period;
    ClassicalMachine m;
    m.inputs = {kNoInput};
    m.outputs = outputs;
    m.initial = RVector::Unit(static_cast<Eigen::Index>(d), 0);
    m.transfer.assign(1, std::vector<RMatrix>(outputs.size(), RMatrix::Zero(static_cast<Eigen::Index>(d),
                                                                            static_cast<Eigen::Index>(d))));
    for (std::size_t r = 0; r < d; ++r) {
        const Label &emit = r < q.size() ? q[r] : outputs.front();
        const std::size_t next = r + 1 < d ? r + 1 : tail;
        m.transfer[0][index_in(outputs, emit, "output")](static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(r)) =
            1.0;
    }
    return m;
}

DeterministicComplexity deterministic_complexity(const OutcomeSeq &q, const LabelSeq &outputs) {
    if (q.empty()) {
        throw InputError("deterministic complexity needs a nonempty sequence");
    }
    for (const auto &x : q) {
        index_in(outputs, x, "output");
    }
    const std::size_t n = q.size();
    for (std::size_t total = 1; total <= n; ++total) {
        for (std::size_t tail = 0; tail < total; ++tail) {
            const std::size_t period = total - tail;
            bool ok = true;
            for (std::size_t t = tail; ok && t + period < n; ++t) {
                ok = q[t] == q[t + period];
            }
            if (!ok) {
                continue;
            }
            DeterministicComplexity out;
            out.complexity = total;
            out.tail = tail;
            out.period = period;
            out.machine = rho_machine(q, tail, period, outputs);
            if (total <= 6) {
                out.minimality_checked = total == 1 || !deterministic_machine_exists(q, total - 1);
            }
            return out;
        }
    }
    throw InvariantError("deterministic complexity", {});
}

bool deterministic_machine_exists(const OutcomeSeq &q, std::size_t d) {
    if (d == 0) {
        return q.empty();
    }
    std::vector<std::optional<Label>> out(d);
    std::vector<std::size_t> next(d, 0);
    return dfs_machine(q, d, 0, 0, 1, out, next);
}

std::string to_string(Certification c) {
    switch (c) {
        case Certification::grid:
            return "grid";
        case Certification::exhaustive:
            return "exhaustive";
        default:
            return "none";
    }
}

ClassicalOptimum max_expression_classical(const LinearExpression &expr, std::size_t d, const OptimizerConfig &config) {
    if (d == 0) {
        throw StructuralError("machine needs at least one state");
    }
    const auto shape = shape_of(expr);
    const ClassicalParameterization par(d, shape.inputs.size(), shape.outputs.size());
    const Objective f = [&](const double *x, double *g) { return par.evaluate(x, g, shape); };
    const auto runs = run_restarts<LocalResult>(
        config.restarts, config.seed, config.threads, [&](int, Rng &rng) {
            std::normal_distribution<double> normal;
            std::vector<double> x0(par.size());
            for (auto &v : x0) {
                v = normal(rng);
            }
            return maximize_local(f, std::move(x0), config.max_iterations, config.tolerance);
        });
    std::vector<double> values;
    std::size_t best = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        values.push_back(runs[i].value);
        if (runs[i].value > runs[best].value) {
            best = i;
        }
    }
    ClassicalOptimum out;
    out.method = "multistart";
    out.stats = summarize(values);
    out.machine = par.machine(runs[best].x.data(), shape);
    out.value = expression_value(out.machine, shape);
    out.stats.best *= shape.sign;
    out.stats.median *= shape.sign;
    out.stats.worst *= shape.sign;
    return out;
}

ClassicalOptimum max_expression_deterministic(const LinearExpression &expr, std::size_t d) {
    if (d == 0) {
        throw StructuralError("machine needs at least one state");
    }
    const auto shape = shape_of(expr);
    const std::size_t ni = shape.inputs.size();
    const std::size_t no = shape.outputs.size();
    const std::size_t choices = no * d;
    const std::size_t slots = ni * d;
    std::size_t count = 1;
    for (std::size_t k = 0; k < slots; ++k) {
        count *= choices;
        if (count > kMaxDeterministicMachines) {
            throw SizeGuardError("more than " + std::to_string(kMaxDeterministicMachines) + " deterministic machines");
        }
    }
    // Relabeling states makes the initial state 0 without loss of generality.
    ClassicalMachine m;
    m.inputs = shape.inputs;
    m.outputs = shape.outputs;
    m.initial = RVector::Unit(static_cast<Eigen::Index>(d), 0);
    std::vector<std::size_t> idx(slots, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_idx;
    auto build = [&](const std::vector<std::size_t> &choice) {
        m.transfer.assign(ni, std::vector<RMatrix>(no, RMatrix::Zero(static_cast<Eigen::Index>(d),
                                                                     static_cast<Eigen::Index>(d))));
        for (std::size_t s = 0; s < ni; ++s) {
            for (std::size_t r = 0; r < d; ++r) {
                const std::size_t c = choice[s * d + r];
                m.transfer[s][c / d](static_cast<Eigen::Index>(c % d), static_cast<Eigen::Index>(r)) = 1.0;
            }
        }
    };
    for (std::size_t k = 0; k < count; ++k) {
        build(idx);
        const double v = shape.sign * expression_value(m, shape);
        if (v > best) {
            best = v;
            best_idx = idx;
        }
        for (std::size_t j = slots; j-- > 0;) {
            if (++idx[j] < choices) {
                break;
            }
            idx[j] = 0;
        }
    }
    build(best_idx);
    ClassicalOptimum out;
    out.machine = m;
    out.value = expression_value(m, shape);
    out.method = "enumeration";
    out.certification = Certification::exhaustive;
    out.stats.restarts = static_cast<int>(count);
    out.stats.best = out.value;
    return out;
}

ClassicalOptimum max_sequence_probability_classical(const OutcomeSeq &q, std::size_t d, const OptimizerConfig &config,
                                                    const LabelSeq &outputs) {
    if (d == 0) {
        throw StructuralError("machine needs at least one state");
    }
    const auto dc = q.empty() ? std::optional<DeterministicComplexity>() : deterministic_complexity(q, outputs);
    if (!dc || dc->complexity > d) {
        return max_expression_classical(sequence_expression(q, outputs), d, config);
    }
    // Probability one is reachable; pad the minimal machine with unreachable states.
    const auto n = static_cast<Eigen::Index>(d);
    const auto k = static_cast<Eigen::Index>(dc->complexity);
    ClassicalMachine m = dc->machine;
    m.initial = RVector::Zero(n);
    m.initial.head(k) = dc->machine.initial;
    for (std::size_t o = 0; o < outputs.size(); ++o) {
        RMatrix t = RMatrix::Zero(n, n);
        t.topLeftCorner(k, k) = dc->machine.transfer[0][o];
        if (o == 0) {
            for (Eigen::Index r = k; r < n; ++r) {
                t(r, r) = 1.0;
            }
        }
        m.transfer[0][o] = t;
    }
    ClassicalOptimum out;
    out.value = machine_probability(m, q);
    out.machine = std::move(m);
    out.method = "deterministic";
    out.certification = Certification::exhaustive;
    out.stats.best = out.stats.median = out.stats.worst = out.value;
    return out;
}

ClassicalOptimum grid_sequence_probability(const OutcomeSeq &q, std::size_t d, int resolution,
                                           const LabelSeq &outputs) {
    if (d == 0 || d > 2) {
        throw StructuralError("grid search supports one or two states");
    }
    if (resolution < 1) {
        throw StructuralError("grid resolution must be positive");
    }
    const auto expr = sequence_expression(q, outputs);
    const auto shape = shape_of(expr);
    const std::size_t no = outputs.size();
    const std::size_t block = no * d;
    std::vector<std::vector<int>> simplex;
    std::vector<int> cur;
    compositions(resolution, static_cast<int>(block), cur, simplex);

    ClassicalMachine m;
    m.inputs = {kNoInput};
    m.outputs = outputs;
    m.initial = RVector::Unit(static_cast<Eigen::Index>(d), 0);
    m.transfer.assign(1, std::vector<RMatrix>(no, RMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))));
    auto set_state = [&](std::size_t r, const std::vector<int> &c) {
        for (std::size_t k = 0; k < block; ++k) {
            m.transfer[0][k / d](static_cast<Eigen::Index>(k % d), static_cast<Eigen::Index>(r)) =
                c[k] / static_cast<double>(resolution);
        }
    };

    constexpr std::size_t kKeep = 8;
    std::vector<std::pair<double, ClassicalMachine>> top;
    auto consider = [&]() {
        const double v = expression_value(m, shape);
        if (top.size() < kKeep || v > top.back().first) {
            top.emplace_back(v, m);
            std::sort(top.begin(), top.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
            if (top.size() > kKeep) {
                top.pop_back();
            }
        }
    };
    std::size_t evaluated = 0;
    for (const auto &c0 : simplex) {
        set_state(0, c0);
        if (d == 1) {
            consider();
            ++evaluated;
            continue;
        }
        for (const auto &c1 : simplex) {
            set_state(1, c1);
            consider();
            ++evaluated;
        }
    }

    const ClassicalParameterization par(d, 1, no);
    const Objective f = [&](const double *x, double *g) { return par.evaluate(x, g, shape); };
    ClassicalOptimum out;
    out.value = top.front().first;
    out.machine = top.front().second;
    for (const auto &[v, start] : top) {
        auto r = maximize_local(f, par.encode(start), 10'000, 1e-12);
        const auto polished = par.machine(r.x.data(), shape);
        const double pv = expression_value(polished, shape);
        if (pv > out.value) {
            out.value = pv;
            out.machine = polished;
        }
    }
    out.method = "grid";
    out.certification = Certification::grid;
    out.stats.restarts = static_cast<int>(evaluated);
    out.stats.best = out.value;
    return out;
}

TickDistribution machine_tick_distribution(const ClassicalMachine &m, std::size_t t_max, const Label &tick) {
    if (m.inputs.size() != 1) {
        throw StructuralError("clock machines take no input");
    }
    const std::size_t k = m.output_index(tick);
    RMatrix quiet = RMatrix::Zero(m.initial.size(), m.initial.size());
    for (std::size_t q = 0; q < m.outputs.size(); ++q) {
        if (q != k) {
            quiet += m.transfer[0][q];
        }
    }
    RVector a = m.initial;
    auto out = ticks_by(t_max, [&] {
        const double p = (m.transfer[0][k] * a).sum();
        a = quiet * a;
        return p;
    });
    out.tail = a.sum();
    return out;
}

TickDistribution machine_tick_distribution(const QuantumMachine &m, std::size_t t_max, const Label &tick) {
    m.validate();
    if (m.inputs.size() != 1) {
        throw StructuralError("clock machines take no input");
    }
    const auto &inst = m.instruments.front();
    const std::size_t k = inst.outcome_index(tick);
    CMatrix rho = m.initial.matrix();
    auto out = ticks_by(t_max, [&] {
        const double p = inst.apply(k, rho).trace().real();
        CMatrix next = CMatrix::Zero(rho.rows(), rho.cols());
        for (std::size_t q = 0; q < inst.outcomes().size(); ++q) {
            if (q != k) {
                next += inst.apply(q, rho);
            }
        }
        rho = std::move(next);
        return p;
    });
    out.tail = rho.trace().real();
    return out;
}

TickDistribution geometric_ticks(double rate, std::size_t t_max) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw InputError("tick rate must lie in (0, 1]");
    }
    double survive = 1.0;
    auto out = ticks_by(t_max, [&] {
        const double p = survive * rate;
        survive *= 1.0 - rate;
        return p;
    });
    out.tail = survive;
    return out;
}

ClockAccuracy clock_accuracy(const TickDistribution &ticks) {
    if (ticks.tail > 1e-9) {
        throw InputError("tick distribution tail mass " + std::to_string(ticks.tail) + " exceeds 1e-9; raise t_max");
    }
    ClockAccuracy out;
    for (std::size_t t = 0; t < ticks.p.size(); ++t) {
        out.mean += static_cast<double>(t + 1) * ticks.p[t];
    }
    for (std::size_t t = 0; t < ticks.p.size(); ++t) {
        const double dt = static_cast<double>(t + 1) - out.mean;
        out.variance += dt * dt * ticks.p[t];
    }
    if (out.variance > 1e-12) {
        out.accuracy = out.mean * out.mean / out.variance;
    }
    return out;
}

}  // namespace tempocorr
