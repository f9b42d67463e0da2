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

#include "tempocorr/seesaw.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tempocorr/errors.hpp"

namespace tempocorr {

namespace {

struct IndexedTerm {
    double coefficient = 0.0;
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> outputs;
};

struct Shape {
    LabelSeq inputs;
    LabelSeq outputs;
    std::vector<IndexedTerm> terms;
    double sign = 1.0;
};

std::size_t position(const LabelSeq &alphabet, const Label &x) {
    auto it = std::find(alphabet.begin(), alphabet.end(), x);
    if (it == alphabet.end()) {
        throw StructuralError("unknown label " + x);
    }
    return static_cast<std::size_t>(it - alphabet.begin());
}

Shape shape_of(const LinearExpression &expr) {
    expr.validate();
    const auto &sc = expr.scenario;
    if (sc.no_measurement && sc.has_setting(*sc.no_measurement)) {
        throw StructuralError("machine scenarios treat every setting as an input; drop the no-measurement setting");
    }
    Shape shape;
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
        IndexedTerm t{c, {}, {}};
        for (std::size_t k = 0; k < key.first.size(); ++k) {
            t.inputs.push_back(position(shape.inputs, key.first[k]));
            t.outputs.push_back(position(shape.outputs, key.second[k]));
        }
        shape.terms.push_back(std::move(t));
    }
    return shape;
}

double machine_value(const QuantumMachine &m, const Shape &shape) {
    double v = 0.0;
    for (const auto &t : shape.terms) {
        SettingSeq s;
        OutcomeSeq q;
        for (std::size_t k = 0; k < t.inputs.size(); ++k) {
            s.push_back(shape.inputs[t.inputs[k]]);
            q.push_back(shape.outputs[t.outputs[k]]);
        }
        v += t.coefficient * machine_probability(m, s, q);
    }
    return v;
}

CVector top_eigenvector(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    return es.eigenvectors().col(es.eigenvectors().cols() - 1);
}

// x = (pure state, then per input a stacked (outputs * kraus * d) x d complex matrix A). Kraus operators are the
// d x d blocks of A (A^dagger A)^(-1/2).
class QuantumParameterization {
   public:
    QuantumParameterization(int d, std::size_t ni, std::size_t no, int k) : d_(d), ni_(ni), no_(no), k_(k) {}

    int rows() const { return static_cast<int>(no_) * k_ * d_; }
    std::size_t state_size() const { return 2 * static_cast<std::size_t>(d_); }
    std::size_t block_size() const { return 2 * static_cast<std::size_t>(rows()) * static_cast<std::size_t>(d_); }
    std::size_t size() const { return state_size() + ni_ * block_size(); }

    CVector state(const double *x) const {
        CVector psi(d_);
        for (int i = 0; i < d_; ++i) {
            psi[i] = cplx(x[2 * i], x[2 * i + 1]);
        }
        return psi;
    }

    void set_state(double *x, const CVector &psi) const {
        for (int i = 0; i < d_; ++i) {
            x[2 * i] = psi[i].real();
            x[2 * i + 1] = psi[i].imag();
        }
    }

    CMatrix stacked(const double *x, std::size_t s) const {
        const double *p = x + state_size() + s * block_size();
        CMatrix a(rows(), d_);
        for (int i = 0; i < rows(); ++i) {
            for (int j = 0; j < d_; ++j) {
                a(i, j) = cplx(p[2 * (i * d_ + j)], p[2 * (i * d_ + j) + 1]);
            }
        }
        return a;
    }

    void set_stacked(double *x, std::size_t s, const CMatrix &a) const {
        double *p = x + state_size() + s * block_size();
        for (int i = 0; i < rows(); ++i) {
            for (int j = 0; j < d_; ++j) {
                p[2 * (i * d_ + j)] = a(i, j).real();
                p[2 * (i * d_ + j) + 1] = a(i, j).imag();
            }
        }
    }

    struct Isometry {
        CMatrix v;
        CMatrix w;
        CMatrix u;
        RVector lambda;
    };

    Isometry isometry(const CMatrix &a) const {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(a.adjoint() * a);
        Isometry iso;
        iso.u = es.eigenvectors();
        iso.lambda = es.eigenvalues().cwiseMax(1e-300);
        iso.w = iso.u * iso.lambda.cwiseSqrt().cwiseInverse().asDiagonal() * iso.u.adjoint();
        iso.v = a * iso.w;
        return iso;
    }

    CMatrix kraus(const CMatrix &v, std::size_t q, int j) const {
        return v.block((static_cast<int>(q) * k_ + j) * d_, 0, d_, d_);
    }

    QuantumMachine machine(const double *x, const Shape &shape) const {
        QuantumMachine m;
        m.inputs = shape.inputs;
        m.outputs = shape.outputs;
        m.initial = QuantumState::pure(state(x));
        for (std::size_t s = 0; s < ni_; ++s) {
            const CMatrix v = isometry(stacked(x, s)).v;
            std::vector<std::vector<CMatrix>> ops(no_);
            for (std::size_t q = 0; q < no_; ++q) {
                for (int j = 0; j < k_; ++j) {
                    ops[q].push_back(kraus(v, q, j));
                }
            }
            m.instruments.push_back(Instrument::create(m.outputs, std::move(ops)));
        }
        return m;
    }

    // sign * value, its gradient, and the Heisenberg operator whose expectation is that value.
    double evaluate(const double *x, double *grad, const Shape &shape, CMatrix *heisenberg = nullptr) const {
        const CVector psi = state(x);
        const double n2 = psi.squaredNorm();
        const CMatrix rho = psi * psi.adjoint() / n2;
        std::vector<CMatrix> a(ni_);
        std::vector<Isometry> iso(ni_);
        std::vector<CMatrix> gv(ni_);
        for (std::size_t s = 0; s < ni_; ++s) {
            a[s] = stacked(x, s);
            iso[s] = isometry(a[s]);
            gv[s] = CMatrix::Zero(rows(), d_);
        }
        CMatrix y = CMatrix::Zero(d_, d_);
        double value = 0.0;
        for (const auto &t : shape.terms) {
            const std::size_t n = t.inputs.size();
            std::vector<CMatrix> fwd{rho};
            for (std::size_t k = 0; k < n; ++k) {
                CMatrix next = CMatrix::Zero(d_, d_);
                for (int j = 0; j < k_; ++j) {
                    const CMatrix kj = kraus(iso[t.inputs[k]].v, t.outputs[k], j);
                    next += kj * fwd.back() * kj.adjoint();
                }
                fwd.push_back(std::move(next));
            }
            const double c = shape.sign * t.coefficient;
            value += c * fwd.back().trace().real();
            CMatrix back = CMatrix::Identity(d_, d_);
            for (std::size_t k = n; k-- > 0;) {
                CMatrix prev = CMatrix::Zero(d_, d_);
                for (int j = 0; j < k_; ++j) {
                    const CMatrix kj = kraus(iso[t.inputs[k]].v, t.outputs[k], j);
                    if (grad) {
                        gv[t.inputs[k]].block((static_cast<int>(t.outputs[k]) * k_ + j) * d_, 0, d_, d_) +=
                            c * back * kj * fwd[k];
                    }
                    prev += kj.adjoint() * back * kj;
                }
                back = std::move(prev);
            }
            y += c * back;
        }
        if (heisenberg) {
            *heisenberg = y;
        }
        if (grad) {
            const CVector g = (y * psi - value * psi) / n2;
            for (int i = 0; i < d_; ++i) {
                grad[2 * i] = 2.0 * g[i].real();
                grad[2 * i + 1] = 2.0 * g[i].imag();
            }
            for (std::size_t s = 0; s < ni_; ++s) {
                const auto &is = iso[s];
                const CMatrix h = is.u.adjoint() * (a[s].adjoint() * gv[s]) * is.u;
                CMatrix hl(d_, d_);
                for (int p = 0; p < d_; ++p) {
                    for (int r = 0; r < d_; ++r) {
                        const double lp = is.lambda[p];
                        const double lr = is.lambda[r];
                        const double div = std::abs(lp - lr) > 1e-12 * std::max(lp, lr)
                                               ? (1.0 / std::sqrt(lp) - 1.0 / std::sqrt(lr)) / (lp - lr)
                                               : -0.5 / (lp * std::sqrt(lp));
                        hl(p, r) = h(p, r) * div;
                    }
                }
                const CMatrix mm = is.u * hl * is.u.adjoint();
                const CMatrix ga = gv[s] * is.w + a[s] * (mm + mm.adjoint());
                double *out = grad + state_size() + s * block_size();
                for (int i = 0; i < rows(); ++i) {
                    for (int j = 0; j < d_; ++j) {
                        out[2 * (i * d_ + j)] = 2.0 * ga(i, j).real();
                        out[2 * (i * d_ + j) + 1] = 2.0 * ga(i, j).imag();
                    }
                }
            }
        }
        return value;
    }

   private:
    int d_;
    std::size_t ni_;
    std::size_t no_;
    int k_;
};

struct SeesawRun {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
};

SeesawRun seesaw_from(const QuantumParameterization &par, const Shape &shape, std::vector<double> x0,
                      const QuantumSearchConfig &config) {
    const auto &opt = config.optimizer;
    const Objective joint = [&](const double *x, double *g) { return par.evaluate(x, g, shape); };
    auto r = maximize_local(joint, std::move(x0), opt.max_iterations, opt.tolerance);
    SeesawRun run{r.x, r.value};
    const std::size_t ns = par.state_size();
    for (int round = 0; round < config.rounds; ++round) {
        CMatrix y;
        par.evaluate(run.x.data(), nullptr, shape, &y);
        std::vector<double> x = run.x;
        par.set_state(x.data(), top_eigenvector(y));
        const std::vector<double> fixed(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(ns));
        const Objective instruments = [&](const double *z, double *g) {
            std::vector<double> full(fixed);
            full.insert(full.end(), z, z + (par.size() - ns));
            std::vector<double> gfull(g ? par.size() : 0);
            const double v = par.evaluate(full.data(), g ? gfull.data() : nullptr, shape);
            if (g) {
                std::copy(gfull.begin() + static_cast<std::ptrdiff_t>(ns), gfull.end(), g);
            }
            return v;
        };
        auto ri = maximize_local(instruments, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(ns), x.end()),
                                 opt.max_iterations, opt.tolerance);
        std::copy(ri.x.begin(), ri.x.end(), x.begin() + static_cast<std::ptrdiff_t>(ns));
        const double v = par.evaluate(x.data(), nullptr, shape);
        const double gain = v - run.value;
        if (v > run.value) {
            run = {x, v};
        }
        if (gain < opt.tolerance * std::max(1.0, std::abs(run.value))) {
            break;
        }
    }
    return run;
}

}  // namespace

QuantumOptimum max_expression_quantum_seesaw(const LinearExpression &expr, int d, const QuantumSearchConfig &config) {
    if (d < 1) {
        throw StructuralError("quantum machine needs a positive dimension");
    }
    const auto shape = shape_of(expr);
    int k = config.kraus_per_outcome > 0 ? config.kraus_per_outcome : d;
    if (config.warm_start) {
        for (const auto &inst : config.warm_start->instruments) {
            for (std::size_t q = 0; q < inst.outcomes().size(); ++q) {
                k = std::max(k, static_cast<int>(inst.kraus(q).size()));
            }
        }
    }
    const QuantumParameterization par(d, shape.inputs.size(), shape.outputs.size(), k);

    auto runs = run_restarts<SeesawRun>(config.optimizer.restarts, config.optimizer.seed, config.optimizer.threads,
                                        [&](int, Rng &rng) {
                                            std::normal_distribution<double> normal;
                                            std::vector<double> x0(par.size());
                                            for (auto &v : x0) {
                                                v = normal(rng);
                                            }
                                            return seesaw_from(par, shape, std::move(x0), config);
                                        });
    if (config.warm_start) {
        const auto m = embed(*config.warm_start, d);
        if (m.inputs != shape.inputs || m.outputs != shape.outputs) {
            throw StructuralError("warm start machine does not match the expression");
        }
        std::vector<double> x0(par.size(), 0.0);
        par.set_state(x0.data(), top_eigenvector(m.initial.matrix()));
        for (std::size_t s = 0; s < m.instruments.size(); ++s) {
            CMatrix a = CMatrix::Zero(par.rows(), d);
            const auto &inst = m.instruments[s];
            for (std::size_t q = 0; q < inst.outcomes().size(); ++q) {
                for (std::size_t j = 0; j < inst.kraus(q).size(); ++j) {
                    a.block((static_cast<int>(q) * k + static_cast<int>(j)) * d, 0, d, d) = inst.kraus(q)[j];
                }
            }
            par.set_stacked(x0.data(), s, a);
        }
        runs.push_back(seesaw_from(par, shape, std::move(x0), config));
    }
    std::vector<double> values;
    std::size_t best = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        values.push_back(shape.sign * runs[i].value);
        if (runs[i].value > runs[best].value) {
            best = i;
        }
    }
    QuantumOptimum out;
    out.machine = par.machine(runs[best].x.data(), shape);
    out.value = machine_value(out.machine, shape);
    out.stats = summarize(values);
    if (shape.sign < 0) {
        std::swap(out.stats.best, out.stats.worst);
    }
    return out;
}

QuantumOptimum max_sequence_probability_quantum(const OutcomeSeq &q, int d, const QuantumSearchConfig &config,
                                                const LabelSeq &outputs) {
    return max_expression_quantum_seesaw(sequence_expression(q, outputs), d, config);
}

namespace {

CMatrix dephase(const CMatrix &m) { return CMatrix(m.diagonal().asDiagonal()); }

}  // namespace

QuantumSequenceModel WitnessModel::model() const {
    const int n = static_cast<int>(state.size());
    std::vector<CVector> computational;
    LabelSeq first;
    for (int k = 0; k < n; ++k) {
        computational.push_back(CVector::Unit(n, k));
        first.push_back(k == 0 ? "+1" : "-1");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(projector));
    std::vector<CVector> basis;
    LabelSeq second;
    for (int k = n; k-- > 0;) {
        basis.push_back(es.eigenvectors().col(k));
        second.push_back(es.eigenvalues()[k] > 0.5 ? "+1" : "-1");
    }
    return QuantumSequenceModel(QuantumState::pure(state), {{"a", von_neumann_instrument(computational, first)},
                                                            {"b", von_neumann_instrument(basis, second)}});
}

WitnessModel max_von_neumann_witness(int n, const OptimizerConfig &config) {
    if (n < 1) {
        throw StructuralError("witness model needs a positive dimension");
    }
    auto runs = run_restarts<WitnessModel>(config.restarts, config.seed, config.threads, [&](int, Rng &rng) {
        WitnessModel w;
        w.state = random_pure_vector(n, rng);
        for (int it = 0; it < config.max_iterations; ++it) {
            const CMatrix rho = w.state * w.state.adjoint();
            Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rho - dephase(rho)));
            CMatrix e = CMatrix::Zero(n, n);
            double value = 0.0;
            for (int k = 0; k < n; ++k) {
                if (es.eigenvalues()[k] > 0.0) {
                    e += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
                    value += es.eigenvalues()[k];
                }
            }
            const double gain = value - w.value;
            w.projector = e;
            w.value = value;
            w.state = top_eigenvector(e - dephase(e)).normalized();
            if (it > 0 && gain < config.tolerance) {
                break;
            }
        }
        const CMatrix rho = w.state * w.state.adjoint();
        w.value = (w.projector * (rho - dephase(rho))).trace().real();
        return w;
    });
    return *std::max_element(runs.begin(), runs.end(),
                             [](const WitnessModel &a, const WitnessModel &b) { return a.value < b.value; });
}

QuantumSequenceModel SpinLgiResult::model() const {
    const int n = two_j + 1;
    std::vector<CVector> basis;
    LabelSeq labels;
    for (int k = 0; k < n; ++k) {
        basis.push_back(CVector::Unit(n, k));
        labels.push_back(k == n - 1 ? "-1" : "+1");
    }
    return QuantumSequenceModel(QuantumState::pure(state), {{"1", von_neumann_instrument(basis, labels)}},
                                Channel::unitary(evolution_operator(spin_jx(two_j), angle)));
}

SpinLgiResult max_spin_lgi(int two_j, const OptimizerConfig &config) {
    if (two_j < 1) {
        throw StructuralError("spin must be at least 1/2");
    }
    const int n = two_j + 1;
    const auto expr = lgi3();
    const auto schedule = expr.setting_sequences();
    auto decode = [&](const double *x) {
        SpinLgiResult r;
        r.two_j = two_j;
        r.angle = x[0];
        r.state = CVector(n);
        for (int i = 0; i < n; ++i) {
            r.state[i] = cplx(x[1 + 2 * i], x[2 + 2 * i]);
        }
        if (!(r.state.norm() > 0.0)) {
            r.state = CVector::Unit(n, 0);
        }
        r.state.normalize();
        return r;
    };
    auto value_of = [&](const SpinLgiResult &r) {
        return evaluate(expr, behavior_from_model(r.model(), schedule, expr.scenario.outcome_values));
    };
    const int dim = 1 + 2 * n;
    const Objective f = numeric_gradient([&](const double *x) { return value_of(decode(x)); }, dim);
    auto runs = run_restarts<SpinLgiResult>(config.restarts, config.seed, config.threads, [&](int, Rng &rng) {
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
        std::vector<double> x0(static_cast<std::size_t>(dim));
        x0[0] = angle(rng);
        for (int i = 1; i < dim; ++i) {
            x0[static_cast<std::size_t>(i)] = normal(rng);
        }
        auto r = maximize_local(f, std::move(x0), config.max_iterations, config.tolerance);
        auto out = decode(r.x.data());
        out.value = value_of(out);
        return out;
    });
    return *std::max_element(runs.begin(), runs.end(),
                             [](const SpinLgiResult &a, const SpinLgiResult &b) { return a.value < b.value; });
}

}  // namespace tempocorr
