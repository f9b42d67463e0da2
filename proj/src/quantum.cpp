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

#include "tempocorr/quantum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace tempocorr {

namespace {

void require_square(const CMatrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw StructuralError(std::string(what) + " must be a nonempty square matrix");
    }
}

std::string label_for(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

}  // namespace

ValidationReport validate_state(const CMatrix &rho) {
    require_square(rho, "density matrix");
    ValidationReport report;
    if (double h = hermiticity_defect(rho); h > kTolerance) {
        report.violations.push_back({"Hermitian", h, ""});
    }
    if (double t = std::abs(rho.trace() - cplx(1.0)); t > kTolerance) {
        report.violations.push_back({"unit trace", t, ""});
    }
    if (double e = min_eigenvalue(rho); e < -kTolerance) {
        report.violations.push_back({"positive semidefinite", -e, ""});
    }
    return report;
}

QuantumState QuantumState::from_matrix(const CMatrix &rho) {
    auto report = validate_state(rho);
    if (!report.ok()) {
        throw InvariantError("invalid quantum state", report);
    }
    return QuantumState(hermitian_part(rho));
}

QuantumState QuantumState::pure(const CVector &psi) {
    const double norm = psi.norm();
    if (psi.size() == 0 || norm == 0.0) {
        throw StructuralError("pure state vector must be nonzero");
    }
    return QuantumState(outer(psi / norm));
}

QuantumState QuantumState::maximally_mixed(int dim) {
    if (dim <= 0) {
        throw StructuralError("dimension must be positive");
    }
    return QuantumState(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

ValidationReport validate_povm(std::span<const CMatrix> effects) {
    if (effects.empty()) {
        throw StructuralError("POVM needs at least one effect");
    }
    const auto dim = effects.front().rows();
    for (const auto &m : effects) {
        require_square(m, "POVM effect");
        if (m.rows() != dim) {
            throw StructuralError("POVM effects differ in dimension");
        }
    }
    ValidationReport report;
    CMatrix total = CMatrix::Zero(dim, dim);
    for (std::size_t q = 0; q < effects.size(); ++q) {
        const auto &m = effects[q];
        if (double h = hermiticity_defect(m); h > kTolerance) {
            report.violations.push_back({"Hermitian", h, "effect " + std::to_string(q)});
        }
        if (double e = min_eigenvalue(m); e < -kTolerance) {
            report.violations.push_back({"positive semidefinite", -e, "effect " + std::to_string(q)});
        }
        total += m;
    }
    if (double c = max_abs(total - CMatrix::Identity(dim, dim)); c > kTolerance) {
        report.violations.push_back({"completeness", c, ""});
    }
    return report;
}

Povm Povm::create(LabelSeq outcomes, std::vector<CMatrix> effects) {
    if (outcomes.size() != effects.size()) {
        throw StructuralError("POVM needs one label per effect");
    }
    auto report = validate_povm(effects);
    if (!report.ok()) {
        throw InvariantError("invalid POVM", report);
    }
    LabelSeq sorted = outcomes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw StructuralError("duplicate POVM outcome label");
    }
    Povm p;
    p.dim_ = static_cast<int>(effects.front().rows());
    p.outcomes_ = std::move(outcomes);
    p.effects_ = std::move(effects);
    return p;
}

const CMatrix &Povm::effect(const Label &outcome) const {
    auto it = std::find(outcomes_.begin(), outcomes_.end(), outcome);
    if (it == outcomes_.end()) {
        throw StructuralError("unknown POVM outcome '" + outcome + "'");
    }
    return effects_[static_cast<std::size_t>(it - outcomes_.begin())];
}

CMatrix Channel::apply(const CMatrix &rho) const {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        out.noalias() += k * rho * k.adjoint();
    }
    return out;
}

CMatrix Channel::apply_adjoint(const CMatrix &x) const {
    CMatrix out = CMatrix::Zero(x.rows(), x.cols());
    for (const auto &k : kraus) {
        out.noalias() += k.adjoint() * x * k;
    }
    return out;
}

double Channel::trace_preservation_defect() const {
    CMatrix total = CMatrix::Zero(dim, dim);
    for (const auto &k : kraus) {
        total.noalias() += k.adjoint() * k;
    }
    return max_abs(total - CMatrix::Identity(dim, dim));
}

Channel Channel::identity(int dim) {
    return Channel{dim, {CMatrix::Identity(dim, dim)}};
}

Channel Channel::unitary(const CMatrix &u) {
    require_square(u, "unitary");
    return Channel{static_cast<int>(u.rows()), {u}};
}

Channel Channel::depolarizing(int dim, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) {
        throw StructuralError("depolarizing strength must lie in [0, 1]");
    }
    // Kraus form: sqrt(1 - lambda) 1 plus sqrt(lambda / d) |i><j| for all i, j.
    Channel ch{dim, {}};
    ch.kraus.push_back(std::sqrt(1.0 - lambda) * CMatrix::Identity(dim, dim));
    const double w = std::sqrt(lambda / dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            CMatrix k = CMatrix::Zero(dim, dim);
            k(i, j) = w;
            ch.kraus.push_back(std::move(k));
        }
    }
    return ch;
}

Instrument Instrument::create(LabelSeq outcomes, std::vector<std::vector<CMatrix>> kraus) {
    if (outcomes.empty() || outcomes.size() != kraus.size()) {
        throw StructuralError("instrument needs one nonempty Kraus list per outcome");
    }
    const auto dim = kraus.front().empty() ? 0 : kraus.front().front().rows();
    CMatrix total = CMatrix::Zero(dim, dim);
    for (const auto &list : kraus) {
        if (list.empty()) {
            throw StructuralError("instrument outcome without Kraus operators");
        }
        for (const auto &k : list) {
            require_square(k, "Kraus operator");
            if (k.rows() != dim) {
                throw StructuralError("Kraus operators differ in dimension");
            }
            total.noalias() += k.adjoint() * k;
        }
    }
    LabelSeq sorted = outcomes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw StructuralError("duplicate instrument outcome label");
    }
    if (double c = max_abs(total - CMatrix::Identity(dim, dim)); c > kTolerance) {
        ValidationReport report;
        report.violations.push_back({"trace preservation", c, ""});
        throw InvariantError("invalid instrument", report);
    }
    Instrument instr;
    instr.dim_ = static_cast<int>(dim);
    instr.outcomes_ = std::move(outcomes);
    instr.kraus_ = std::move(kraus);
    return instr;
}

Instrument Instrument::identity(int dim) {
    return create({kSkip}, {{CMatrix::Identity(dim, dim)}});
}

std::size_t Instrument::outcome_index(const Label &outcome) const {
    auto it = std::find(outcomes_.begin(), outcomes_.end(), outcome);
    if (it == outcomes_.end()) {
        throw StructuralError("unknown instrument outcome '" + outcome + "'");
    }
    return static_cast<std::size_t>(it - outcomes_.begin());
}

CMatrix Instrument::apply(std::size_t outcome, const CMatrix &rho) const {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus_.at(outcome)) {
        out.noalias() += k * rho * k.adjoint();
    }
    return out;
}

Instrument luders_instrument(const Povm &povm) {
    std::vector<std::vector<CMatrix>> kraus;
    kraus.reserve(povm.effects().size());
    for (const auto &m : povm.effects()) {
        kraus.push_back({sqrt_psd(m)});
    }
    return Instrument::create(povm.outcomes(), std::move(kraus));
}

Instrument von_neumann_instrument(std::span<const CVector> basis, const LabelSeq &coarse_graining) {
    if (basis.empty() || coarse_graining.size() != basis.size()) {
        throw StructuralError("coarse-graining must assign an outcome to every basis vector");
    }
    const auto dim = basis.front().size();
    if (static_cast<std::size_t>(dim) != basis.size()) {
        throw StructuralError("basis must have as many vectors as the dimension");
    }
    for (std::size_t a = 0; a < basis.size(); ++a) {
        if (basis[a].size() != dim) {
            throw StructuralError("basis vectors differ in dimension");
        }
        for (std::size_t b = a; b < basis.size(); ++b) {
            const cplx overlap = basis[a].dot(basis[b]);
            const double expected = a == b ? 1.0 : 0.0;
            if (std::abs(overlap - expected) > kTolerance) {
                ValidationReport report;
                report.violations.push_back({"orthonormal basis", std::abs(overlap - expected),
                                             "vectors " + std::to_string(a) + ", " + std::to_string(b)});
                throw InvariantError("von Neumann instrument", report);
            }
        }
    }
    LabelSeq outcomes;
    std::vector<std::vector<CMatrix>> kraus;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        auto it = std::find(outcomes.begin(), outcomes.end(), coarse_graining[k]);
        std::size_t idx = static_cast<std::size_t>(it - outcomes.begin());
        if (it == outcomes.end()) {
            outcomes.push_back(coarse_graining[k]);
            kraus.emplace_back();
        }
        kraus[idx].push_back(outer(basis[k]));
    }
    return Instrument::create(std::move(outcomes), std::move(kraus));
}

Povm gaussian_pointer_povm(const CMatrix &observable, double s, std::span<const PointerGridPoint> grid) {
    require_square(observable, "observable");
    if (!(s > 0.0)) {
        throw StructuralError("pointer width s must be positive");
    }
    if (grid.empty()) {
        throw StructuralError("pointer grid is empty");
    }
    for (const auto &g : grid) {
        if (!(g.weight > 0.0)) {
            throw StructuralError("pointer grid weights must be positive");
        }
    }
    if (hermiticity_defect(observable) > kTolerance) {
        throw StructuralError("observable is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(observable));
    const auto n = observable.rows();
    const auto m = static_cast<Eigen::Index>(grid.size());
    // K_x^dagger K_x = (2 pi s^2)^(-1/2) exp(-(x - Q)^2 / 2 s^2); the prefactor cancels in the
    // per-eigenvalue normalization, so work with log-weights and subtract the maximum.
    RMatrix weight(m, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lambda = es.eigenvalues()[k];
        double top = -std::numeric_limits<double>::infinity();
        for (Eigen::Index x = 0; x < m; ++x) {
            const auto &g = grid[static_cast<std::size_t>(x)];
            const double d = g.x - lambda;
            weight(x, k) = std::log(g.weight) - d * d / (2.0 * s * s);
            top = std::max(top, weight(x, k));
        }
        double total = 0.0;
        for (Eigen::Index x = 0; x < m; ++x) {
            weight(x, k) = std::exp(weight(x, k) - top);
            total += weight(x, k);
        }
        weight.col(k) /= total;
    }
    const CMatrix &v = es.eigenvectors();
    LabelSeq outcomes;
    std::vector<CMatrix> effects;
    for (Eigen::Index x = 0; x < m; ++x) {
        outcomes.push_back(label_for(grid[static_cast<std::size_t>(x)].x));
        effects.push_back(v * weight.row(x).transpose().cast<cplx>().asDiagonal() * v.adjoint());
    }
    return Povm::create(std::move(outcomes), std::move(effects));
}

Povm instrument_povm(const Instrument &instrument) {
    std::vector<CMatrix> effects;
    for (const auto &list : instrument.all_kraus()) {
        CMatrix m = CMatrix::Zero(instrument.dim(), instrument.dim());
        for (const auto &k : list) {
            m.noalias() += k.adjoint() * k;
        }
        effects.push_back(hermitian_part(m));
    }
    return Povm::create(instrument.outcomes(), std::move(effects));
}

Channel nonselective_channel(const Instrument &instrument) {
    Channel ch{instrument.dim(), {}};
    for (const auto &list : instrument.all_kraus()) {
        ch.kraus.insert(ch.kraus.end(), list.begin(), list.end());
    }
    return ch;
}

NondisturbanceResult is_nondisturbing(const Instrument &first, const Povm &later, double tol) {
    if (first.dim() != later.dim()) {
        throw StructuralError("instrument and POVM dimensions differ");
    }
    const Channel ch = nonselective_channel(first);
    NondisturbanceResult result;
    for (const auto &m : later.effects()) {
        result.max_deviation = std::max(result.max_deviation, max_abs(ch.apply_adjoint(m) - m));
    }
    result.nondisturbing = result.max_deviation <= tol;
    return result;
}

QuantumSequenceModel::QuantumSequenceModel(QuantumState initial, std::map<Label, Instrument> instruments,
                                           std::optional<Channel> inter_step, bool declare_skip)
    : initial_(std::move(initial)),
      instruments_(std::move(instruments)),
      inter_step_(std::move(inter_step)),
      declare_skip_(declare_skip) {
    const int d = initial_.dim();
    for (const auto &[label, instr] : instruments_) {
        if (instr.dim() != d) {
            throw StructuralError("instrument for setting '" + label + "' has wrong dimension");
        }
    }
    if (inter_step_) {
        if (inter_step_->dim != d) {
            throw StructuralError("inter-step channel has wrong dimension");
        }
        for (const auto &k : inter_step_->kraus) {
            if (k.rows() != d || k.cols() != d) {
                throw StructuralError("inter-step Kraus operator has wrong shape");
            }
        }
        if (double c = inter_step_->trace_preservation_defect(); c > kTolerance) {
            ValidationReport report;
            report.violations.push_back({"trace preservation", c, "inter-step channel"});
            throw InvariantError("invalid channel", report);
        }
    }
    if (declare_skip_) {
        auto it = instruments_.find(kSkip);
        if (it == instruments_.end()) {
            instruments_.emplace(kSkip, Instrument::identity(d));
        } else {
            const auto &instr = it->second;
            const bool is_identity = instr.outcomes() == LabelSeq{kSkip} &&
                                     nonselective_channel(instr).apply(CMatrix::Identity(d, d)).isApprox(
                                         CMatrix::Identity(d, d)) &&
                                     instr.kraus(0).size() == 1 &&
                                     max_abs(instr.kraus(0).front() - CMatrix::Identity(d, d)) <= kTolerance;
            if (!is_identity) {
                throw StructuralError("setting 0 must be the identity instrument with single outcome 0");
            }
        }
    }
}

const Instrument &QuantumSequenceModel::instrument(const Label &setting) const {
    auto it = instruments_.find(setting);
    if (it == instruments_.end()) {
        throw StructuralError("unknown setting '" + setting + "'");
    }
    return it->second;
}

LabelSeq QuantumSequenceModel::settings() const {
    LabelSeq out;
    for (const auto &[label, instr] : instruments_) {
        out.push_back(label);
    }
    return out;
}

Scenario QuantumSequenceModel::scenario(std::size_t length, std::map<Label, double> outcome_values) const {
    Scenario sc;
    sc.length = length;
    sc.settings = settings();
    for (const auto &[label, instr] : instruments_) {
        sc.outcomes[label] = instr.outcomes();
    }
    sc.no_measurement = declare_skip_ ? std::optional<Label>(kSkip) : std::nullopt;
    sc.outcome_values = std::move(outcome_values);
    return sc;
}

namespace {

void branch(const QuantumSequenceModel &model, const SettingSeq &settings, std::size_t step, const CMatrix &rho,
            OutcomeSeq &word, Distribution &out) {
    if (step == settings.size()) {
        out[word] = std::max(0.0, rho.trace().real());
        return;
    }
    const Instrument &instr = model.instrument(settings[step]);
    for (std::size_t q = 0; q < instr.outcomes().size(); ++q) {
        CMatrix next = instr.apply(q, rho);
        if (step + 1 < settings.size() && model.inter_step()) {
            next = model.inter_step()->apply(next);
        }
        word.push_back(instr.outcomes()[q]);
        branch(model, settings, step + 1, next, word, out);
        word.pop_back();
    }
}

}  // namespace

Distribution sequence_probability(const QuantumSequenceModel &model, const SettingSeq &settings) {
    Distribution out;
    OutcomeSeq word;
    branch(model, settings, 0, model.initial().matrix(), word, out);
    return out;
}

Behavior behavior_from_model(const QuantumSequenceModel &model, std::span<const SettingSeq> schedule,
                             std::map<Label, double> outcome_values) {
    const std::size_t length = schedule.empty() ? 0 : schedule.front().size();
    for (const auto &s : schedule) {
        if (s.size() != length) {
            throw StructuralError("schedule sequences have inconsistent lengths");
        }
    }
    Behavior b{model.scenario(length, std::move(outcome_values)), {}};
    for (const auto &s : schedule) {
        b.table[s] = sequence_probability(model, s);
    }
    return b;
}

}  // namespace tempocorr
