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

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tempocorr/linalg.hpp"
#include "tempocorr/scenario.hpp"

namespace tempocorr {

/// Density operator on a finite-dimensional Hilbert space.
class QuantumState {
   public:
    /// Throws InvariantError unless rho is Hermitian, unit-trace and PSD within kTolerance.
    static QuantumState from_matrix(const CMatrix &rho);
    /// |psi><psi| after normalizing psi.
    static QuantumState pure(const CVector &psi);
    static QuantumState maximally_mixed(int dim);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const CMatrix &matrix() const { return rho_; }

   private:
    explicit QuantumState(CMatrix rho) : rho_(std::move(rho)) {}
    CMatrix rho_;
};

ValidationReport validate_state(const CMatrix &rho);

/// Checks positivity of each effect and completeness. Throws StructuralError when the
/// matrices are not square or differ in dimension.
ValidationReport validate_povm(std::span<const CMatrix> effects);

class Povm {
   public:
    /// Throws InvariantError for invalid effects.
    static Povm create(LabelSeq outcomes, std::vector<CMatrix> effects);

    int dim() const { return dim_; }
    const LabelSeq &outcomes() const { return outcomes_; }
    const std::vector<CMatrix> &effects() const { return effects_; }
    const CMatrix &effect(const Label &outcome) const;

   private:
    Povm() = default;
    int dim_ = 0;
    LabelSeq outcomes_;
    std::vector<CMatrix> effects_;
};

/// Completely positive map in Kraus form.
struct Channel {
    int dim = 0;
    std::vector<CMatrix> kraus;

    CMatrix apply(const CMatrix &rho) const;
    /// Heisenberg picture: sum_i K_i^dagger X K_i.
    CMatrix apply_adjoint(const CMatrix &x) const;
    /// ||sum_i K_i^dagger K_i - 1||_max.
    double trace_preservation_defect() const;

    static Channel identity(int dim);
    static Channel unitary(const CMatrix &u);
    /// rho -> (1 - lambda) rho + lambda 1/d.
    static Channel depolarizing(int dim, double lambda);
};

/// Measurement with state update: per outcome q a nonempty list of Kraus operators.
class Instrument {
   public:
    /// Throws InvariantError unless sum K^dagger K = 1 within kTolerance.
    static Instrument create(LabelSeq outcomes, std::vector<std::vector<CMatrix>> kraus);
    /// Single outcome kSkip with Kraus operator 1.
    static Instrument identity(int dim);

    int dim() const { return dim_; }
    const LabelSeq &outcomes() const { return outcomes_; }
    std::size_t outcome_index(const Label &outcome) const;
    const std::vector<CMatrix> &kraus(std::size_t outcome) const { return kraus_[outcome]; }
    const std::vector<std::vector<CMatrix>> &all_kraus() const { return kraus_; }
    /// Subnormalized post-measurement state for outcome index q.
    CMatrix apply(std::size_t outcome, const CMatrix &rho) const;

   private:
    Instrument() = default;
    int dim_ = 0;
    LabelSeq outcomes_;
    std::vector<std::vector<CMatrix>> kraus_;
};

/// Lueders instrument: K^q = sqrt(M_q).
Instrument luders_instrument(const Povm &povm);

/// Rank-one (von Neumann) update in the given orthonormal basis; `coarse_graining[k]`
/// is the outcome label of basis vector k. Outcomes keep first-appearance order.
Instrument von_neumann_instrument(std::span<const CVector> basis, const LabelSeq &coarse_graining);

struct PointerGridPoint {
    double x = 0.0;
    double weight = 1.0;
};

/// Discretized Gaussian-pointer measurement of `observable` with pointer width s.
/// Each eigenvalue's pointer distribution is renormalized over the grid, so the
/// effects sum to the identity.
Povm gaussian_pointer_povm(const CMatrix &observable, double s, std::span<const PointerGridPoint> grid);

/// M_q = sum_i K_i^q dagger K_i^q.
Povm instrument_povm(const Instrument &instrument);

/// Sum over outcomes of the instrument's CP maps.
Channel nonselective_channel(const Instrument &instrument);

struct NondisturbanceResult {
    bool nondisturbing = false;
    double max_deviation = 0.0;
};

/// Whether performing `first` and discarding its outcome leaves the statistics of
/// `later` unchanged for every initial state.
NondisturbanceResult is_nondisturbing(const Instrument &first, const Povm &later, double tol = kTolerance);

/// Initial state, one instrument per setting and an optional channel between steps.
class QuantumSequenceModel {
   public:
    /// When `declare_skip` is set, the setting kSkip is added (or must already be) the
    /// identity instrument with single outcome kSkip.
    QuantumSequenceModel(QuantumState initial, std::map<Label, Instrument> instruments,
                         std::optional<Channel> inter_step = std::nullopt, bool declare_skip = true);

    int dim() const { return initial_.dim(); }
    const QuantumState &initial() const { return initial_; }
    const std::map<Label, Instrument> &instruments() const { return instruments_; }
    const Instrument &instrument(const Label &setting) const;
    const std::optional<Channel> &inter_step() const { return inter_step_; }
    bool declares_skip() const { return declare_skip_; }
    LabelSeq settings() const;
    /// Scenario of the given length; outcome values are attached separately.
    Scenario scenario(std::size_t length, std::map<Label, double> outcome_values = {}) const;

   private:
    QuantumState initial_;
    std::map<Label, Instrument> instruments_;
    std::optional<Channel> inter_step_;
    bool declare_skip_ = true;
};

/// p(q|s) for every outcome word q, obtained by applying the instruments in order
/// with the inter-step channel between consecutive steps.
Distribution sequence_probability(const QuantumSequenceModel &model, const SettingSeq &settings);

/// Behavior table over the given schedule. Every sequence must have the same length.
Behavior behavior_from_model(const QuantumSequenceModel &model, std::span<const SettingSeq> schedule,
                             std::map<Label, double> outcome_values = {});

}  // namespace tempocorr
