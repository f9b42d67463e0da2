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
#include <vector>

#include "tempocorr/errors.hpp"
#include "tempocorr/linalg.hpp"
#include "tempocorr/quantum.hpp"
#include "tempocorr/scenario.hpp"

namespace tempocorr {

/// Subnormalized post-measurement states sigma_{a|x}: members[x][a].
struct Assemblage {
    std::vector<Label> inputs;
    std::vector<LabelSeq> outcomes;
    std::vector<std::vector<CMatrix>> members;

    int dim() const;
    /// Shape problems raise StructuralError; numerical problems are reported.
    ValidationReport validate(double tol = 1e-9) const;

    /// sigma_{a|x} = I_{a|x}(rho) for one instrument per input.
    static Assemblage from_instruments(const QuantumState &rho, const std::vector<std::pair<Label, Instrument>> &instruments);
};

/// A response function: one outcome index per input.
using Response = std::vector<std::size_t>;

struct SteeringResult {
    bool steerable = false;
    /// Smallest weight r of the noise assemblage 1/(d |A_x|) to add for a hidden state model; <= 0 when none is
    /// needed.
    double robustness = 0.0;
    std::vector<Response> responses;
    /// Unnormalized hidden states, one per response function (empty when steerable).
    std::vector<CMatrix> hidden_states;
    /// max |sum_lambda D sigma_lambda - sigma_{a|x}| of the returned hidden state model.
    double residual = 0.0;
    /// Steering functional F[x][a]: sum Tr(F sigma) <= 0 for every hidden state model.
    std::vector<std::vector<CMatrix>> certificate;
    double certificate_value = 0.0;
};

/// Every response function, in lexicographic order. Throws SizeGuardError above 4096 functions.
std::vector<Response> response_functions(const Assemblage &a);

double evaluate_certificate(const std::vector<std::vector<CMatrix>> &f, const Assemblage &a);

/// Throws InvariantError for inconsistent assemblages and SolverError when the SDP does not converge.
SteeringResult steering_check(const Assemblage &a, double tol = 1e-7);

}  // namespace tempocorr
