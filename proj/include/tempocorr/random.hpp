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

#include <cstdint>
#include <random>

#include "tempocorr/quantum.hpp"

namespace tempocorr {

using Rng = std::mt19937_64;

/// Seed for restart `index` derived from a base seed; independent of scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

CMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng);
/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
CMatrix random_unitary(int dim, Rng &rng);
/// Isometry with `rows` >= `cols` and orthonormal columns.
CMatrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng &rng);
CVector random_pure_vector(int dim, Rng &rng);
/// Hilbert-Schmidt random mixed state.
QuantumState random_state(int dim, Rng &rng);
/// Random instrument with `kraus_per_outcome` Kraus operators for each label.
Instrument random_instrument(int dim, const LabelSeq &outcomes, int kraus_per_outcome, Rng &rng);
/// Random projective measurement; outcome k receives `ranks[k]` basis vectors of a random basis.
Instrument random_projective_instrument(int dim, const LabelSeq &outcomes, const std::vector<int> &ranks, Rng &rng);

}  // namespace tempocorr
