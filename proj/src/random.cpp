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

#include "tempocorr/random.hpp"

#include <numeric>

namespace tempocorr {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

CMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal;
    CMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = cplx(re, im);
        }
    }
    return g;
}

CMatrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    if (cols > rows) {
        throw StructuralError("isometry needs rows >= cols");
    }
    const CMatrix g = random_ginibre(rows, cols, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
    const CMatrix r = qr.matrixQR();
    for (Eigen::Index j = 0; j < cols; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) {
            q.col(j) *= d / std::abs(d);
        }
    }
    return q;
}

CMatrix random_unitary(int dim, Rng &rng) {
    return random_isometry(dim, dim, rng);
}

CVector random_pure_vector(int dim, Rng &rng) {
    CVector v = random_ginibre(dim, 1, rng).col(0);
    return v / v.norm();
}

QuantumState random_state(int dim, Rng &rng) {
    const CMatrix g = random_ginibre(dim, dim, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return QuantumState::from_matrix(hermitian_part(rho));
}

Instrument random_instrument(int dim, const LabelSeq &outcomes, int kraus_per_outcome, Rng &rng) {
    const auto count = static_cast<Eigen::Index>(outcomes.size()) * kraus_per_outcome;
    const CMatrix v = random_isometry(count * dim, dim, rng);
    std::vector<std::vector<CMatrix>> kraus(outcomes.size());
    Eigen::Index block = 0;
    for (auto &list : kraus) {
        for (int i = 0; i < kraus_per_outcome; ++i, ++block) {
            list.push_back(v.block(block * dim, 0, dim, dim));
        }
    }
    return Instrument::create(outcomes, std::move(kraus));
}

Instrument random_projective_instrument(int dim, const LabelSeq &outcomes, const std::vector<int> &ranks,
                                        Rng &rng) {
    if (ranks.size() != outcomes.size() || std::accumulate(ranks.begin(), ranks.end(), 0) != dim) {
        throw StructuralError("ranks must sum to the dimension");
    }
    const CMatrix u = random_unitary(dim, rng);
    std::vector<CVector> basis;
    LabelSeq coarse;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        for (int r = 0; r < ranks[k]; ++r) {
            basis.push_back(u.col(static_cast<Eigen::Index>(basis.size())));
            coarse.push_back(outcomes[k]);
        }
    }
    const Instrument vn = von_neumann_instrument(basis, coarse);
    std::vector<std::vector<CMatrix>> kraus;
    for (const auto &list : vn.all_kraus()) {
        CMatrix p = CMatrix::Zero(dim, dim);
        for (const auto &k : list) {
            p += k;
        }
        kraus.push_back({p});
    }
    return Instrument::create(vn.outcomes(), std::move(kraus));
}

}  // namespace tempocorr
