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

#include <cmath>

#include "tempocorr/quantum.hpp"

namespace tempocorr::test {

inline Instrument sigma_z_instrument(const Label &plus = "+1", const Label &minus = "-1") {
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    return Instrument::create({plus, minus}, {{p}, {CMatrix::Identity(2, 2) - p}});
}

inline Instrument sigma_x_instrument(const Label &plus = "+", const Label &minus = "-") {
    CMatrix p = CMatrix::Constant(2, 2, 0.5);
    return Instrument::create({plus, minus}, {{p}, {CMatrix::Identity(2, 2) - p}});
}

// Qubit starting at |0>, rotated by `angle` about y between steps, sigma_z measured under setting 1.
inline QuantumSequenceModel rotating_qubit_model(double angle) {
    CMatrix u(2, 2);
    u << std::cos(angle / 2), -std::sin(angle / 2), std::sin(angle / 2), std::cos(angle / 2);
    return QuantumSequenceModel(QuantumState::pure(CVector::Unit(2, 0)), {{"1", sigma_z_instrument()}},
                                Channel::unitary(u));
}

// Equal superposition of the sigma_z eigenstates; sigma_z (or nothing) followed by sigma_x.
inline QuantumSequenceModel fig2_model() {
    CVector psi = CVector::Ones(2) / std::sqrt(2.0);
    return QuantumSequenceModel(QuantumState::pure(psi),
                                {{"z", sigma_z_instrument("+", "-")}, {"x", sigma_x_instrument()}});
}

}  // namespace tempocorr::test
