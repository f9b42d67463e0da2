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

#include <complex>

#include <Eigen/Dense>

#include "tempocorr/errors.hpp"

namespace tempocorr {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Tolerance for Hermiticity, trace and positivity checks.
inline constexpr double kTolerance = 1e-9;

/// Largest absolute entry.
double max_abs(const CMatrix &m);

/// ||m - m^dagger||_max.
double hermiticity_defect(const CMatrix &m);

CMatrix hermitian_part(const CMatrix &m);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const CMatrix &m);

/// Principal square root of a Hermitian PSD matrix via its spectral decomposition.
/// Eigenvalues in [-kTolerance, 0) are clamped to zero; anything more negative throws.
CMatrix sqrt_psd(const CMatrix &m);

/// exp(-i H t) for Hermitian H.
CMatrix evolution_operator(const CMatrix &hamiltonian, double time);

/// Projector |v><v| (v need not be normalized; it is used as given).
CMatrix outer(const CVector &v);

/// Pauli matrices and spin-j angular momentum operators in the J_z basis
/// ordered m = j, j-1, ..., -j.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix spin_jx(int two_j);
CMatrix spin_jy(int two_j);
CMatrix spin_jz(int two_j);

}  // namespace tempocorr
