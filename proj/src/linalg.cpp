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

#include "tempocorr/linalg.hpp"

#include <cmath>
#include <sstream>

namespace tempocorr {

std::string ValidationReport::summary() const {
    if (violations.empty()) {
        return "valid";
    }
    std::ostringstream out;
    for (std::size_t k = 0; k < violations.size(); ++k) {
        const auto &v = violations[k];
        if (k > 0) {
            out << "; ";
        }
        out << v.invariant << " (magnitude " << v.magnitude << ")";
        if (!v.detail.empty()) {
            out << " " << v.detail;
        }
    }
    return out.str();
}

double max_abs(const CMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix &m) {
    return max_abs(m - m.adjoint());
}

CMatrix hermitian_part(const CMatrix &m) {
    return 0.5 * (m + m.adjoint());
}

double min_eigenvalue(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

CMatrix sqrt_psd(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    RVector evals = es.eigenvalues();
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        if (evals[k] < -kTolerance) {
            ValidationReport report;
            report.violations.push_back({"positive semidefinite", -evals[k], "in matrix square root"});
            throw InvariantError("sqrt_psd", report);
        }
        evals[k] = std::sqrt(std::max(evals[k], 0.0));
    }
    const CMatrix &v = es.eigenvectors();
    return v * evals.cast<cplx>().asDiagonal() * v.adjoint();
}

CMatrix evolution_operator(const CMatrix &hamiltonian, double time) {
    if (hermiticity_defect(hamiltonian) > kTolerance) {
        throw StructuralError("hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(hamiltonian));
    const RVector &evals = es.eigenvalues();
    CVector phases(evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        phases[k] = std::exp(cplx(0.0, -evals[k] * time));
    }
    const CMatrix &v = es.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

CMatrix outer(const CVector &v) {
    return v * v.adjoint();
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

namespace {

// J_+ in the basis m = j, j-1, ..., -j.
CMatrix spin_raise(int two_j) {
    const int n = two_j + 1;
    const double j = two_j / 2.0;
    CMatrix jp = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double m = j - k;  // |m> -> |m+1> at row k-1
        jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    return jp;
}

}  // namespace

CMatrix spin_jx(int two_j) {
    const CMatrix jp = spin_raise(two_j);
    return 0.5 * (jp + jp.adjoint());
}

CMatrix spin_jy(int two_j) {
    const CMatrix jp = spin_raise(two_j);
    return cplx(0, -0.5) * (jp - jp.adjoint());
}

CMatrix spin_jz(int two_j) {
    const int n = two_j + 1;
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        m(k, k) = two_j / 2.0 - k;
    }
    return m;
}

}  // namespace tempocorr
