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

#include "tempocorr/steering.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "tempocorr/conic.hpp"

namespace tempocorr {

namespace {

constexpr std::size_t kMaxResponses = 4096;

// Hermitian part of the 2d x 2d real block X as a complex d x d matrix.
CMatrix decode(const RMatrix &x, int d) {
    const RMatrix re = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
    const RMatrix im = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
    CMatrix out(d, d);
    out.real() = re;
    out.imag() = im;
    return hermitian_part(out);
}

CMatrix psd_projection(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    const RVector ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct Constraint {
    std::size_t input = 0;
    std::size_t outcome = 0;
    int row = 0;
    int col = 0;
    bool imaginary = false;
};

}  // namespace

int Assemblage::dim() const {
    for (const auto &row : members) {
        if (!row.empty()) {
            return static_cast<int>(row.front().rows());
        }
    }
    return 0;
}

ValidationReport Assemblage::validate(double tol) const {
    if (inputs.empty() || inputs.size() != outcomes.size() || inputs.size() != members.size()) {
        throw StructuralError("assemblage needs matching nonempty inputs, outcomes and members");
    }
    const int d = dim();
    if (d <= 0) {
        throw StructuralError("assemblage has no members");
    }
    for (std::size_t x = 0; x < inputs.size(); ++x) {
        if (outcomes[x].empty() || outcomes[x].size() != members[x].size()) {
            throw StructuralError("input " + inputs[x] + " needs one member per outcome");
        }
        for (const auto &m : members[x]) {
            if (m.rows() != d || m.cols() != d) {
                throw StructuralError("assemblage members must be square of equal dimension");
            }
        }
    }
    ValidationReport report;
    CMatrix reference;
    for (std::size_t x = 0; x < inputs.size(); ++x) {
        CMatrix total = CMatrix::Zero(d, d);
        for (std::size_t a = 0; a < members[x].size(); ++a) {
            const auto &m = members[x][a];
            const std::string where = "sigma(" + outcomes[x][a] + "|" + inputs[x] + ")";
            if (const double h = hermiticity_defect(m); h > tol) {
                report.violations.push_back({"Hermitian", h, where});
            }
            if (const double e = min_eigenvalue(m); e < -tol) {
                report.violations.push_back({"positive semidefinite", -e, where});
            }
            total += m;
        }
        if (const double t = std::abs(total.trace() - 1.0); t > tol) {
            report.violations.push_back({"normalization", t, "input " + inputs[x]});
        }
        if (x == 0) {
            reference = total;
        } else if (const double c = max_abs(total - reference); c > tol) {
            report.violations.push_back({"nonselective consistency", c, "input " + inputs[x]});
        }
    }
    return report;
}

Assemblage Assemblage::from_instruments(const QuantumState &rho,
                                        const std::vector<std::pair<Label, Instrument>> &instruments) {
    Assemblage a;
    for (const auto &[x, inst] : instruments) {
        if (inst.dim() != rho.dim()) {
            throw StructuralError("instrument " + x + " does not match the state dimension");
        }
        a.inputs.push_back(x);
        a.outcomes.push_back(inst.outcomes());
        std::vector<CMatrix> row;
        for (std::size_t q = 0; q < inst.outcomes().size(); ++q) {
            row.push_back(inst.apply(q, rho.matrix()));
        }
        a.members.push_back(std::move(row));
    }
    return a;
}

std::vector<Response> response_functions(const Assemblage &a) {
    std::size_t count = 1;
    for (const auto &o : a.outcomes) {
        count *= o.size();
        if (count > kMaxResponses) {
            throw SizeGuardError("more than " + std::to_string(kMaxResponses) + " response functions");
        }
    }
    std::vector<Response> out;
    Response r(a.outcomes.size(), 0);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(r);
        for (std::size_t x = r.size(); x-- > 0;) {
            if (++r[x] < a.outcomes[x].size()) {
                break;
            }
            r[x] = 0;
        }
    }
    return out;
}

double evaluate_certificate(const std::vector<std::vector<CMatrix>> &f, const Assemblage &a) {
    double total = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) {
        for (std::size_t q = 0; q < f[x].size(); ++q) {
            total += (f[x][q] * a.members.at(x).at(q)).trace().real();
        }
    }
    return total;
}

SteeringResult steering_check(const Assemblage &a, double tol) {
    if (auto report = a.validate(); !report.ok()) {
        throw InvariantError("inconsistent assemblage", std::move(report));
    }
    const int d = a.dim();
    const auto responses = response_functions(a);
    const int nl = static_cast<int>(responses.size());

    // Variables: one 2d x 2d block per response function and t = r + 1 >= 0 (the trace of the constraints for
    // one input gives 1 + r = sum_l Tr sigma_l).
    conic::Problem p;
    for (int l = 0; l < nl; ++l) {
        p.blocks.push_back({conic::BlockKind::psd, 2 * d});
    }
    p.blocks.push_back({conic::BlockKind::diagonal, 1});
    const int rb = nl;
    p.c = {{rb, 0, 0, 1.0}};

    // The last outcome of every input but the first follows from normalization and consistency.
    std::vector<Constraint> rows;
    for (std::size_t x = 0; x < a.inputs.size(); ++x) {
        const std::size_t na = a.outcomes[x].size() - (x == 0 ? 0 : 1);
        for (std::size_t q = 0; q < na; ++q) {
            for (int i = 0; i < d; ++i) {
                for (int j = i; j < d; ++j) {
                    rows.push_back({x, q, i, j, false});
                    if (i != j) {
                        rows.push_back({x, q, i, j, true});
                    }
                }
            }
        }
    }
    for (const auto &c : rows) {
        conic::SparseSymmetric row;
        for (int l = 0; l < nl; ++l) {
            if (responses[static_cast<std::size_t>(l)][c.input] != c.outcome) {
                continue;
            }
            const int i = c.row;
            const int j = c.col;
            if (!c.imaginary && i == j) {
                row.push_back({l, i, i, 0.5});
                row.push_back({l, d + i, d + i, 0.5});
            } else if (!c.imaginary) {
                row.push_back({l, i, j, 0.25});
                row.push_back({l, d + i, d + j, 0.25});
            } else {
                row.push_back({l, j, d + i, 0.25});
                row.push_back({l, i, d + j, -0.25});
            }
        }
        double target = c.imaginary ? a.members[c.input][c.outcome](c.row, c.col).imag()
                                    : a.members[c.input][c.outcome](c.row, c.col).real();
        if (!c.imaginary && c.row == c.col) {
            const double noise = 1.0 / (d * static_cast<double>(a.outcomes[c.input].size()));
            row.push_back({rb, 0, 0, -noise});
            target -= noise;
        }
        p.a.push_back(std::move(row));
        p.b.push_back(target);
    }

    conic::Settings settings;
    settings.tolerance = 1e-9;
    const auto sol = conic::solve(p, settings);
    if (!sol.converged()) {
        throw SolverError("steering SDP: " + sol.diagnostic());
    }

    SteeringResult out;
    out.responses = responses;
    out.robustness = sol.dual_objective - 1.0;
    out.steerable = out.robustness > tol;

    out.certificate.resize(a.inputs.size());
    for (std::size_t x = 0; x < a.inputs.size(); ++x) {
        out.certificate[x].assign(a.outcomes[x].size(), CMatrix::Zero(d, d));
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto &c = rows[k];
        auto &f = out.certificate[c.input][c.outcome];
        const double y = sol.y[static_cast<Eigen::Index>(k)];
        if (c.row == c.col) {
            f(c.row, c.row) += y;
        } else if (c.imaginary) {
            f(c.row, c.col) += cplx(0.0, 0.5 * y);
            f(c.col, c.row) -= cplx(0.0, 0.5 * y);
        } else {
            f(c.row, c.col) += 0.5 * y;
            f(c.col, c.row) += 0.5 * y;
        }
    }
    out.certificate_value = evaluate_certificate(out.certificate, a);
    if (out.steerable) {
        return out;
    }

    // sigma = sum D sigma_l - r N, and N itself is the uniform mixture over response functions of 1/(d n_l).
    const double r = sol.x[static_cast<std::size_t>(rb)](0, 0) - 1.0;
    for (int l = 0; l < nl; ++l) {
        const CMatrix s = decode(sol.x[static_cast<std::size_t>(l)], d) -
                          (r / (d * static_cast<double>(nl))) * CMatrix::Identity(d, d);
        out.hidden_states.push_back(psd_projection(s));
    }
    for (std::size_t x = 0; x < a.inputs.size(); ++x) {
        for (std::size_t q = 0; q < a.outcomes[x].size(); ++q) {
            CMatrix model = CMatrix::Zero(d, d);
            for (int l = 0; l < nl; ++l) {
                if (responses[static_cast<std::size_t>(l)][x] == q) {
                    model += out.hidden_states[static_cast<std::size_t>(l)];
                }
            }
            out.residual = std::max(out.residual, max_abs(model - a.members[x][q]));
        }
    }
    return out;
}

}  // namespace tempocorr
