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

#include "tempocorr/conic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Sparse>
#include <fmt/format.h>

namespace tempocorr::conic {

namespace {

struct Term {
    int constraint;
    int row;
    int col;
    double value;
};

// Constraint data regrouped by block, with off-diagonal PSD entries stored in both triangles.
struct Compiled {
    std::vector<std::vector<std::vector<Term>>> by_block;  // [block][constraint slot] -> terms
    std::vector<std::vector<int>> constraints_in_block;    // [block] -> constraint ids
    std::vector<Eigen::SparseMatrix<double>> diagonal_ops;  // [block] m x size, for diagonal blocks
};

Compiled compile(const Problem &p) {
    Compiled out;
    const auto nb = p.blocks.size();
    out.by_block.resize(nb);
    out.constraints_in_block.resize(nb);
    out.diagonal_ops.resize(nb);
    std::vector<std::vector<Eigen::Triplet<double>>> triplets(nb);
    for (int i = 0; i < p.num_constraints(); ++i) {
        std::vector<std::vector<Term>> per_block(nb);
        for (const auto &e : p.a[static_cast<std::size_t>(i)]) {
            const auto k = static_cast<std::size_t>(e.block);
            if (p.blocks[k].kind == BlockKind::diagonal) {
                triplets[k].emplace_back(i, e.row, e.value);
                continue;
            }
            per_block[k].push_back({i, e.row, e.col, e.value});
            if (e.row != e.col) {
                per_block[k].push_back({i, e.col, e.row, e.value});
            }
        }
        for (std::size_t k = 0; k < nb; ++k) {
            if (!per_block[k].empty()) {
                out.constraints_in_block[k].push_back(i);
                out.by_block[k].push_back(std::move(per_block[k]));
            }
        }
    }
    for (std::size_t k = 0; k < nb; ++k) {
        if (p.blocks[k].kind == BlockKind::diagonal) {
            out.diagonal_ops[k].resize(p.num_constraints(), p.blocks[k].size);
            out.diagonal_ops[k].setFromTriplets(triplets[k].begin(), triplets[k].end());
        }
    }
    return out;
}

BlockMatrix zeros(const Problem &p) {
    BlockMatrix m;
    for (const auto &b : p.blocks) {
        m.push_back(b.kind == BlockKind::psd ? RMatrix::Zero(b.size, b.size) : RMatrix::Zero(b.size, 1));
    }
    return m;
}

BlockMatrix scaled_identity(const Problem &p, double s) {
    BlockMatrix m;
    for (const auto &b : p.blocks) {
        m.push_back(b.kind == BlockKind::psd ? RMatrix(s * RMatrix::Identity(b.size, b.size))
                                             : RMatrix(RMatrix::Constant(b.size, 1, s)));
    }
    return m;
}

void add_entries(const SparseSymmetric &entries, double scale, BlockMatrix &m, const Problem &p) {
    for (const auto &e : entries) {
        auto &blk = m[static_cast<std::size_t>(e.block)];
        if (p.blocks[static_cast<std::size_t>(e.block)].kind == BlockKind::diagonal) {
            blk(e.row, 0) += scale * e.value;
        } else {
            blk(e.row, e.col) += scale * e.value;
            if (e.row != e.col) {
                blk(e.col, e.row) += scale * e.value;
            }
        }
    }
}

double inner(const BlockMatrix &a, const BlockMatrix &b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k].cwiseProduct(b[k]).sum();
    }
    return s;
}

double frobenius(const BlockMatrix &a) {
    return std::sqrt(inner(a, a));
}

double entry_norm(const SparseSymmetric &entries) {
    double s = 0.0;
    for (const auto &e : entries) {
        s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    return std::sqrt(s);
}

// A(X) for symmetric X.
RVector apply_constraints(const Problem &p, const BlockMatrix &x) {
    RVector out = RVector::Zero(p.num_constraints());
    for (int i = 0; i < p.num_constraints(); ++i) {
        double s = 0.0;
        for (const auto &e : p.a[static_cast<std::size_t>(i)]) {
            const auto &blk = x[static_cast<std::size_t>(e.block)];
            if (p.blocks[static_cast<std::size_t>(e.block)].kind == BlockKind::diagonal) {
                s += e.value * blk(e.row, 0);
            } else {
                s += (e.row == e.col ? 1.0 : 2.0) * e.value * blk(e.row, e.col);
            }
        }
        out[i] = s;
    }
    return out;
}

RMatrix sym(const RMatrix &m) {
    return 0.5 * (m + m.transpose());
}

// Symmetrized X * D * H per block (elementwise on diagonal blocks).
BlockMatrix sandwich(const Problem &p, const BlockMatrix &x, const BlockMatrix &d, const BlockMatrix &h) {
    BlockMatrix out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (p.blocks[k].kind == BlockKind::diagonal) {
            out[k] = x[k].cwiseProduct(d[k]).cwiseProduct(h[k]);
        } else {
            out[k] = sym(x[k] * d[k] * h[k]);
        }
    }
    return out;
}

// Largest alpha with m + alpha * dm in the cone, or +inf.
double max_step(const Problem &p, const BlockMatrix &m, const BlockMatrix &dm) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (p.blocks[k].kind == BlockKind::diagonal) {
            for (Eigen::Index r = 0; r < m[k].rows(); ++r) {
                if (dm[k](r, 0) < 0.0) {
                    alpha = std::min(alpha, -m[k](r, 0) / dm[k](r, 0));
                }
            }
            continue;
        }
        Eigen::LLT<RMatrix> llt(m[k]);
        if (llt.info() != Eigen::Success) {
            return 0.0;
        }
        RMatrix s = llt.matrixL().solve(dm[k]);
        s = llt.matrixL().solve(s.transpose()).transpose();
        Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(s), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo < 0.0) {
            alpha = std::min(alpha, -1.0 / lo);
        }
    }
    return alpha;
}

struct Direction {
    BlockMatrix dx;
    RVector dy;
    BlockMatrix dz;
};

}  // namespace

void Problem::validate() const {
    if (b.size() != a.size()) {
        throw StructuralError("conic problem: one right-hand side per constraint required");
    }
    auto check = [this](const SparseSymmetric &entries) {
        for (const auto &e : entries) {
            if (e.block < 0 || e.block >= static_cast<int>(blocks.size())) {
                throw StructuralError("conic problem: block index out of range");
            }
            const auto &blk = blocks[static_cast<std::size_t>(e.block)];
            if (e.row < 0 || e.col < e.row || e.col >= blk.size) {
                throw StructuralError("conic problem: entry outside the upper triangle of its block");
            }
            if (blk.kind == BlockKind::diagonal && e.row != e.col) {
                throw StructuralError("conic problem: off-diagonal entry in a diagonal block");
            }
        }
    };
    for (const auto &blk : blocks) {
        if (blk.size <= 0) {
            throw StructuralError("conic problem: block sizes must be positive");
        }
    }
    check(c);
    for (const auto &ai : a) {
        check(ai);
    }
}

std::string Solution::diagnostic() const {
    const char *name = status == Status::optimal          ? "optimal"
                       : status == Status::near_optimal   ? "near optimal"
                       : status == Status::max_iterations ? "iteration limit"
                                                          : "numerical failure";
    return fmt::format("{} after {} iterations: primal {:.3e}, dual {:.3e}, gap {:.3e}", name, iterations,
                       primal_infeasibility, dual_infeasibility, relative_gap);
}

BlockMatrix adjoint_map(const Problem &problem, const RVector &y) {
    BlockMatrix out = zeros(problem);
    for (int i = 0; i < problem.num_constraints(); ++i) {
        if (y[i] != 0.0) {
            add_entries(problem.a[static_cast<std::size_t>(i)], y[i], out, problem);
        }
    }
    return out;
}

BlockMatrix dense_objective(const Problem &problem) {
    BlockMatrix out = zeros(problem);
    add_entries(problem.c, 1.0, out, problem);
    return out;
}

Solution solve(const Problem &problem, const Settings &settings) {
    problem.validate();
    const Compiled data = compile(problem);
    const int m = problem.num_constraints();
    const RVector b = Eigen::Map<const RVector>(problem.b.data(), m);
    const BlockMatrix c = dense_objective(problem);

    double n_total = 0.0;
    for (const auto &blk : problem.blocks) {
        n_total += blk.size;
    }
    const double sqrt_n = std::sqrt(n_total);
    double xi = std::max(10.0, sqrt_n);
    double eta = std::max({10.0, sqrt_n, frobenius(c)});
    for (int i = 0; i < m; ++i) {
        const double na = entry_norm(problem.a[static_cast<std::size_t>(i)]);
        xi = std::max(xi, sqrt_n * (1.0 + std::abs(b[i])) / (1.0 + na));
        eta = std::max(eta, na);
    }

    Solution sol;
    sol.x = scaled_identity(problem, xi);
    sol.z = scaled_identity(problem, eta);
    sol.y = RVector::Zero(m);
    const double b_norm = b.norm();
    const double c_norm = frobenius(c);

    for (int iter = 0;; ++iter) {
        sol.iterations = iter;
        const RVector rp = b - apply_constraints(problem, sol.x);
        BlockMatrix rd = adjoint_map(problem, sol.y);
        for (std::size_t k = 0; k < rd.size(); ++k) {
            rd[k] = c[k] - sol.z[k] - rd[k];
        }
        const double complementarity = inner(sol.x, sol.z);
        sol.primal_objective = inner(c, sol.x);
        sol.dual_objective = b.dot(sol.y);
        sol.primal_infeasibility = rp.norm() / (1.0 + b_norm);
        sol.dual_infeasibility = frobenius(rd) / (1.0 + c_norm);
        const double scale = 1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective);
        sol.relative_gap =
            std::max(std::abs(sol.primal_objective - sol.dual_objective), std::abs(complementarity)) / scale;
        if (sol.primal_infeasibility <= settings.tolerance && sol.dual_infeasibility <= settings.tolerance &&
            sol.relative_gap <= settings.tolerance) {
            sol.status = Status::optimal;
            return sol;
        }
        auto stalled = [&] {
            const double worst = std::max({sol.primal_infeasibility, sol.dual_infeasibility, sol.relative_gap});
            return worst <= settings.acceptable_tolerance ? Status::near_optimal : Status::numerical_failure;
        };
        if (iter >= settings.max_iterations) {
            sol.status = stalled() == Status::near_optimal ? Status::near_optimal : Status::max_iterations;
            return sol;
        }
        const double mu = complementarity / n_total;

        BlockMatrix h(sol.z.size());
        for (std::size_t k = 0; k < sol.z.size(); ++k) {
            if (problem.blocks[k].kind == BlockKind::diagonal) {
                h[k] = sol.z[k].cwiseInverse();
                continue;
            }
            Eigen::LLT<RMatrix> llt(sol.z[k]);
            if (llt.info() != Eigen::Success) {
                sol.status = stalled();
                return sol;
            }
            h[k] = sym(llt.solve(RMatrix::Identity(sol.z[k].rows(), sol.z[k].cols())));
        }

        // Schur complement M_ij = A_i . sym(X A_j Z^-1).
        RMatrix schur = RMatrix::Zero(m, m);
        for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
            if (problem.blocks[k].kind == BlockKind::diagonal) {
                const auto &op = data.diagonal_ops[k];
                const RVector w = sol.x[k].col(0).cwiseProduct(h[k].col(0));
                const Eigen::SparseMatrix<double> scaled = op * w.asDiagonal();
                schur += RMatrix(scaled * op.transpose());
                continue;
            }
            const auto &x = sol.x[k];
            const auto &hk = h[k];
            const auto &ids = data.constraints_in_block[k];
            const auto &terms = data.by_block[k];
            for (std::size_t s = 0; s < ids.size(); ++s) {
                for (std::size_t t = s; t < ids.size(); ++t) {
                    double v = 0.0;
                    for (const auto &ti : terms[s]) {
                        for (const auto &tj : terms[t]) {
                            v += ti.value * tj.value * x(ti.col, tj.row) * hk(tj.col, ti.row);
                        }
                    }
                    schur(ids[s], ids[t]) += v;
                    if (t != s) {
                        schur(ids[t], ids[s]) += v;
                    }
                }
            }
        }
        Eigen::LDLT<RMatrix> factor(schur);
        if (factor.info() != Eigen::Success) {
            sol.status = stalled();
            return sol;
        }

        const BlockMatrix x_rd_h = sandwich(problem, sol.x, rd, h);
        auto direction = [&](const BlockMatrix &rc) {
            Direction d;
            BlockMatrix t(rc.size());
            for (std::size_t k = 0; k < rc.size(); ++k) {
                t[k] = rc[k] - x_rd_h[k];
            }
            d.dy = factor.solve(rp - apply_constraints(problem, t));
            d.dz = adjoint_map(problem, d.dy);
            for (std::size_t k = 0; k < rd.size(); ++k) {
                d.dz[k] = rd[k] - d.dz[k];
            }
            const BlockMatrix x_dz_h = sandwich(problem, sol.x, d.dz, h);
            d.dx.resize(rc.size());
            for (std::size_t k = 0; k < rc.size(); ++k) {
                d.dx[k] = rc[k] - x_dz_h[k];
            }
            return d;
        };

        BlockMatrix rc(sol.x.size());
        for (std::size_t k = 0; k < rc.size(); ++k) {
            rc[k] = -sol.x[k];
        }
        const Direction pred = direction(rc);
        const double ap = std::min(1.0, max_step(problem, sol.x, pred.dx));
        const double ad = std::min(1.0, max_step(problem, sol.z, pred.dz));
        BlockMatrix xa = sol.x;
        BlockMatrix za = sol.z;
        for (std::size_t k = 0; k < xa.size(); ++k) {
            xa[k] += ap * pred.dx[k];
            za[k] += ad * pred.dz[k];
        }
        const double mu_aff = inner(xa, za) / n_total;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        const BlockMatrix cross = sandwich(problem, pred.dx, pred.dz, h);
        for (std::size_t k = 0; k < rc.size(); ++k) {
            rc[k] = sigma * mu * h[k] - sol.x[k] - cross[k];
        }
        const Direction corr = direction(rc);
        const double gamma = settings.step_fraction;
        const double step_p = std::min(1.0, gamma * max_step(problem, sol.x, corr.dx));
        const double step_d = std::min(1.0, gamma * max_step(problem, sol.z, corr.dz));
        if (!(step_p > 0.0) || !(step_d > 0.0) || !corr.dy.allFinite()) {
            sol.status = stalled();
            return sol;
        }
        for (std::size_t k = 0; k < sol.x.size(); ++k) {
            sol.x[k] += step_p * corr.dx[k];
            sol.z[k] += step_d * corr.dz[k];
            if (problem.blocks[k].kind == BlockKind::psd) {
                sol.x[k] = sym(sol.x[k]);
                sol.z[k] = sym(sol.z[k]);
            }
        }
        sol.y += step_d * corr.dy;
    }
}

void write_sdpa(std::ostream &out, const Problem &problem, const std::string &comment) {
    problem.validate();
    out << "\"" << comment << "\n";
    out << problem.num_constraints() << "\n" << problem.blocks.size() << "\n";
    for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
        const auto &blk = problem.blocks[k];
        out << (k ? " " : "") << (blk.kind == BlockKind::diagonal ? -blk.size : blk.size);
    }
    out << "\n";
    for (int i = 0; i < problem.num_constraints(); ++i) {
        out << (i ? " " : "") << fmt::format("{:.17g}", 0.0 - problem.b[static_cast<std::size_t>(i)]);
    }
    out << "\n";
    auto emit = [&out](int mat, const SparseSymmetric &entries) {
        for (const auto &e : entries) {
            if (e.value != 0.0) {
                out << fmt::format("{} {} {} {} {:.17g}\n", mat, e.block + 1, e.row + 1, e.col + 1, 0.0 - e.value);
            }
        }
    };
    emit(0, problem.c);
    for (int i = 0; i < problem.num_constraints(); ++i) {
        emit(i + 1, problem.a[static_cast<std::size_t>(i)]);
    }
}

Problem read_sdpa(std::istream &in) {
    std::string line;
    std::stringstream body;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '"' || line[0] == '*') {
            continue;
        }
        for (char &ch : line) {
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') {
                ch = ' ';
            }
        }
        body << line << "\n";
    }
    Problem p;
    int m = 0;
    int nblocks = 0;
    if (!(body >> m >> nblocks) || m < 0 || nblocks <= 0) {
        throw InputError("SDPA input: malformed header");
    }
    for (int k = 0; k < nblocks; ++k) {
        int size = 0;
        if (!(body >> size) || size == 0) {
            throw InputError("SDPA input: malformed block structure");
        }
        p.blocks.push_back({size < 0 ? BlockKind::diagonal : BlockKind::psd, std::abs(size)});
    }
    p.b.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double v = 0.0;
        if (!(body >> v)) {
            throw InputError("SDPA input: malformed objective vector");
        }
        p.b[static_cast<std::size_t>(i)] = -v;
    }
    p.a.resize(static_cast<std::size_t>(m));
    int mat = 0;
    int blk = 0;
    int row = 0;
    int col = 0;
    double v = 0.0;
    while (body >> mat >> blk >> row >> col >> v) {
        if (mat < 0 || mat > m) {
            throw InputError("SDPA input: matrix index out of range");
        }
        Entry e{blk - 1, std::min(row, col) - 1, std::max(row, col) - 1, -v};
        (mat == 0 ? p.c : p.a[static_cast<std::size_t>(mat - 1)]).push_back(e);
    }
    if (!body.eof()) {
        throw InputError("SDPA input: malformed entry line");
    }
    p.validate();
    return p;
}

}  // namespace tempocorr::conic
