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

#include <iosfwd>
#include <string>
#include <vector>

#include "tempocorr/linalg.hpp"

namespace tempocorr::conic {

enum class BlockKind { psd, diagonal };

struct Block {
    BlockKind kind = BlockKind::psd;
    int size = 0;
};

/// One stored entry of a symmetric block matrix: upper triangle (row <= col) for PSD blocks,
/// row == col for diagonal blocks.
struct Entry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

using SparseSymmetric = std::vector<Entry>;

/// Block-diagonal conic program in the pair
///   primal:  minimize C.X  subject to A_i.X = b_i, X >= 0 (PSD / elementwise on diagonal blocks)
///   dual:    maximize b'y  subject to C - sum_i y_i A_i >= 0.
struct Problem {
    std::vector<Block> blocks;
    SparseSymmetric c;
    std::vector<SparseSymmetric> a;
    std::vector<double> b;

    int num_constraints() const { return static_cast<int>(a.size()); }
    /// Throws StructuralError on out-of-range or misplaced entries.
    void validate() const;
};

/// Per-block dense values; diagonal blocks are stored as column vectors.
using BlockMatrix = std::vector<RMatrix>;

struct Settings {
    double tolerance = 1e-8;
    int max_iterations = 150;
    double step_fraction = 0.95;
    /// Residual level accepted when the iteration stalls before reaching `tolerance`.
    double acceptable_tolerance = 1e-7;
};

enum class Status { optimal, near_optimal, max_iterations, numerical_failure };

struct Solution {
    Status status = Status::numerical_failure;
    RVector y;
    BlockMatrix x;
    BlockMatrix z;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double relative_gap = 0.0;
    int iterations = 0;

    bool converged() const { return status == Status::optimal || status == Status::near_optimal; }
    std::string diagnostic() const;
};

Solution solve(const Problem &problem, const Settings &settings = {});

/// Evaluates sum_i y_i A_i block by block.
BlockMatrix adjoint_map(const Problem &problem, const RVector &y);
/// Evaluates C as dense blocks.
BlockMatrix dense_objective(const Problem &problem);

/// SDPA sparse format: "min c'x s.t. sum_i F_i x_i - F_0 >= 0" with x = y, c = -b, F_i = -A_i, F_0 = -C.
/// The SDPA optimum is therefore the negated dual optimum of `problem`.
void write_sdpa(std::ostream &out, const Problem &problem, const std::string &comment = "");
Problem read_sdpa(std::istream &in);

}  // namespace tempocorr::conic
