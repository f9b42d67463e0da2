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
#include <map>
#include <optional>
#include <vector>

#include "tempocorr/behavior.hpp"
#include "tempocorr/conic.hpp"

namespace tempocorr {

/// Projector onto outcome `outcome` of the measurement `setting` performed at time `step`.
struct Projector {
    std::size_t step = 0;
    Label setting;
    Label outcome;
    auto operator<=>(const Projector &) const = default;
};

using Word = std::vector<Projector>;
/// Linear combination of words.
using WordSum = std::map<Word, double>;

/// Merges adjacent projectors of the same measurement: equal outcomes collapse, different outcomes give the zero
/// word (nullopt).
std::optional<Word> reduce(Word w);

/// Canonical form of <w> for a real moment matrix: reduce, replace every last-outcome projector by the identity
/// minus the others, reduce again and keep the smaller of each word and its reverse. Zero words are dropped.
WordSum canonicalize(const Scenario &scenario, const Word &w);

std::string format_word(const Word &w);

struct MomentMatrix {
    Scenario scenario;
    std::size_t level = 0;
    /// Rows and columns: time-ordered words of at most `level` projectors, last outcomes excluded.
    std::vector<Word> index;
    /// Equality classes by canonical word; class 0 is the empty word with value 1.
    std::vector<Word> classes;
    /// Class of each entry, or -1 for entries fixed to zero.
    std::vector<std::vector<int>> entry;

    std::size_t size() const { return index.size(); }
    std::size_t num_free() const { return classes.size() - 1; }
    /// p(q|s) as a combination of class values. Throws StructuralError when the sequence needs a longer level.
    std::map<int, double> probability(const SettingSeq &settings, const OutcomeSeq &outcomes) const;
    /// Numeric matrix from class values (values[0] is ignored and taken as 1).
    RMatrix assemble(const RVector &values) const;
};

/// Throws StructuralError for level 0.
MomentMatrix build_moment_matrix(const Scenario &scenario, std::size_t level);

/// Number of non-skip settings in the longest sequence used by `expr`.
std::size_t measured_length(const LinearExpression &expr);

struct ExpressionSdp {
    /// Dual form: maximize b.y subject to C - sum_i y_i A_i >= 0 with y the free class values.
    conic::Problem problem;
    /// Expression value = offset + sign * b.y.
    double offset = 0.0;
    double sign = 1.0;
};

/// SDP for the extreme value of `expr` in the direction of its sense (maximum for upper, minimum for lower).
ExpressionSdp expression_sdp(const LinearExpression &expr, const MomentMatrix &mm);

struct ProjectiveBound {
    double value = 0.0;
    std::size_t level = 0;
    RMatrix moments;
    conic::Solution solution;
};

/// Extreme quantum value of `expr` over projective measurements in any dimension. The level defaults to
/// `measured_length(expr)`. Throws SolverError with residuals when the solver does not converge.
ProjectiveBound max_expression_projective(const LinearExpression &expr, std::optional<std::size_t> level = {},
                                          const conic::Settings &settings = {});

}  // namespace tempocorr
