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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tempocorr/conic.hpp"
#include "tempocorr/random.hpp"

using namespace tempocorr;
using namespace tempocorr::conic;

namespace {

// Optimum of min c'x s.t. Ax = b, x >= 0 by enumerating every basis (tiny problems only).
double brute_force_lp(const RMatrix &a, const RVector &b, const RVector &c) {
    const auto m = a.rows();
    const auto n = a.cols();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != m) {
            continue;
        }
        RMatrix basis(m, m);
        std::vector<int> cols;
        for (int j = 0; j < n; ++j) {
            if (mask & (1u << j)) {
                basis.col(static_cast<Eigen::Index>(cols.size())) = a.col(j);
                cols.push_back(j);
            }
        }
        Eigen::FullPivLU<RMatrix> lu(basis);
        if (lu.rank() < m) {
            continue;
        }
        RVector xb = lu.solve(b);
        if (xb.minCoeff() < -1e-12) {
            continue;
        }
        double value = 0.0;
        for (int k = 0; k < m; ++k) {
            value += c[cols[k]] * xb[k];
        }
        best = std::min(best, value);
    }
    return best;
}

}  // namespace

TEST_CASE("minimum eigenvalue as a dual SDP") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + trial % 4;
        RMatrix g = random_ginibre(n, n, rng).real();
        RMatrix c = 0.5 * (g + g.transpose());
        Problem p;
        p.blocks = {{BlockKind::psd, n}};
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                p.c.push_back({0, i, j, c(i, j)});
            }
        }
        SparseSymmetric identity;
        for (int i = 0; i < n; ++i) {
            identity.push_back({0, i, i, 1.0});
        }
        p.a = {identity};
        p.b = {1.0};
        auto sol = solve(p);
        REQUIRE(sol.converged());
        Eigen::SelfAdjointEigenSolver<RMatrix> es(c);
        CHECK(sol.dual_objective == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-7));
        CHECK(sol.primal_objective == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-7));
    }
}

TEST_CASE("linear programs on a diagonal block agree with basis enumeration") {
    Rng rng(17);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + trial % 2;
        const int n = 6;
        RMatrix a(m, n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                a(i, j) = u(rng);
            }
        }
        RVector x0(n);
        for (int j = 0; j < n; ++j) {
            x0[j] = u(rng);
        }
        const RVector b = a * x0;
        RVector c(n);
        for (int j = 0; j < n; ++j) {
            c[j] = u(rng) - 0.5;
        }
        // Bounded: the positive rows keep x in a box.
        Problem p;
        p.blocks = {{BlockKind::diagonal, n}};
        for (int j = 0; j < n; ++j) {
            p.c.push_back({0, j, j, c[j]});
        }
        for (int i = 0; i < m; ++i) {
            SparseSymmetric row;
            for (int j = 0; j < n; ++j) {
                row.push_back({0, j, j, a(i, j)});
            }
            p.a.push_back(row);
            p.b.push_back(b[i]);
        }
        auto sol = solve(p);
        REQUIRE(sol.converged());
        CHECK(sol.primal_objective == doctest::Approx(brute_force_lp(a, b, c)).epsilon(1e-7));
    }
}

TEST_CASE("Lovasz theta of the pentagon") {
    const int n = 5;
    Problem p;
    p.blocks = {{BlockKind::psd, n}};
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            p.c.push_back({0, i, j, -1.0});
        }
    }
    SparseSymmetric trace;
    for (int i = 0; i < n; ++i) {
        trace.push_back({0, i, i, 1.0});
    }
    p.a.push_back(trace);
    p.b.push_back(1.0);
    for (int i = 0; i < n; ++i) {
        p.a.push_back({{0, std::min(i, (i + 1) % n), std::max(i, (i + 1) % n), 1.0}});
        p.b.push_back(0.0);
    }
    auto sol = solve(p);
    REQUIRE(sol.converged());
    CHECK(-sol.primal_objective == doctest::Approx(std::sqrt(5.0)).epsilon(1e-7));
    CHECK(-sol.dual_objective == doctest::Approx(std::sqrt(5.0)).epsilon(1e-7));
}

TEST_CASE("mixed blocks and SDPA round trip") {
    Problem p;
    p.blocks = {{BlockKind::psd, 2}, {BlockKind::diagonal, 2}};
    // max y1 + y2 s.t. [[1, y1], [y1, 1]] >= 0 and 2 - y2 >= 0, 1 + y1 - y2 >= 0: y = (1, 2), value 3.
    p.c = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {1, 0, 0, 2.0}, {1, 1, 1, 1.0}};
    p.a = {{{0, 0, 1, -1.0}, {1, 1, 1, -1.0}}, {{1, 0, 0, 1.0}, {1, 1, 1, 1.0}}};
    p.b = {1.0, 1.0};
    auto sol = solve(p);
    REQUIRE(sol.converged());
    CHECK(sol.dual_objective == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));

    std::stringstream ss;
    write_sdpa(ss, p, "round trip");
    auto q = read_sdpa(ss);
    CHECK(q.blocks.size() == 2);
    CHECK(q.blocks[1].kind == BlockKind::diagonal);
    CHECK(q.b == p.b);
    auto sol2 = solve(q);
    REQUIRE(sol2.converged());
    CHECK(sol2.dual_objective == doctest::Approx(3.0).epsilon(1e-7));

    std::stringstream again;
    write_sdpa(again, q, "round trip");
    std::stringstream first;
    write_sdpa(first, p, "round trip");
    CHECK(first.str() == again.str());

    Problem bad = p;
    bad.a[0].push_back({1, 0, 1, 1.0});
    CHECK_THROWS_AS(bad.validate(), StructuralError);
    std::stringstream junk("1\n");
    CHECK_THROWS_AS(read_sdpa(junk), InputError);
}
