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
#include <numbers>
#include <random>

#include "tempocorr/automata.hpp"
#include "tempocorr/errors.hpp"
#include "tempocorr/random.hpp"
#include "tempocorr/seesaw.hpp"

using namespace tempocorr;

namespace {

ClassicalMachine random_machine(std::size_t d, const LabelSeq &inputs, const LabelSeq &outputs, Rng &rng) {
    std::exponential_distribution<double> e;
    ClassicalMachine m{inputs, outputs, RVector(static_cast<Eigen::Index>(d)), {}};
    for (auto &v : m.initial) {
        v = e(rng);
    }
    m.initial /= m.initial.sum();
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        std::vector<RMatrix> per(outputs.size(), RMatrix(d, d));
        for (auto &t : per) {
            for (auto &v : t.reshaped()) {
                v = e(rng);
            }
        }
        for (std::size_t r = 0; r < d; ++r) {
            double total = 0.0;
            for (const auto &t : per) {
                total += t.col(r).sum();
            }
            for (auto &t : per) {
                t.col(r) /= total;
            }
        }
        m.transfer.push_back(per);
    }
    return m;
}

OutcomeSeq bits(const std::string &s) {
    OutcomeSeq q;
    for (char c : s) {
        q.push_back(std::string(1, c));
    }
    return q;
}

std::vector<OutcomeSeq> all_words(std::size_t n, std::size_t alphabet) {
    std::vector<OutcomeSeq> out;
    std::vector<std::size_t> digits(n, 0);
    while (true) {
        OutcomeSeq w;
        for (auto x : digits) {
            w.push_back(std::to_string(x));
        }
        out.push_back(w);
        std::size_t i = 0;
        while (i < n && ++digits[i] == alphabet) {
            digits[i++] = 0;
        }
        if (i == n) {
            return out;
        }
    }
}

// Smallest d <= cap admitting a state map that reproduces q, by trying every transition table on d states;
// cap + 1 when there is none.
std::size_t brute_force_dc(const OutcomeSeq &q, std::size_t cap) {
    for (std::size_t d = 1; d <= cap; ++d) {
        // A deterministic machine is a map state -> (output, next state); the walk starts in state 0.
        std::vector<std::size_t> code(d, 0);
        const std::size_t options = 2 * d;
        while (true) {
            std::size_t r = 0;
            bool ok = true;
            for (const auto &x : q) {
                const std::size_t out = code[r] / d;
                if (std::to_string(out) != x) {
                    ok = false;
                    break;
                }
                r = code[r] % d;
            }
            if (ok) {
                return d;
            }
            std::size_t i = 0;
            while (i < d && ++code[i] == options) {
                code[i++] = 0;
            }
            if (i == d) {
                break;
            }
        }
    }
    return cap + 1;
}

}  // namespace

TEST_CASE("flip machine emits alternating bits with certainty") {
    ClassicalMachine m{{kNoInput}, {"0", "1"}, RVector::Unit(2, 0), {}};
    RMatrix emit0 = RMatrix::Zero(2, 2);
    RMatrix emit1 = RMatrix::Zero(2, 2);
    emit0(1, 0) = 1.0;
    emit1(0, 1) = 1.0;
    m.transfer = {{emit0, emit1}};
    CHECK(m.validate().ok());
    CHECK(machine_probability(m, bits("010101")) == doctest::Approx(1.0));
    CHECK(machine_probability(m, bits("011")) == doctest::Approx(0.0));
}

TEST_CASE("single-state machine is i.i.d.") {
    for (double x : {0.1, 0.5, 0.77}) {
        ClassicalMachine m{{kNoInput}, {"0", "1"}, RVector::Ones(1), {}};
        m.transfer = {{RMatrix::Constant(1, 1, x), RMatrix::Constant(1, 1, 1.0 - x)}};
        CHECK(std::abs(machine_probability(m, bits("01")) - x * (1.0 - x)) < 1e-15);
    }
}

TEST_CASE("invalid machines are reported") {
    Rng rng(3);
    auto m = random_machine(2, {kNoInput}, {"0", "1"}, rng);
    m.transfer[0][0](0, 0) += 0.1;
    CHECK_FALSE(m.validate().ok());
    auto n = random_machine(2, {kNoInput}, {"0", "1"}, rng);
    n.transfer[0].pop_back();
    CHECK_THROWS_AS((void)n.validate(), StructuralError);
    CHECK_THROWS_AS((void)machine_probability(random_machine(2, {"a"}, {"0", "1"}, rng), {"b"}, {"0"}), StructuralError);
}

TEST_CASE("marginals sum to one and embeddings agree") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const auto m = random_machine(d, {"a", "b"}, {"0", "1", "2"}, rng);
        const auto qm = embed(m);
        qm.validate();
        const auto big = embed(qm, static_cast<int>(d) + 2);
        const SettingSeq s = {"a", "b", "a"};
        double total = 0.0;
        for (const auto &w : all_words(3, 3)) {
            const double p = machine_probability(m, s, w);
            total += p;
            CHECK(std::abs(machine_probability(qm, s, w) - p) < 1e-12);
            CHECK(std::abs(machine_probability(big, s, w) - p) < 1e-12);
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("classical probability equals the sum over state trajectories") {
    Rng rng(5);
    const auto m = random_machine(3, {kNoInput}, {"0", "1"}, rng);
    const auto q = bits("0110");
    double total = 0.0;
    for (const auto &path : all_words(q.size() + 1, 3)) {
        std::vector<std::size_t> r;
        for (const auto &x : path) {
            r.push_back(std::stoul(x));
        }
        double p = m.initial[static_cast<Eigen::Index>(r[0])];
        for (std::size_t t = 0; t < q.size(); ++t) {
            p *= m.transfer[0][m.output_index(q[t])](static_cast<Eigen::Index>(r[t + 1]),
                                                       static_cast<Eigen::Index>(r[t]));
        }
        total += p;
    }
    CHECK(std::abs(machine_probability(m, q) - total) < 1e-14);
}

TEST_CASE("deterministic complexity examples") {
    CHECK(deterministic_complexity(bits("010101")).complexity == 2);
    CHECK(deterministic_complexity(bits("000")).complexity == 1);
    for (std::size_t n = 2; n <= 8; ++n) {
        auto q = OutcomeSeq(n - 1, "0");
        q.push_back("1");
        const auto dc = deterministic_complexity(q);
        CHECK(dc.complexity == n);
        CHECK(dc.machine.states() == n);
        CHECK(machine_probability(dc.machine, q) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS((void)deterministic_complexity({}), InputError);
}

TEST_CASE("deterministic complexity matches brute force for every short binary word") {
    for (std::size_t n = 1; n <= 8; ++n) {
        for (const auto &q : all_words(n, 2)) {
            const auto dc = deterministic_complexity(q);
            const auto expected = brute_force_dc(q, 5);
            CHECK(std::min<std::size_t>(dc.complexity, 6) == expected);
            CHECK(machine_probability(dc.machine, q) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(dc.minimality_checked == (dc.complexity <= 6));
            CHECK(deterministic_machine_exists(q, dc.complexity));
            if (dc.complexity > 1) {
                CHECK_FALSE(deterministic_machine_exists(q, dc.complexity - 1));
            }
        }
    }
}

TEST_CASE("classical optimization reaches one at the deterministic complexity") {
    OptimizerConfig cfg;
    cfg.restarts = 8;
    for (const auto *s : {"0110", "00101", "010", "0001"}) {
        const auto q = bits(s);
        const auto dc = deterministic_complexity(q).complexity;
        const auto at = max_sequence_probability_classical(q, dc, cfg);
        CHECK(at.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(at.certification == Certification::exhaustive);
        if (dc > 1) {
            const auto below = max_sequence_probability_classical(q, dc - 1, cfg);
            CHECK(below.value < 1.0 - 1e-3);
        }
    }
}

TEST_CASE("single-state optimum of 01 is a quarter") {
    const auto r = max_sequence_probability_classical(bits("01"), 1);
    CHECK(std::abs(r.value - 0.25) < 1e-9);
    CHECK(r.machine.validate().ok());
}

TEST_CASE("two-state optimum of 001 is bracketed and grid agrees") {
    OptimizerConfig cfg;
    cfg.restarts = 20;
    const auto ms = max_sequence_probability_classical(bits("001"), 2, cfg);
    const auto grid = grid_sequence_probability(bits("001"), 2);
    CHECK(ms.value > 0.25);
    CHECK(ms.value <= 1.0 / std::numbers::e + 1e-3);
    CHECK(grid.certification == Certification::grid);
    CHECK(std::abs(ms.value - grid.value) < 1e-6);
    CHECK(machine_probability(grid.machine, bits("001")) == doctest::Approx(grid.value));
}

TEST_CASE("dimension witness bounds") {
    const auto expr = eq31_expression();
    OptimizerConfig cfg;
    cfg.restarts = 20;
    const auto opt = max_expression_classical(expr, 2, cfg);
    CHECK(std::abs(opt.value - 2.25) < 1e-6);
    const auto det = max_expression_deterministic(expr, 2);
    CHECK(det.value == doctest::Approx(2.0));
    CHECK(det.certification == Certification::exhaustive);

    // Independent enumeration: each (state, input) maps to (output, next state).
    double best = 0.0;
    for (int code = 0; code < 4 * 4 * 4 * 4 * 2; ++code) {
        int c = code;
        const int start = c % 2;
        c /= 2;
        int out[2][2];
        int next[2][2];
        for (int r = 0; r < 2; ++r) {
            for (int s = 0; s < 2; ++s) {
                out[r][s] = c % 2;
                next[r][s] = (c / 2) % 2;
                c /= 4;
            }
        }
        auto emit = [&](int s1, int s2) {
            const int r1 = next[start][s1];
            return std::pair{out[start][s1], out[r1][s2]};
        };
        const double v = (emit(0, 0) == std::pair{0, 1}) + (emit(1, 0) == std::pair{1, 0}) +
                         (emit(1, 1) == std::pair{1, 0});
        best = std::max(best, v);
    }
    CHECK(det.value == doctest::Approx(best));
}

TEST_CASE("behavior from a classical machine evaluates the expression") {
    Rng rng(8);
    const auto expr = eq31_expression();
    const auto m = random_machine(2, {"0", "1"}, {"0", "1"}, rng);
    const auto b = behavior_from_machine(m, expr.scenario, expr.setting_sequences());
    const double direct = machine_probability(m, {"0", "0"}, {"0", "1"}) +
                          machine_probability(m, {"1", "0"}, {"1", "0"}) +
                          machine_probability(m, {"1", "1"}, {"1", "0"});
    CHECK(evaluate(expr, b) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("qubit see-saw beats the classical dimension witness") {
    QuantumSearchConfig cfg;
    cfg.optimizer.restarts = 8;
    const auto r = max_expression_quantum_seesaw(eq31_expression(), 2, cfg);
    CHECK(r.value >= 2.3556);
    r.machine.validate();
    const auto &m = r.machine;
    const double direct = machine_probability(m, {"0", "0"}, {"0", "1"}) +
                          machine_probability(m, {"1", "0"}, {"1", "0"}) +
                          machine_probability(m, {"1", "1"}, {"1", "0"});
    CHECK(direct == doctest::Approx(r.value).epsilon(1e-10));
}

TEST_CASE("see-saw reaches a classically attainable maximum") {
    QuantumSearchConfig cfg;
    cfg.optimizer.restarts = 4;
    const auto r = max_sequence_probability_quantum(bits("0101"), 2, cfg);
    CHECK(r.value > 1.0 - 1e-4);
}

TEST_CASE("one-tick quantum values grow with dimension") {
    QuantumSearchConfig cfg;
    cfg.optimizer.restarts = 6;
    cfg.kraus_per_outcome = 1;
    OptimizerConfig ccfg;
    ccfg.restarts = 10;
    double previous = 0.0;
    std::optional<QuantumMachine> last;
    for (int d = 2; d <= 4; ++d) {
        auto q = OutcomeSeq(static_cast<std::size_t>(d), "0");
        q.push_back("1");
        cfg.warm_start = std::nullopt;
        const auto r = max_sequence_probability_quantum(q, d, cfg);
        const auto c = max_sequence_probability_classical(q, static_cast<std::size_t>(d), ccfg);
        CHECK(r.value > c.value + 1e-4);
        CHECK(r.value > previous);
        previous = r.value;
    }
}

TEST_CASE("see-saw is monotone in dimension with a warm start") {
    QuantumSearchConfig cfg;
    cfg.optimizer.restarts = 3;
    const auto q = bits("0001");
    const auto low = max_sequence_probability_quantum(q, 2, cfg);
    cfg.warm_start = low.machine;
    const auto high = max_sequence_probability_quantum(q, 3, cfg);
    CHECK(high.value >= low.value - 1e-12);
}

TEST_CASE("von Neumann witness attains its ceiling") {
    OptimizerConfig cfg;
    cfg.restarts = 10;
    for (int n : {2, 3, 4}) {
        const auto w = max_von_neumann_witness(n, cfg);
        CHECK(std::abs(w.value - (1.0 - 1.0 / n)) < 1e-4);
        const std::vector<SettingSeq> schedule = {{"a", "b"}, {kSkip, "b"}};
        const auto b = behavior_from_model(w.model(), schedule);
        CHECK(std::abs(quantum_witness(b, {"a", "b"}, 0, {"+1"}) - w.value) < 1e-9);
    }
}

TEST_CASE("spin-1 precession beats the two-level value") {
    OptimizerConfig cfg;
    cfg.restarts = 6;
    const auto r = max_spin_lgi(2, cfg);
    CHECK(r.value > 1.5 + 1e-3);
    const auto schedule = lgi3().setting_sequences();
    const auto b = behavior_from_model(r.model(), schedule, lgi3().scenario.outcome_values);
    CHECK(evaluate(lgi3(), b) == doctest::Approx(r.value).epsilon(1e-12));
    MESSAGE("spin-1 value " << r.value << ", closed form " << 3.0 - std::sqrt(2.0 / std::numbers::pi));
}

TEST_CASE("tick distributions") {
    const auto g = geometric_ticks(0.3, 20);
    for (std::size_t t = 1; t <= 20; ++t) {
        CHECK(std::abs(g.p[t - 1] - std::pow(0.7, static_cast<double>(t - 1)) * 0.3) < 1e-15);
    }
    ClassicalMachine iid{{kNoInput}, {"0", "1"}, RVector::Ones(1), {}};
    iid.transfer = {{RMatrix::Constant(1, 1, 0.7), RMatrix::Constant(1, 1, 0.3)}};
    const auto m = machine_tick_distribution(iid, 20);
    for (std::size_t t = 0; t < 20; ++t) {
        CHECK(std::abs(m.p[t] - g.p[t]) < 1e-15);
    }

    auto q = OutcomeSeq(4, "0");
    q.push_back("1");
    const auto counter = machine_tick_distribution(deterministic_complexity(q).machine, 10);
    for (std::size_t t = 1; t <= 10; ++t) {
        CHECK(counter.p[t - 1] == doctest::Approx(t == 5 ? 1.0 : 0.0));
    }
    CHECK(clock_accuracy(counter).deterministic());

    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rm = random_machine(1 + trial % 4, {kNoInput}, {"0", "1"}, rng);
        const auto td = machine_tick_distribution(rm, 15);
        double total = td.tail;
        for (double p : td.p) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        const auto qd = machine_tick_distribution(embed(rm), 15);
        for (std::size_t t = 0; t < 15; ++t) {
            CHECK(std::abs(qd.p[t] - td.p[t]) < 1e-12);
        }
    }
}

TEST_CASE("clock accuracy") {
    const auto half = clock_accuracy(geometric_ticks(0.5, 80));
    CHECK(std::abs(half.mean - 2.0) < 1e-9);
    CHECK(std::abs(half.variance - 2.0) < 1e-9);
    REQUIRE_FALSE(half.deterministic());
    CHECK(std::abs(*half.accuracy - 2.0) < 1e-9);
    for (double rate : {0.2, 0.6, 0.9}) {
        const auto a = clock_accuracy(geometric_ticks(rate, 400));
        CHECK(std::abs(*a.accuracy - 1.0 / (1.0 - rate)) < 1e-8);
    }
    CHECK_THROWS_AS((void)clock_accuracy(geometric_ticks(0.1, 10)), InputError);
}
