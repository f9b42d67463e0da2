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

#include "helpers.hpp"
#include "tempocorr/behavior.hpp"
#include "tempocorr/random.hpp"

using namespace tempocorr;

namespace {

const std::vector<SettingSeq> kLg3Schedule{{"1", "1", "0"}, {"1", "0", "1"}, {"0", "1", "1"}};

Behavior rotating_behavior(double angle, std::vector<SettingSeq> schedule) {
    return behavior_from_model(test::rotating_qubit_model(angle), schedule, {{"+1", 1.0}, {"-1", -1.0}});
}

// Behavior of a fixed +-1 assignment: every sequence reports the assigned values with certainty.
Behavior assignment_behavior(const Scenario &sc, const std::vector<int> &assignment) {
    Behavior b{sc, {}};
    for (const auto &s : sc.all_setting_sequences()) {
        OutcomeSeq q;
        for (std::size_t k = 0; k < s.size(); ++k) {
            q.push_back(s[k] == kSkip ? kSkip : (assignment[k] > 0 ? "+1" : "-1"));
        }
        for (const auto &w : sc.outcome_words(s)) {
            b.table[s][w] = w == q ? 1.0 : 0.0;
        }
    }
    return b;
}

}  // namespace

TEST_CASE("check_aot on quantum and hand-built tables") {
    auto b = rotating_behavior(std::numbers::pi / 3, {{"1", "1", "1"}, {"1", "1", "0"}, {"1", "0", "1"}, {"0", "1", "1"}});
    auto report = check_aot(b);
    CHECK(report.ok());
    CHECK_FALSE(report.checked.empty());

    Behavior hand{Scenario::leggett_garg(2), {}};
    hand.table[{"1", "0"}] = {{{"+1", "0"}, 0.8}, {{"-1", "0"}, 0.2}};
    hand.table[{"1", "1"}] = {{{"+1", "+1"}, 0.5}, {{"+1", "-1"}, 0.0}, {{"-1", "+1"}, 0.0}, {{"-1", "-1"}, 0.5}};
    auto bad = check_aot(hand);
    REQUIRE(bad.violations().size() == 1);
    CHECK(bad.violations()[0].deviation == doctest::Approx(0.3));
    CHECK(bad.violations()[0].prefix_length == 1);

    Behavior single{Scenario::leggett_garg(2), {}};
    single.table[{"1", "1"}] = hand.table[{"1", "1"}];
    auto one = check_aot(single);
    CHECK(one.checked.empty());
    CHECK(one.ok());
    REQUIRE(one.untestable.size() == 1);
    CHECK(one.untestable[0].settings == SettingSeq{"1", "0"});
}

TEST_CASE("quantum behaviors satisfy the arrow of time") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 3;
        QuantumSequenceModel model(random_state(d, rng),
                                   {{"a", random_instrument(d, {"x", "y"}, 2, rng)}, {"b", random_instrument(d, {"u", "v"}, 1, rng)}},
                                   Channel::unitary(random_unitary(d, rng)));
        auto b = behavior_from_model(model, model.scenario(3).all_setting_sequences());
        CHECK(check_aot(b, 1e-9).ok());
    }
}

TEST_CASE("check_nsit") {
    auto fig2 = behavior_from_model(test::fig2_model(), std::vector<SettingSeq>{{"z", "x"}, {"0", "x"}});
    auto report = check_nsit(fig2);
    REQUIRE(report.checked.size() == 1);
    CHECK(report.checked[0].position == 0);
    CHECK(report.checked[0].deviation == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(report.checked[0].per_outcome.at({"0", "+"}) - 0.5) < 1e-9);
    CHECK(std::abs(report.checked[0].per_outcome.at({"0", "-"}) - 0.5) < 1e-9);
    // (0, x) has no measured first position; the x position's counterpart (z, 0) is absent.
    CHECK(report.untestable.size() == 2);

    // Oracle: the first measurement prepares +z, so without the middle measurement
    // p(q3 = +) = cos^2(theta) while with it p = cos^4(theta/2) + sin^4(theta/2).
    const double theta = std::numbers::pi / 3;
    auto b = rotating_behavior(theta, {{"1", "1", "1"}, {"1", "0", "1"}});
    const double expected = std::pow(std::cos(theta / 2), 4) + std::pow(std::sin(theta / 2), 4) - std::pow(std::cos(theta), 2);
    auto by_pos = check_nsit(b).max_by_position();
    REQUIRE(by_pos.count(1));
    CHECK(by_pos.at(1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_FALSE(check_nsit(b).ok());
}

TEST_CASE("evaluate and the lgi family") {
    auto b = rotating_behavior(std::numbers::pi / 3, kLg3Schedule);
    CHECK(std::abs(evaluate(lgi3(), b) - 1.5) < 1e-9);

    LinearExpression zero;
    zero.scenario = Scenario::leggett_garg(3);
    CHECK(evaluate(zero, b) == 0.0);

    auto four = rotating_behavior(std::numbers::pi / 4, lgi4().setting_sequences());
    CHECK(std::abs(evaluate(lgi4(), four) - 2.0 * std::sqrt(2.0)) < 1e-9);

    CHECK(lgi_n(3).classical_bound == 1.0);
    CHECK(*lgi_n(3).quantum_bound == doctest::Approx(1.5));
    CHECK(*lgi_n(4).quantum_bound == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(lgi_n(5).classical_bound == 3.0);
    CHECK_THROWS_AS(lgi_n(2), StructuralError);
    CHECK(lgi4().terms.size() == 4);

    Behavior partial = b;
    partial.table.erase({"1", "0", "1"});
    try {
        evaluate(lgi3(), partial);
        FAIL("expected missing data");
    } catch (const MissingDataError &e) {
        CHECK(std::string(e.what()).find("(1,0,1)") != std::string::npos);
    }
}

TEST_CASE("lgi_n classical bound equals the best deterministic assignment") {
    for (std::size_t n = 3; n <= 10; ++n) {
        const auto expr = lgi_n(n);
        double best = -1e9;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> a(n);
            for (std::size_t k = 0; k < n; ++k) {
                a[k] = (mask >> k) & 1u ? -1 : 1;
            }
            double direct = -a[0] * a[n - 1];
            for (std::size_t k = 0; k + 1 < n; ++k) {
                direct += a[k] * a[k + 1];
            }
            const auto b = assignment_behavior(expr.scenario, a);
            CHECK(evaluate(expr, b) == doctest::Approx(direct));
            best = std::max(best, direct);
        }
        CHECK(best == *expr.classical_bound);
    }
    // Direct assignment oracle for the largest sizes without building behaviors.
    for (std::size_t n = 11; n <= 12; ++n) {
        double best = -1e9;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            auto v = [&](std::size_t k) { return (mask >> k) & 1u ? -1.0 : 1.0; };
            double direct = -v(0) * v(n - 1);
            for (std::size_t k = 0; k + 1 < n; ++k) {
                direct += v(k) * v(k + 1);
            }
            best = std::max(best, direct);
        }
        CHECK(best == *lgi_n(n).classical_bound);
    }
}

TEST_CASE("evaluate is linear") {
    Rng rng(8);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto model = test::rotating_qubit_model(coef(rng));
        auto b = behavior_from_model(model, Scenario::leggett_garg(3).all_setting_sequences(), {{"+1", 1.0}, {"-1", -1.0}});
        const double alpha = coef(rng);
        const double beta = coef(rng);
        auto e1 = lgi3();
        auto e2 = lgi_stationary(1);
        const double lhs = evaluate(alpha * e1 + beta * e2, b);
        CHECK(std::abs(lhs - (alpha * evaluate(e1, b) + beta * evaluate(e2, b))) < 1e-12);
    }
}

TEST_CASE("stationary LGI") {
    auto minus = lgi_stationary(-1);
    CHECK(minus.sense == Sense::lower);
    CHECK(*minus.classical_bound == -1.0);
    auto b = rotating_behavior(std::numbers::pi / 3, kLg3Schedule);
    CHECK(std::abs(evaluate(minus, b) - (-1.5)) < 1e-9);
    auto flipped = rotating_behavior(std::numbers::pi, kLg3Schedule);
    CHECK(std::abs(evaluate(minus, flipped) - 3.0) < 1e-9);
    CHECK(std::abs(evaluate(lgi_stationary(1), flipped) - (-1.0)) < 1e-9);
    CHECK_THROWS_AS(lgi_stationary(0), StructuralError);

    // Stationary telegraph process: each step keeps the value with probability (1 + x) / 2, so C(t) = x and
    // C(2t) = x^2.
    for (double gt : {0.01, 0.3, 1.0, 2.5}) {
        const double x = std::exp(-gt);
        Behavior tel{Scenario::leggett_garg(3), {}};
        const double stay = 0.5 * (1.0 + x);
        const double stay2 = 0.5 * (1.0 + x * x);
        tel.table[{"1", "1", "0"}] = {{{"+1", "+1", "0"}, 0.5 * stay}, {{"+1", "-1", "0"}, 0.5 * (1 - stay)},
                                      {{"-1", "+1", "0"}, 0.5 * (1 - stay)}, {{"-1", "-1", "0"}, 0.5 * stay}};
        tel.table[{"0", "1", "1"}] = {{{"0", "+1", "+1"}, 0.5 * stay}, {{"0", "+1", "-1"}, 0.5 * (1 - stay)},
                                      {{"0", "-1", "+1"}, 0.5 * (1 - stay)}, {{"0", "-1", "-1"}, 0.5 * stay}};
        tel.table[{"1", "0", "1"}] = {{{"+1", "0", "+1"}, 0.5 * stay2}, {{"+1", "0", "-1"}, 0.5 * (1 - stay2)},
                                      {{"-1", "0", "+1"}, 0.5 * (1 - stay2)}, {{"-1", "0", "-1"}, 0.5 * stay2}};
        const double value = evaluate(minus, tel);
        CHECK(value == doctest::Approx(std::exp(-2 * gt) - 2 * std::exp(-gt)));
        CHECK(value >= -1.0);
    }
}

TEST_CASE("quantum witness and Robens witness") {
    auto fig2 = behavior_from_model(test::fig2_model(), std::vector<SettingSeq>{{"z", "x"}, {"0", "x"}});
    CHECK(quantum_witness(fig2, {"z", "x"}, 0, {"+"}) == doctest::Approx(0.5));
    CHECK(quantum_witness(fig2, {"z", "x"}, 0, {"-"}) == doctest::Approx(0.5));

    auto robens = robens_witness(fig2, {"z", "x"}, 0, {{"+", 0.0}, {"-", 1.0}});
    CHECK(robens.value == doctest::Approx(0.5));
    CHECK(robens.violates());
    CHECK_THROWS_AS(robens_witness(fig2, {"z", "x"}, 0), MissingDataError);

    // sigma_z followed by sigma_z on the same state: no disturbance.
    CVector psi = CVector::Ones(2) / std::sqrt(2.0);
    QuantumSequenceModel zz(QuantumState::pure(psi), {{"z", test::sigma_z_instrument("+", "-")}});
    auto nd = behavior_from_model(zz, std::vector<SettingSeq>{{"z", "z"}, {"0", "z"}});
    CHECK(std::abs(robens_witness(nd, {"z", "z"}, 0, {{"+", 1.0}, {"-", -1.0}}).value) < 1e-12);
    CHECK(quantum_witness(nd, {"z", "z"}, 0, {"+"}) < 1e-12);
}

TEST_CASE("invasivity") {
    QuantumSequenceModel repeat(QuantumState::pure(CVector::Unit(2, 0)), {{"1", test::sigma_z_instrument()}});
    auto b = behavior_from_model(repeat, std::vector<SettingSeq>{{"1", "1"}});
    auto inv = invasivity(b, {"1", "1"});
    CHECK(*inv.at("+1") == doctest::Approx(0.0));
    CHECK_FALSE(inv.at("-1").has_value());

    Behavior hand{Scenario::leggett_garg(2), {}};
    hand.table[{"1", "1"}] = {{{"+1", "+1"}, 0.45}, {{"+1", "-1"}, 0.05}, {{"-1", "+1"}, 0.05}, {{"-1", "-1"}, 0.45}};
    CHECK(*invasivity(hand, {"1", "1"}).at("+1") == doctest::Approx(0.1));

    // Depolarizing noise of strength lambda between the steps: p(q|q) = 1 - lambda / 2.
    for (double lambda : {0.0, 0.2, 0.7}) {
        for (int k : {0, 1}) {
            QuantumSequenceModel noisy(QuantumState::pure(CVector::Unit(2, k)), {{"1", test::sigma_z_instrument()}},
                                       Channel::depolarizing(2, lambda));
            auto nb = behavior_from_model(noisy, std::vector<SettingSeq>{{"1", "1"}});
            CHECK(*invasivity(nb, {"1", "1"}).at(k == 0 ? "+1" : "-1") == doctest::Approx(lambda / 2).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(invasivity(hand, {"1", "0"}), StructuralError);
}

TEST_CASE("adroitness deviations") {
    LinearExpression target;
    target.scenario = Scenario{2, {"0", "z"}, {{"0", {"0"}}, {"z", {"+1", "-1"}}}, kSkip, {{"+1", 1.0}, {"-1", -1.0}}};
    target.terms.push_back(correlator(target.scenario, 1.0, {"0", "z"}));
    const std::vector<SettingSeq> schedule{{"0", "z"}};
    const CVector up = CVector::Unit(2, 0);
    QuantumSequenceModel plain(QuantumState::pure(up), {{"z", test::sigma_z_instrument()}});
    auto without = behavior_from_model(plain, schedule);
    CHECK(adroitness_deviation(without, without, target) == 0.0);

    QuantumSequenceModel commuting(QuantumState::pure(up), {{"z", test::sigma_z_instrument()}},
                                   nonselective_channel(test::sigma_z_instrument()));
    CHECK(adroitness_deviation(behavior_from_model(commuting, schedule), without, target) < 1e-12);

    QuantumSequenceModel clumsy(QuantumState::pure(up), {{"z", test::sigma_z_instrument()}},
                                nonselective_channel(test::sigma_x_instrument()));
    const double eps = adroitness_deviation(behavior_from_model(clumsy, schedule), without, target);
    CHECK(eps == doctest::Approx(1.0));

    std::vector<double> small{0.1, 0.05};
    CHECK(huffman_mizel_accepts(-0.2, small));
    std::vector<double> large{0.1, 0.15};
    CHECK_FALSE(huffman_mizel_accepts(-0.2, large));
}

TEST_CASE("ambiguous-measurement reconstruction") {
    auto mixed = eim_reconstruct({{"0", 2.0 / 3}, {"1", 2.0 / 3}, {"2", 2.0 / 3}});
    for (const auto &[q, p] : mixed.p) {
        CHECK(p == doctest::Approx(1.0 / 3));
    }
    CHECK_FALSE(mixed.is_quasi);

    auto pure = eim_reconstruct({{"0", 0.0}, {"1", 1.0}, {"2", 1.0}});
    CHECK(pure.p.at("0") == doctest::Approx(1.0));
    CHECK(pure.p.at("1") == doctest::Approx(0.0));
    CHECK(pure.p.at("2") == doctest::Approx(0.0));

    // Mislabelling noise: the complement detector for q fires on |q> with probability eta.
    const double eta = 0.9;
    CMatrix rho = CMatrix::Zero(3, 3);
    rho(0, 0) = 1.0;
    std::map<Label, double> noisy;
    for (int q = 0; q < 3; ++q) {
        CMatrix pq = CMatrix::Zero(3, 3);
        pq(q, q) = 1.0;
        CMatrix effect = (1 - eta) * (CMatrix::Identity(3, 3) - pq) + eta * pq;
        noisy[std::to_string(q)] = (effect * rho).trace().real();
    }
    auto quasi = eim_reconstruct(noisy);
    CHECK(quasi.is_quasi);
    CHECK(quasi.p.at("0") == doctest::Approx(1.0 - 1.5 * eta));

    CHECK_THROWS_AS(eim_reconstruct({{"0", 0.5}, {"1", 0.5}}), StructuralError);
    CHECK_THROWS_AS(eim_reconstruct({{"0", 1.5}, {"1", 0.5}, {"2", 0.5}}), InputError);
}

TEST_CASE("corrected LGI from ambiguous statistics") {
    // Qutrit rotated between two measurements of Q = diag(+1, -1, +1) labelled by level.
    Rng rng(12);
    const CMatrix u = random_unitary(3, rng);
    const auto rho = random_state(3, rng);
    std::vector<CVector> basis{CVector::Unit(3, 0), CVector::Unit(3, 1), CVector::Unit(3, 2)};
    auto q = von_neumann_instrument(basis, {"0", "1", "2"});
    QuantumSequenceModel model(rho, {{"1", q}}, Channel::unitary(u));
    const std::map<Label, double> values{{"0", 1.0}, {"1", -1.0}, {"2", 1.0}};
    auto b = behavior_from_model(model, std::vector<SettingSeq>{{"1", "1"}, {"0", "1"}}, values);

    AmbiguousJoint amb;
    for (int q2 = 0; q2 < 3; ++q2) {
        for (int q1 = 0; q1 < 3; ++q1) {
            CMatrix bar = CMatrix::Identity(3, 3) - outer(basis[q1]);
            CMatrix after = u * bar * rho.matrix() * bar * u.adjoint();
            amb[std::to_string(q2)][std::to_string(q1)] = after(q2, q2).real();
        }
    }
    auto delta = eim_delta(b, {"0", "1"}, 1, amb);
    CMatrix free = u * rho.matrix() * u.adjoint();
    double bound = 1.0;
    for (int q2 = 0; q2 < 3; ++q2) {
        double joint = 0.0;
        for (int q1 = 0; q1 < 3; ++q1) {
            joint += 0.5 * amb[std::to_string(q2)][std::to_string(q1)];
        }
        const double expected = free(q2, q2).real() - joint;
        CHECK(delta.at(std::to_string(q2)) == doctest::Approx(expected).epsilon(1e-12));
        bound += std::abs(expected);
    }
    double lhs = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double va = values.at(std::to_string(a));
        CMatrix post = u * outer(basis[a]) * rho.matrix() * outer(basis[a]) * u.adjoint();
        for (int c = 0; c < 3; ++c) {
            const double vc = values.at(std::to_string(c));
            lhs += (va + va * vc) * post(c, c).real();
        }
        lhs -= va * free(a, a).real();
    }
    auto corrected = eim_corrected_lgi(b, amb);
    CHECK(corrected.lhs == doctest::Approx(lhs).epsilon(1e-12));
    CHECK(corrected.bound == doctest::Approx(bound).epsilon(1e-12));
}
