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

#include <numbers>

#include "helpers.hpp"
#include "tempocorr/io.hpp"
#include "tempocorr/random.hpp"

using namespace tempocorr;

TEST_CASE("scenario documents round-trip") {
    for (const auto &sc : {Scenario::leggett_garg(3), eq31_expression().scenario}) {
        const auto doc = to_document(sc);
        CHECK(doc["format_version"] == kFormatVersion);
        CHECK(doc["kind"] == "scenario");
        const auto back = scenario_from_document(doc);
        CHECK(back == sc);
        CHECK(to_document(back) == doc);
        CHECK(scenario_from_document(Json::parse(doc.dump())) == sc);
    }
}

TEST_CASE("model documents round-trip") {
    const auto model = test::rotating_qubit_model(std::numbers::pi / 3);
    const std::map<Label, double> values = {{"+1", 1.0}, {"-1", -1.0}};
    const auto doc = to_document(model, values);
    const auto back = model_from_document(Json::parse(doc.dump()));
    CHECK(to_document(back.model, back.outcome_values) == doc);
    CHECK(back.outcome_values == values);
    const auto schedule = lgi3().setting_sequences();
    const auto a = behavior_from_model(model, schedule, values);
    const auto b = behavior_from_model(back.model, schedule, back.outcome_values);
    CHECK(evaluate(lgi3(), b) == doctest::Approx(evaluate(lgi3(), a)).epsilon(1e-15));
}

TEST_CASE("model documents accept a Hamiltonian and a pure state") {
    Json doc = to_document(test::rotating_qubit_model(0.0), {});
    doc.erase("inter_step");
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 1) = cplx(0.0, -0.5);
    h(1, 0) = cplx(0.0, 0.5);
    doc["inter_step"] = Json{{"hamiltonian", to_json(h)}, {"time", std::numbers::pi / 3}};
    doc["initial"] = Json{{"pure", Json::array({Json::array({1.0, 0.0}), Json::array({0.0, 0.0})})}};
    const auto md = model_from_document(doc);
    const auto b = behavior_from_model(md.model, lgi3().setting_sequences(), {{"+1", 1.0}, {"-1", -1.0}});
    CHECK(std::abs(evaluate(lgi3(), b) - 1.5) < 1e-12);
}

TEST_CASE("behavior and expression documents round-trip") {
    const auto b = behavior_from_model(test::fig2_model(), std::vector<SettingSeq>{{"z", "x"}, {"0", "x"}});
    const auto doc = to_document(b);
    const auto back = behavior_from_document(Json::parse(doc.dump()));
    CHECK(back.table == b.table);
    CHECK(back.scenario == b.scenario);
    CHECK(to_document(back) == doc);

    for (const auto &e : {lgi3(), lgi_stationary(1), eq31_expression()}) {
        const auto d = to_document(e);
        const auto r = expression_from_document(Json::parse(d.dump()));
        CHECK(to_document(r) == d);
        CHECK(r.coefficients() == e.coefficients());
        CHECK(r.sense == e.sense);
    }
}

TEST_CASE("machine documents round-trip") {
    Rng rng(4);
    ClassicalMachine c{{"0", "1"}, {"a", "b"}, RVector::Unit(2, 1), {}};
    for (int s = 0; s < 2; ++s) {
        RMatrix t0 = RMatrix::Constant(2, 2, 0.25);
        c.transfer.push_back({t0, t0});
    }
    const auto cd = to_document(c);
    const auto cback = std::get<ClassicalMachine>(machine_from_document(Json::parse(cd.dump())));
    CHECK(to_document(cback) == cd);

    QuantumMachine q{{kNoInput}, {"0", "1"}, random_state(2, rng), {random_instrument(2, {"0", "1"}, 2, rng)}};
    const auto qd = to_document(q);
    const auto qback = std::get<QuantumMachine>(machine_from_document(Json::parse(qd.dump())));
    CHECK(to_document(qback) == qd);
    CHECK(machine_probability(qback, {"0", "1", "1"}) == doctest::Approx(machine_probability(q, {"0", "1", "1"})));
}

TEST_CASE("malformed documents are input errors") {
    auto doc = to_document(lgi3());
    doc["extra"] = 1;
    CHECK_THROWS_AS((void)expression_from_document(doc), InputError);

    auto nested = to_document(lgi3());
    nested["scenario"]["colour"] = "red";
    CHECK_THROWS_AS((void)expression_from_document(nested), InputError);

    auto version = to_document(Scenario::leggett_garg(2));
    version["format_version"] = 99;
    CHECK_THROWS_AS((void)scenario_from_document(version), InputError);

    auto nokind = to_document(Scenario::leggett_garg(2));
    nokind.erase("kind");
    CHECK_THROWS_AS((void)document_kind(nokind), InputError);

    CHECK_THROWS_AS((void)behavior_from_document(to_document(lgi3())), InputError);

    auto bad = to_document(test::fig2_model(), {});
    bad["instruments"]["z"]["kraus"][0][0][0][0] = Json::array({2.0, 0.0});
    CHECK_THROWS_AS((void)model_from_document(bad), InputError);

    auto unnormalized = to_document(behavior_from_model(test::fig2_model(), std::vector<SettingSeq>{{"z", "x"}}));
    unnormalized["table"][0]["distribution"][0]["p"] = 0.9;
    CHECK_THROWS_AS((void)behavior_from_document(unnormalized), InputError);

    auto wrong_type = to_document(lgi3());
    wrong_type["terms"][0]["coefficient"] = "one";
    CHECK_THROWS_AS((void)expression_from_document(wrong_type), InputError);
}

TEST_CASE("reports carry the header") {
    const auto r = report_document("dc", Json{{"complexity", 2}});
    CHECK(r["kind"] == "report");
    CHECK(report_from_document(r)["complexity"] == 2);
    CHECK_THROWS_AS((void)report_from_document(to_document(lgi3())), InputError);
}
