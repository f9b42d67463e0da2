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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tempocorr/automata.hpp"
#include "tempocorr/io.hpp"
#include "tempocorr/moment.hpp"
#include "tempocorr/mr.hpp"
#include "tempocorr/seesaw.hpp"
#include "tempocorr/steering.hpp"

namespace py = pybind11;
using namespace tempocorr;

namespace {

Json parse(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception &e) {
        throw InputError(e.what());
    }
}

std::string simulate(const std::string &model, const std::vector<SettingSeq> &schedule) {
    const auto md = model_from_document(parse(model));
    return to_document(behavior_from_model(md.model, schedule, md.outcome_values)).dump();
}

py::dict macrorealism(const std::string &behavior) {
    const auto b = behavior_from_document(parse(behavior));
    const auto r = is_macrorealist(b);
    py::dict out;
    out["accepted"] = r.accepted;
    out["distance"] = r.distance;
    out["max_residual"] = r.max_residual;
    if (r.certificate) {
        out["certificate"] = to_document(r.certificate->inequality).dump();
        out["certificate_value"] = r.certificate->value;
        out["certificate_bound"] = *r.certificate->inequality.classical_bound;
    }
    return out;
}

py::dict nsit(const std::string &behavior, double tol) {
    const auto r = check_nsit(behavior_from_document(parse(behavior)), tol);
    py::dict out;
    out["ok"] = r.ok();
    out["max_by_position"] = r.max_by_position();
    return out;
}

double evaluate_expression(const std::string &expr, const std::string &behavior) {
    return evaluate(expression_from_document(parse(expr)), behavior_from_document(parse(behavior)));
}

double classical_value(const std::string &expr, const std::string &model) {
    if (model != "macrorealist" && model != "aot") {
        throw InputError("model must be macrorealist or aot");
    }
    return classical_bound(expression_from_document(parse(expr)),
                           model == "aot" ? ClassicalModel::aot : ClassicalModel::macrorealist)
        .value;
}

double projective_bound(const std::string &expr, std::optional<std::size_t> level) {
    return max_expression_projective(expression_from_document(parse(expr)), level).value;
}

py::tuple export_sdp(const std::string &expr_text, std::optional<std::size_t> level) {
    const auto expr = expression_from_document(parse(expr_text));
    const auto mm = build_moment_matrix(expr.scenario, level ? *level : measured_length(expr));
    const auto sdp = expression_sdp(expr, mm);
    std::ostringstream out;
    conic::write_sdpa(out, sdp.problem, expr.name);
    return py::make_tuple(out.str(), sdp.offset, sdp.sign);
}

OptimizerConfig optimizer(int restarts, std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = seed;
    return cfg;
}

py::dict classical_search(const std::string &expr, std::size_t d, int restarts, std::uint64_t seed) {
    const auto r = max_expression_classical(expression_from_document(parse(expr)), d, optimizer(restarts, seed));
    py::dict out;
    out["value"] = r.value;
    out["certification"] = to_string(r.certification);
    out["machine"] = to_document(r.machine).dump();
    return out;
}

py::dict quantum_search(const std::string &expr, int d, int restarts, std::uint64_t seed) {
    QuantumSearchConfig cfg;
    cfg.optimizer = optimizer(restarts, seed);
    const auto r = max_expression_quantum_seesaw(expression_from_document(parse(expr)), d, cfg);
    py::dict out;
    out["value"] = r.value;
    out["machine"] = to_document(r.machine).dump();
    return out;
}

py::dict dc(const std::string &sequence) {
    OutcomeSeq q;
    for (char c : sequence) {
        q.push_back(std::string(1, c));
    }
    const auto r = deterministic_complexity(q);
    py::dict out;
    out["complexity"] = r.complexity;
    out["tail"] = r.tail;
    out["period"] = r.period;
    out["machine"] = to_document(r.machine).dump();
    return out;
}

py::dict clock_report(const std::string &machine, std::size_t t_max) {
    const auto m = machine_from_document(parse(machine));
    const auto ticks = std::visit([&](const auto &x) { return machine_tick_distribution(x, t_max); }, m);
    const auto acc = clock_accuracy(ticks);
    py::dict out;
    out["p"] = ticks.p;
    out["tail"] = ticks.tail;
    out["mean"] = acc.mean;
    out["variance"] = acc.variance;
    out["accuracy"] = acc.accuracy;
    return out;
}

py::dict steering(const std::vector<std::vector<CMatrix>> &members, double tol) {
    Assemblage a;
    for (std::size_t x = 0; x < members.size(); ++x) {
        a.inputs.push_back(std::to_string(x));
        LabelSeq outs;
        for (std::size_t k = 0; k < members[x].size(); ++k) {
            outs.push_back(std::to_string(k));
        }
        a.outcomes.push_back(outs);
    }
    a.members = members;
    const auto r = steering_check(a, tol);
    py::dict out;
    out["steerable"] = r.steerable;
    out["robustness"] = r.robustness;
    out["residual"] = r.residual;
    out["certificate"] = r.certificate;
    out["certificate_value"] = r.certificate_value;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the tempocorr library; documents are passed as JSON text.";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
    py::register_exception<MissingDataError>(m, "MissingDataError", base.ptr());
    py::register_exception<AotViolationError>(m, "AotViolationError", base.ptr());
    py::register_exception<SizeGuardError>(m, "SizeGuardError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());

    m.def("lgi", [](std::size_t n) { return to_document(lgi_n(n)).dump(); }, py::arg("n"));
    m.def("lgi_stationary", [](int branch) { return to_document(lgi_stationary(branch)).dump(); },
          py::arg("branch") = -1);
    m.def("eq31", [] { return to_document(eq31_expression()).dump(); });
    m.def("simulate", &simulate, py::arg("model"), py::arg("schedule"));
    m.def("macrorealism", &macrorealism, py::arg("behavior"));
    m.def("nsit", &nsit, py::arg("behavior"), py::arg("tol") = 1e-9);
    m.def("evaluate", &evaluate_expression, py::arg("expression"), py::arg("behavior"));
    m.def("classical_bound", &classical_value, py::arg("expression"), py::arg("model") = "macrorealist");
    m.def("projective_bound", &projective_bound, py::arg("expression"), py::arg("level") = std::nullopt);
    m.def("export_sdp", &export_sdp, py::arg("expression"), py::arg("level") = std::nullopt);
    m.def("max_expression_classical", &classical_search, py::arg("expression"), py::arg("d"),
          py::arg("restarts") = 50, py::arg("seed") = 1);
    m.def("max_expression_quantum", &quantum_search, py::arg("expression"), py::arg("d"), py::arg("restarts") = 50,
          py::arg("seed") = 1);
    m.def("deterministic_complexity", &dc, py::arg("sequence"));
    m.def("clock", &clock_report, py::arg("machine"), py::arg("t_max"));
    m.def("steering_check", &steering, py::arg("members"), py::arg("tol") = 1e-7);
}
