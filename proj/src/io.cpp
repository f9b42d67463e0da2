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

#include "tempocorr/io.hpp"

#include <fstream>
#include <set>

#include "tempocorr/errors.hpp"

namespace tempocorr {

namespace {

void check_keys(const Json &j, std::initializer_list<const char *> required, std::initializer_list<const char *> optional,
                const std::string &where) {
    if (!j.is_object()) {
        throw InputError(where + " must be an object");
    }
    std::set<std::string> known;
    for (const auto *k : required) {
        if (!j.contains(k)) {
            throw InputError(where + " lacks field '" + k + "'");
        }
        known.insert(k);
    }
    known.insert(optional.begin(), optional.end());
    for (const auto &[k, v] : j.items()) {
        if (!known.count(k)) {
            throw InputError(where + " has unknown field '" + k + "'");
        }
    }
}

const Json &array_at(const Json &j, const char *key, const std::string &where) {
    const auto &a = j.at(key);
    if (!a.is_array()) {
        throw InputError(where + "." + key + " must be an array");
    }
    return a;
}

LabelSeq labels(const Json &j) {
    if (!j.is_array()) {
        throw InputError("label list must be an array of strings");
    }
    LabelSeq out;
    for (const auto &x : j) {
        out.push_back(x.get<std::string>());
    }
    return out;
}

Json header(DocumentKind kind) { return Json{{"format_version", kFormatVersion}, {"kind", to_string(kind)}}; }

void expect_kind(const Json &doc, DocumentKind kind) {
    if (document_kind(doc) != kind) {
        throw InputError("expected a " + to_string(kind) + " document, got " + to_string(document_kind(doc)));
    }
}

// Converts every failure while decoding into InputError.
template <class F>
auto decoding(const std::string &what, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError &) {
        throw;
    } catch (const Json::exception &e) {
        throw InputError(what + ": " + e.what());
    } catch (const Error &e) {
        throw InputError(what + ": " + e.what());
    }
}

Json complex_vector_json(const CVector &v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v[i].real(), v[i].imag()});
    }
    return out;
}

cplx complex_from_json(const Json &j) {
    if (!j.is_array() || j.size() != 2) {
        throw InputError("complex numbers are [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

CVector complex_vector_from_json(const Json &j) {
    if (!j.is_array()) {
        throw InputError("vector must be an array");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
    }
    return v;
}

Json real_matrix_json(const RMatrix &m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        out.push_back(row);
    }
    return out;
}

RMatrix real_matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw InputError("matrix must be a nonempty array of rows");
    }
    RMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != j[0].size()) {
            throw InputError("matrix rows differ in length");
        }
        for (std::size_t c = 0; c < j[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

Json scenario_body(const Scenario &sc) {
    Json outcomes = Json::object();
    for (const auto &s : sc.settings) {
        outcomes[s] = sc.outcomes_of(s);
    }
    Json values = Json::object();
    for (const auto &[k, v] : sc.outcome_values) {
        values[k] = v;
    }
    return Json{{"length", sc.length},
                {"settings", sc.settings},
                {"outcomes", outcomes},
                {"no_measurement", sc.no_measurement ? Json(*sc.no_measurement) : Json(nullptr)},
                {"outcome_values", values}};
}

Scenario scenario_from_body(const Json &j) {
    check_keys(j, {"length", "settings", "outcomes"}, {"no_measurement", "outcome_values"}, "scenario");
    Scenario sc;
    sc.length = j.at("length").get<std::size_t>();
    sc.settings = labels(j.at("settings"));
    if (!j.at("outcomes").is_object()) {
        throw InputError("scenario.outcomes must map settings to outcome lists");
    }
    for (const auto &[k, v] : j.at("outcomes").items()) {
        sc.outcomes[k] = labels(v);
    }
    sc.no_measurement = std::nullopt;
    if (j.contains("no_measurement") && !j.at("no_measurement").is_null()) {
        sc.no_measurement = j.at("no_measurement").get<std::string>();
    }
    if (j.contains("outcome_values")) {
        for (const auto &[k, v] : j.at("outcome_values").items()) {
            sc.outcome_values[k] = v.get<double>();
        }
    }
    sc.validate();
    return sc;
}

Json instrument_body(const Instrument &inst) {
    Json kraus = Json::array();
    for (const auto &ops : inst.all_kraus()) {
        Json per = Json::array();
        for (const auto &k : ops) {
            per.push_back(to_json(k));
        }
        kraus.push_back(per);
    }
    return Json{{"outcomes", inst.outcomes()}, {"kraus", kraus}};
}

Instrument instrument_from_body(const Json &j) {
    check_keys(j, {"outcomes", "kraus"}, {}, "instrument");
    std::vector<std::vector<CMatrix>> kraus;
    for (const auto &per : array_at(j, "kraus", "instrument")) {
        if (!per.is_array() || per.empty()) {
            throw InputError("instrument.kraus entries must be nonempty lists of matrices");
        }
        std::vector<CMatrix> ops;
        for (const auto &k : per) {
            ops.push_back(complex_matrix_from_json(k));
        }
        kraus.push_back(std::move(ops));
    }
    return Instrument::create(labels(j.at("outcomes")), std::move(kraus));
}

QuantumState state_from_json(const Json &j) {
    if (j.is_object()) {
        check_keys(j, {"pure"}, {}, "initial");
        return QuantumState::pure(complex_vector_from_json(j.at("pure")));
    }
    return QuantumState::from_matrix(complex_matrix_from_json(j));
}

Json term_json(const Term &t) {
    return std::visit(
        [](const auto &x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ProbabilityTerm>) {
                return Json{{"type", "probability"},
                            {"coefficient", x.coefficient},
                            {"settings", x.settings},
                            {"outcomes", x.outcomes}};
            } else {
                return Json{{"type", "correlator"},
                            {"coefficient", x.coefficient},
                            {"settings", x.settings},
                            {"positions", x.positions}};
            }
        },
        t);
}

Term term_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("type")) {
        throw InputError("expression term needs a type");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "probability") {
        check_keys(j, {"type", "coefficient", "settings", "outcomes"}, {}, "probability term");
        return ProbabilityTerm{j.at("coefficient").get<double>(), labels(j.at("settings")), labels(j.at("outcomes"))};
    }
    if (type == "correlator") {
        check_keys(j, {"type", "coefficient", "settings"}, {"positions"}, "correlator term");
        return CorrelatorTerm{j.at("coefficient").get<double>(), labels(j.at("settings")),
                              j.value("positions", std::vector<std::size_t>{})};
    }
    throw InputError("unknown term type '" + type + "'");
}

}  // namespace

std::string to_string(DocumentKind kind) {
    switch (kind) {
        case DocumentKind::scenario:
            return "scenario";
        case DocumentKind::model:
            return "model";
        case DocumentKind::behavior:
            return "behavior";
        case DocumentKind::expression:
            return "expression";
        case DocumentKind::machine:
            return "machine";
        default:
            return "report";
    }
}

Json load_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void save_json(const std::filesystem::path &path, const Json &doc) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << doc.dump(2) << "\n";
}

DocumentKind document_kind(const Json &doc) {
    return decoding("document header", [&] {
        if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind")) {
            throw InputError("documents need format_version and kind");
        }
        if (doc.at("format_version").get<int>() != kFormatVersion) {
            throw InputError("unsupported format_version " + doc.at("format_version").dump());
        }
        const auto kind = doc.at("kind").get<std::string>();
        for (auto k : {DocumentKind::scenario, DocumentKind::model, DocumentKind::behavior, DocumentKind::expression,
                       DocumentKind::machine, DocumentKind::report}) {
            if (to_string(k) == kind) {
                return k;
            }
        }
        throw InputError("unknown document kind '" + kind + "'");
    });
}

Json to_json(const CMatrix &m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out.push_back(complex_vector_json(m.row(r).transpose()));
    }
    return out;
}

CMatrix complex_matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw InputError("matrix must be a nonempty array of rows");
    }
    CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != j[0].size()) {
            throw InputError("matrix rows differ in length");
        }
        m.row(static_cast<Eigen::Index>(r)) = complex_vector_from_json(j[r]).transpose();
    }
    return m;
}

Json to_document(const Scenario &scenario) {
    auto doc = header(DocumentKind::scenario);
    doc.update(scenario_body(scenario));
    return doc;
}

Scenario scenario_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::scenario);
    return decoding("scenario", [&] {
        Json body = doc;
        body.erase("format_version");
        body.erase("kind");
        return scenario_from_body(body);
    });
}

Json to_document(const QuantumSequenceModel &model, const std::map<Label, double> &outcome_values) {
    auto doc = header(DocumentKind::model);
    doc["initial"] = to_json(model.initial().matrix());
    Json instruments = Json::object();
    for (const auto &[s, inst] : model.instruments()) {
        if (model.declares_skip() && s == kSkip) {
            continue;
        }
        instruments[s] = instrument_body(inst);
    }
    doc["instruments"] = instruments;
    if (model.inter_step()) {
        Json kraus = Json::array();
        for (const auto &k : model.inter_step()->kraus) {
            kraus.push_back(to_json(k));
        }
        doc["inter_step"] = Json{{"kraus", kraus}};
    }
    doc["declare_skip"] = model.declares_skip();
    Json values = Json::object();
    for (const auto &[k, v] : outcome_values) {
        values[k] = v;
    }
    doc["outcome_values"] = values;
    return doc;
}

ModelDocument model_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::model);
    return decoding("model", [&] {
        check_keys(doc, {"format_version", "kind", "initial", "instruments"},
                   {"inter_step", "declare_skip", "outcome_values"}, "model");
        auto initial = state_from_json(doc.at("initial"));
        std::map<Label, Instrument> instruments;
        if (!doc.at("instruments").is_object()) {
            throw InputError("model.instruments must map settings to instruments");
        }
        for (const auto &[k, v] : doc.at("instruments").items()) {
            instruments.emplace(k, instrument_from_body(v));
        }
        std::optional<Channel> inter;
        if (doc.contains("inter_step")) {
            const auto &c = doc.at("inter_step");
            if (c.is_object() && c.contains("hamiltonian")) {
                check_keys(c, {"hamiltonian", "time"}, {}, "model.inter_step");
                inter = Channel::unitary(
                    evolution_operator(complex_matrix_from_json(c.at("hamiltonian")), c.at("time").get<double>()));
            } else {
                check_keys(c, {"kraus"}, {}, "model.inter_step");
                Channel ch;
                for (const auto &k : array_at(c, "kraus", "model.inter_step")) {
                    ch.kraus.push_back(complex_matrix_from_json(k));
                }
                if (ch.kraus.empty()) {
                    throw InputError("model.inter_step needs Kraus operators");
                }
                ch.dim = static_cast<int>(ch.kraus.front().rows());
                if (ch.trace_preservation_defect() > kTolerance) {
                    throw InputError("model.inter_step is not trace preserving");
                }
                inter = std::move(ch);
            }
        }
        ModelDocument out{QuantumSequenceModel(std::move(initial), std::move(instruments), std::move(inter),
                                               doc.value("declare_skip", true)),
                          {}};
        if (doc.contains("outcome_values")) {
            for (const auto &[k, v] : doc.at("outcome_values").items()) {
                out.outcome_values[k] = v.get<double>();
            }
        }
        return out;
    });
}

Json to_document(const Behavior &behavior) {
    auto doc = header(DocumentKind::behavior);
    doc["scenario"] = scenario_body(behavior.scenario);
    Json table = Json::array();
    for (const auto &[s, dist] : behavior.table) {
        Json entries = Json::array();
        for (const auto &[q, p] : dist) {
            entries.push_back(Json{{"outcomes", q}, {"p", p}});
        }
        table.push_back(Json{{"settings", s}, {"distribution", entries}});
    }
    doc["table"] = table;
    return doc;
}

Behavior behavior_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::behavior);
    return decoding("behavior", [&] {
        check_keys(doc, {"format_version", "kind", "scenario", "table"}, {}, "behavior");
        Behavior b{scenario_from_body(doc.at("scenario")), {}};
        for (const auto &row : array_at(doc, "table", "behavior")) {
            check_keys(row, {"settings", "distribution"}, {}, "behavior.table entry");
            const auto s = labels(row.at("settings"));
            if (b.table.count(s)) {
                throw InputError("behavior lists " + format_word(s) + " twice");
            }
            auto &dist = b.table[s];
            for (const auto &e : array_at(row, "distribution", "behavior.table entry")) {
                check_keys(e, {"outcomes", "p"}, {}, "distribution entry");
                dist[labels(e.at("outcomes"))] = e.at("p").get<double>();
            }
        }
        b.validate();
        return b;
    });
}

Json to_document(const LinearExpression &expr) {
    auto doc = header(DocumentKind::expression);
    doc["name"] = expr.name;
    doc["scenario"] = scenario_body(expr.scenario);
    Json terms = Json::array();
    for (const auto &t : expr.terms) {
        terms.push_back(term_json(t));
    }
    doc["terms"] = terms;
    doc["sense"] = expr.sense == Sense::upper ? "upper" : "lower";
    if (expr.classical_bound) {
        doc["classical_bound"] = *expr.classical_bound;
    }
    if (expr.quantum_bound) {
        doc["quantum_bound"] = *expr.quantum_bound;
    }
    return doc;
}

LinearExpression expression_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::expression);
    return decoding("expression", [&] {
        check_keys(doc, {"format_version", "kind", "scenario", "terms"},
                   {"name", "sense", "classical_bound", "quantum_bound"}, "expression");
        LinearExpression e;
        e.name = doc.value("name", std::string());
        e.scenario = scenario_from_body(doc.at("scenario"));
        for (const auto &t : array_at(doc, "terms", "expression")) {
            e.terms.push_back(term_from_json(t));
        }
        const auto sense = doc.value("sense", std::string("upper"));
        if (sense != "upper" && sense != "lower") {
            throw InputError("expression.sense must be upper or lower");
        }
        e.sense = sense == "upper" ? Sense::upper : Sense::lower;
        if (doc.contains("classical_bound")) {
            e.classical_bound = doc.at("classical_bound").get<double>();
        }
        if (doc.contains("quantum_bound")) {
            e.quantum_bound = doc.at("quantum_bound").get<double>();
        }
        e.validate();
        return e;
    });
}

Json to_document(const ClassicalMachine &machine) {
    auto doc = header(DocumentKind::machine);
    doc["type"] = "classical";
    doc["inputs"] = machine.inputs;
    doc["outputs"] = machine.outputs;
    doc["initial"] = std::vector<double>(machine.initial.begin(), machine.initial.end());
    Json transfer = Json::array();
    for (const auto &per : machine.transfer) {
        Json mats = Json::array();
        for (const auto &t : per) {
            mats.push_back(real_matrix_json(t));
        }
        transfer.push_back(mats);
    }
    doc["transfer"] = transfer;
    return doc;
}

Json to_document(const QuantumMachine &machine) {
    auto doc = header(DocumentKind::machine);
    doc["type"] = "quantum";
    doc["inputs"] = machine.inputs;
    doc["outputs"] = machine.outputs;
    doc["initial"] = to_json(machine.initial.matrix());
    Json instruments = Json::array();
    for (const auto &inst : machine.instruments) {
        instruments.push_back(instrument_body(inst));
    }
    doc["instruments"] = instruments;
    return doc;
}

Machine machine_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::machine);
    return decoding("machine", [&]() -> Machine {
        const auto type = doc.at("type").get<std::string>();
        if (type == "classical") {
            check_keys(doc, {"format_version", "kind", "type", "inputs", "outputs", "initial", "transfer"}, {},
                       "machine");
            ClassicalMachine m;
            m.inputs = labels(doc.at("inputs"));
            m.outputs = labels(doc.at("outputs"));
            const auto init = doc.at("initial").get<std::vector<double>>();
            m.initial = Eigen::Map<const RVector>(init.data(), static_cast<Eigen::Index>(init.size()));
            for (const auto &per : array_at(doc, "transfer", "machine")) {
                std::vector<RMatrix> mats;
                for (const auto &t : per) {
                    mats.push_back(real_matrix_from_json(t));
                }
                m.transfer.push_back(std::move(mats));
            }
            const auto report = m.validate();
            if (!report.ok()) {
                throw InputError("classical machine: " + report.summary());
            }
            return m;
        }
        if (type == "quantum") {
            check_keys(doc, {"format_version", "kind", "type", "inputs", "outputs", "initial", "instruments"}, {},
                       "machine");
            QuantumMachine m;
            m.inputs = labels(doc.at("inputs"));
            m.outputs = labels(doc.at("outputs"));
            m.initial = state_from_json(doc.at("initial"));
            for (const auto &inst : array_at(doc, "instruments", "machine")) {
                m.instruments.push_back(instrument_from_body(inst));
            }
            m.validate();
            return m;
        }
        throw InputError("machine.type must be classical or quantum");
    });
}

Json report_document(const std::string &command, const Json &body) {
    auto doc = header(DocumentKind::report);
    doc["command"] = command;
    doc.update(body);
    return doc;
}

Json report_from_document(const Json &doc) {
    expect_kind(doc, DocumentKind::report);
    if (!doc.contains("command") || !doc.at("command").is_string()) {
        throw InputError("report lacks a command");
    }
    return doc;
}

}  // namespace tempocorr
