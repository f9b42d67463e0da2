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

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "tempocorr/automata.hpp"
#include "tempocorr/io.hpp"
#include "tempocorr/moment.hpp"
#include "tempocorr/mr.hpp"
#include "tempocorr/seesaw.hpp"

using namespace tempocorr;

namespace {

struct Globals {
    bool json = false;
    bool no_runtime = false;
    std::string output;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

LabelSeq split(const std::string &s, char sep) {
    LabelSeq out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

OutcomeSeq parse_sequence(const std::string &s) {
    if (s.find(',') != std::string::npos) {
        return split(s, ',');
    }
    OutcomeSeq q;
    for (char c : s) {
        q.push_back(std::string(1, c));
    }
    return q;
}

void emit(const Globals &g, const std::string &command, Json body, Clock::time_point start,
          const std::function<void(const Json &)> &human) {
    if (!g.no_runtime) {
        body["runtime_s"] = seconds_since(start);
    }
    const auto doc = report_document(command, body);
    if (!g.output.empty()) {
        save_json(g.output, doc);
    }
    if (g.json) {
        std::cout << doc.dump(2) << "\n";
    } else {
        human(doc);
        if (!g.no_runtime) {
            fmt::print("runtime: {:.3f} s\n", body["runtime_s"].get<double>());
        }
    }
}

Json terms_json(const LinearExpression &e) {
    Json out = Json::array();
    for (const auto &[key, c] : e.coefficients()) {
        if (c != 0.0) {
            out.push_back(Json{{"settings", key.first}, {"outcomes", key.second}, {"coefficient", c}});
        }
    }
    return out;
}

int cmd_simulate(const Globals &g, const std::string &model_path, const std::vector<std::string> &sequences,
                 std::size_t all_length) {
    const auto md = model_from_document(load_json(model_path));
    std::vector<SettingSeq> schedule;
    if (all_length > 0) {
        schedule = md.model.scenario(all_length).all_setting_sequences();
    }
    for (const auto &s : sequences) {
        schedule.push_back(split(s, ','));
    }
    const auto b = behavior_from_model(md.model, schedule, md.outcome_values);
    const auto doc = to_document(b);
    if (!g.output.empty()) {
        save_json(g.output, doc);
        if (!g.json) {
            fmt::print("wrote {} sequences to {}\n", b.table.size(), g.output);
            return 0;
        }
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_certify(const Globals &g, const std::string &path, double tol) {
    const auto start = Clock::now();
    const auto b = behavior_from_document(load_json(path));
    Json body;
    body["tolerance"] = tol;

    const auto aot = check_aot(b, tol);
    Json aot_json{{"pass", aot.ok()}, {"checked", aot.checked.size()}, {"max_deviation", aot.max_deviation()}};
    Json aot_violations = Json::array();
    for (const auto &v : aot.violations()) {
        aot_violations.push_back(Json{{"first", v.first}, {"second", v.second}, {"prefix_length", v.prefix_length},
                                      {"deviation", v.deviation}});
    }
    aot_json["violations"] = aot_violations;
    Json untestable = Json::array();
    for (const auto &u : aot.untestable) {
        untestable.push_back(Json{{"settings", u.settings}, {"position", u.position}, {"reason", u.reason}});
    }
    aot_json["untestable"] = untestable;
    body["aot"] = aot_json;

    const auto nsit = check_nsit(b, tol);
    Json nsit_json{{"pass", nsit.ok()}, {"checked", nsit.checked.size()}};
    Json by_position = Json::object();
    for (const auto &[pos, dev] : nsit.max_by_position()) {
        by_position[std::to_string(pos)] = dev;
    }
    nsit_json["max_deviation_by_position"] = by_position;
    Json nsit_untestable = Json::array();
    for (const auto &u : nsit.untestable) {
        nsit_untestable.push_back(Json{{"settings", u.settings}, {"position", u.position}, {"reason", u.reason}});
    }
    nsit_json["untestable"] = nsit_untestable;
    body["nsit"] = nsit_json;

    Json mr;
    try {
        const auto r = is_macrorealist(b);
        mr["status"] = r.accepted ? "accepted" : "rejected";
        mr["distance"] = r.distance;
        mr["max_residual"] = r.max_residual;
        if (r.certificate) {
            mr["certificate"] = Json{{"terms", terms_json(r.certificate->inequality)},
                                     {"bound", *r.certificate->inequality.classical_bound},
                                     {"value", r.certificate->value},
                                     {"margin", r.certificate->margin()}};
        }
    } catch (const AotViolationError &e) {
        mr["status"] = "not applicable";
        mr["reason"] = e.what();
    }
    body["mr"] = mr;

    Json witnesses = Json::object();
    if (b.scenario.length >= 3 && b.scenario.has_setting("1")) {
        try {
            const auto e = lgi_n(b.scenario.length);
            witnesses["lgi"] = Json{{"value", evaluate(e, b)}, {"classical_bound", *e.classical_bound}};
        } catch (const Error &) {
        }
    }
    body["witnesses"] = witnesses;

    emit(g, "certify", body, start, [](const Json &d) {
        fmt::print("AoT:  {} (max deviation {:.3e}, {} untestable)\n", d["aot"]["pass"] ? "pass" : "FAIL",
                   d["aot"]["max_deviation"].get<double>(), d["aot"]["untestable"].size());
        fmt::print("NSIT: {}\n", d["nsit"]["pass"] ? "pass" : "FAIL");
        for (const auto &[pos, dev] : d["nsit"]["max_deviation_by_position"].items()) {
            fmt::print("  position {}: max deviation {:.6g}\n", pos, dev.get<double>());
        }
        fmt::print("MR:   {}\n", d["mr"]["status"].get<std::string>());
        if (d["mr"].contains("certificate")) {
            const auto &c = d["mr"]["certificate"];
            fmt::print("  certificate value {:.9g} against bound {:.9g} (margin {:.6g})\n", c["value"].get<double>(),
                       c["bound"].get<double>(), c["margin"].get<double>());
        }
        if (d["witnesses"].contains("lgi")) {
            fmt::print("LGI:  {:.9g} (classical bound {:.9g})\n", d["witnesses"]["lgi"]["value"].get<double>(),
                       d["witnesses"]["lgi"]["classical_bound"].get<double>());
        }
    });
    return 0;
}

struct BoundOptions {
    std::string expression;
    std::string cls;
    std::size_t dim = 0;
    std::size_t length = 0;
    std::uint64_t seed = 1;
    int restarts = 50;
};

int cmd_bound(const Globals &g, const BoundOptions &o) {
    const auto start = Clock::now();
    const auto expr = expression_from_document(load_json(o.expression));
    Json body{{"expression", expr.name}, {"class", o.cls}, {"sense", expr.sense == Sense::upper ? "upper" : "lower"}};
    const bool needs_dim = o.cls == "classical-d" || o.cls == "quantum-d";
    if (needs_dim && o.dim == 0) {
        throw InputError("--dim is required for " + o.cls);
    }
    OptimizerConfig cfg;
    cfg.seed = o.seed;
    cfg.restarts = o.restarts;
    auto stats_json = [](const RestartStats &s) {
        return Json{{"restarts", s.restarts}, {"hits", s.hits}, {"best", s.best}, {"median", s.median},
                    {"worst", s.worst}};
    };
    if (o.cls == "mr" || o.cls == "aot") {
        const auto r = classical_bound(expr, o.cls == "mr" ? ClassicalModel::macrorealist : ClassicalModel::aot);
        body["value"] = r.value;
        body["method"] = "enumeration";
        body["certification"] = "exhaustive";
    } else if (o.cls == "qproj") {
        const auto r = max_expression_projective(expr, o.length ? std::optional<std::size_t>(o.length) : std::nullopt);
        body["value"] = r.value;
        body["level"] = r.level;
        body["method"] = "SDP";
        body["certification"] = "relaxation";
    } else if (o.cls == "classical-d") {
        const auto r = max_expression_classical(expr, o.dim, cfg);
        body["value"] = r.value;
        body["dim"] = o.dim;
        body["method"] = r.method;
        body["certification"] = to_string(r.certification);
        body["seed"] = o.seed;
        body["stats"] = stats_json(r.stats);
        body["machine"] = to_document(r.machine);
    } else if (o.cls == "quantum-d") {
        QuantumSearchConfig qc;
        qc.optimizer = cfg;
        const auto r = max_expression_quantum_seesaw(expr, static_cast<int>(o.dim), qc);
        body["value"] = r.value;
        body["dim"] = o.dim;
        body["method"] = "see-saw";
        body["certification"] = "none";
        body["seed"] = o.seed;
        body["stats"] = stats_json(r.stats);
        body["machine"] = to_document(r.machine);
    } else {
        throw InputError("unknown bound class '" + o.cls + "'");
    }
    emit(g, "bound", body, start, [](const Json &d) {
        fmt::print("{} [{}]: {:.9f}\n", d["expression"].get<std::string>(), d["class"].get<std::string>(),
                   d["value"].get<double>());
        fmt::print("method: {}, certification: {}\n", d["method"].get<std::string>(),
                   d["certification"].get<std::string>());
        if (d.contains("seed")) {
            fmt::print("seed: {}\n", d["seed"].get<std::uint64_t>());
        }
    });
    return 0;
}

int cmd_dc(const Globals &g, const std::string &sequence, const std::string &outputs) {
    const auto start = Clock::now();
    const auto q = parse_sequence(sequence);
    const auto dc = deterministic_complexity(q, split(outputs, ','));
    Json body{{"sequence", q},
              {"complexity", dc.complexity},
              {"tail", dc.tail},
              {"period", dc.period},
              {"minimality_checked", dc.minimality_checked},
              {"machine", to_document(dc.machine)}};
    emit(g, "dc", body, start, [](const Json &d) {
        fmt::print("DC = {} (tail {}, period {}, minimality {})\n", d["complexity"].get<std::size_t>(),
                   d["tail"].get<std::size_t>(), d["period"].get<std::size_t>(),
                   d["minimality_checked"].get<bool>() ? "checked" : "not checked");
    });
    return 0;
}

int cmd_clock(const Globals &g, const std::string &path, std::size_t t_max, const std::string &tick) {
    const auto start = Clock::now();
    const auto machine = machine_from_document(load_json(path));
    const auto ticks =
        std::visit([&](const auto &m) { return machine_tick_distribution(m, t_max, tick); }, machine);
    const auto acc = clock_accuracy(ticks);
    Json body{{"t_max", t_max}, {"p", ticks.p}, {"tail", ticks.tail}, {"mean", acc.mean}, {"variance", acc.variance}};
    body["deterministic"] = acc.deterministic();
    body["accuracy"] = acc.accuracy ? Json(*acc.accuracy) : Json(nullptr);
    emit(g, "clock", body, start, [](const Json &d) {
        const auto &p = d["p"];
        fmt::print("{:>6}  {}\n", "t", "p(t)");
        for (std::size_t t = 0; t < p.size(); ++t) {
            if (p[t].get<double>() > 0.0) {
                fmt::print("{:>6}  {:.12g}\n", t + 1, p[t].get<double>());
            }
        }
        fmt::print("tail mass {:.3e}\nmean {:.12g}\nvariance {:.12g}\n", d["tail"].get<double>(),
                   d["mean"].get<double>(), d["variance"].get<double>());
        if (d["deterministic"].get<bool>()) {
            fmt::print("accuracy: deterministic clock\n");
        } else {
            fmt::print("accuracy R = {:.12g}\n", d["accuracy"].get<double>());
        }
    });
    return 0;
}

int cmd_export_sdp(const Globals &g, const std::string &path, std::size_t length) {
    const auto expr = expression_from_document(load_json(path));
    const auto mm = build_moment_matrix(expr.scenario, length ? length : measured_length(expr));
    const auto sdp = expression_sdp(expr, mm);
    const auto comment = fmt::format("{}: value = {} + {} * objective, moment level {}", expr.name, sdp.offset,
                                     sdp.sign, mm.level);
    if (g.output.empty()) {
        conic::write_sdpa(std::cout, sdp.problem, comment);
    } else {
        std::ofstream out(g.output);
        if (!out) {
            throw InputError("cannot write " + g.output);
        }
        conic::write_sdpa(out, sdp.problem, comment);
    }
    return 0;
}

int error_exit(const std::string &type, const std::string &message, int code) {
    std::cerr << Json{{"error", Json{{"type", type}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Temporal correlation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_flag("--json", g.json, "Print the report as JSON");
    app.add_flag("--no-runtime", g.no_runtime, "Leave runtimes out of reports");
    app.add_option("-o,--output", g.output, "Also write the document to this file");

    std::string model_path;
    std::vector<std::string> sequences;
    std::size_t all_length = 0;
    auto *sim = app.add_subcommand("simulate", "Behavior of a quantum model over a schedule");
    sim->add_option("model", model_path, "Model document")->required();
    sim->add_option("--sequence", sequences, "Setting sequence, comma separated (repeatable)");
    sim->add_option("--all", all_length, "Every setting sequence of this length");

    std::string behavior_path;
    double tol = 1e-9;
    auto *cert = app.add_subcommand("certify", "AoT, NSIT and macrorealism checks of a behavior");
    cert->add_option("behavior", behavior_path, "Behavior document")->required();
    cert->add_option("--tol", tol, "Deviation tolerance");

    BoundOptions bo;
    auto *bound = app.add_subcommand("bound", "Bound an expression over a model class");
    bound->add_option("expression", bo.expression, "Expression document")->required();
    bound->add_option("--class", bo.cls, "mr, aot, qproj, classical-d or quantum-d")
        ->required()
        ->check(CLI::IsMember({"mr", "aot", "qproj", "classical-d", "quantum-d"}));
    bound->add_option("--dim", bo.dim, "Machine dimension for the d classes");
    bound->add_option("--length", bo.length, "Moment level for qproj");
    bound->add_option("--seed", bo.seed, "Optimizer seed");
    bound->add_option("--restarts", bo.restarts, "Optimizer restarts");

    std::string sequence;
    std::string outputs = "0,1";
    auto *dc = app.add_subcommand("dc", "Deterministic complexity of an output sequence");
    dc->add_option("sequence", sequence, "Sequence such as 010101, or comma separated labels")->required();
    dc->add_option("--outputs", outputs, "Output alphabet, comma separated");

    std::string machine_path;
    std::size_t t_max = 1000;
    std::string tick = "1";
    auto *clock = app.add_subcommand("clock", "First-tick distribution and accuracy of a machine");
    clock->add_option("machine", machine_path, "Machine document")->required();
    clock->add_option("--tmax", t_max, "Number of steps");
    clock->add_option("--tick", tick, "Tick output label");

    std::string sdp_expression;
    std::size_t sdp_length = 0;
    auto *sdp = app.add_subcommand("export-sdp", "Moment SDP of an expression in SDPA sparse format");
    sdp->add_option("expression", sdp_expression, "Expression document")->required();
    sdp->add_option("--length", sdp_length, "Moment level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return error_exit("usage", e.what(), 2);
    }

    try {
        if (*sim) {
            return cmd_simulate(g, model_path, sequences, all_length);
        }
        if (*cert) {
            return cmd_certify(g, behavior_path, tol);
        }
        if (*bound) {
            return cmd_bound(g, bo);
        }
        if (*dc) {
            return cmd_dc(g, sequence, outputs);
        }
        if (*clock) {
            return cmd_clock(g, machine_path, t_max, tick);
        }
        return cmd_export_sdp(g, sdp_expression, sdp_length);
    } catch (const SizeGuardError &e) {
        return error_exit("size_guard", e.what(), 4);
    } catch (const InvariantError &e) {
        return error_exit("invariant", e.what(), 3);
    } catch (const SolverError &e) {
        return error_exit("solver", e.what(), 3);
    } catch (const MissingDataError &e) {
        return error_exit("missing_data", e.what(), 2);
    } catch (const StructuralError &e) {
        return error_exit("structural", e.what(), 2);
    } catch (const InputError &e) {
        return error_exit("input", e.what(), 2);
    } catch (const Error &e) {
        return error_exit("error", e.what(), 2);
    }
}
