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

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "tempocorr/automata.hpp"
#include "tempocorr/behavior.hpp"
#include "tempocorr/quantum.hpp"

namespace tempocorr {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

enum class DocumentKind { scenario, model, behavior, expression, machine, report };
std::string to_string(DocumentKind kind);

/// Reads and parses a JSON file; InputError on I/O or syntax problems.
Json load_json(const std::filesystem::path &path);
void save_json(const std::filesystem::path &path, const Json &doc);

/// Kind tag of a document after checking format_version.
DocumentKind document_kind(const Json &doc);

/// Documents carry format_version and kind; parsing rejects unknown fields and reports every problem as
/// InputError, including numerical invariants of the decoded objects.
Json to_document(const Scenario &scenario);
Json to_document(const QuantumSequenceModel &model, const std::map<Label, double> &outcome_values = {});
Json to_document(const Behavior &behavior);
Json to_document(const LinearExpression &expr);
Json to_document(const ClassicalMachine &machine);
Json to_document(const QuantumMachine &machine);

Scenario scenario_from_document(const Json &doc);

struct ModelDocument {
    QuantumSequenceModel model;
    std::map<Label, double> outcome_values;
};
ModelDocument model_from_document(const Json &doc);
Behavior behavior_from_document(const Json &doc);
LinearExpression expression_from_document(const Json &doc);

using Machine = std::variant<ClassicalMachine, QuantumMachine>;
Machine machine_from_document(const Json &doc);

/// Report body with the document header prepended.
Json report_document(const std::string &command, const Json &body);
/// Checks the header of a report and returns it unchanged.
Json report_from_document(const Json &doc);

/// Complex matrices are arrays of rows of [re, im] pairs.
Json to_json(const CMatrix &m);
CMatrix complex_matrix_from_json(const Json &j);

}  // namespace tempocorr
