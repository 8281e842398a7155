#pragma once

#include "hofer/report.hpp"
#include "hofer/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hofer {

using Json = nlohmann::ordered_json;

struct Experiment {
    std::string id;        // e.g. "square-energy"
    std::string module;    // CLI group, e.g. "hofer"
    std::string command;   // CLI name inside the group, e.g. "square-energy"
    std::string citation;  // what the run reproduces
    Json defaults;         // every accepted key with its default; the type of the default is enforced
    std::string csv_curve; // curve written by --csv
    std::function<Report(const Json&)> run;
};

const std::vector<Experiment>& experiments();

// By id, or by (module, command). Error (config) when unknown.
const Experiment& find_experiment(const std::string& id);
const Experiment& find_experiment(const std::string& module, const std::string& command);

// Defaults overlaid with `overrides`. Unknown keys and mistyped values raise Error (config).
// String values are accepted for numeric and boolean keys when they parse completely.
Json resolve_config(const Experiment& e, const Json& overrides);

// Resolves the config, runs, and stamps experiment id, version, config and citation.
Report run_experiment(const std::string& id, const Json& overrides = Json::object());

enum ExitCode { exit_pass = 0, exit_verdict_failed = 1, exit_config = 2, exit_numerical = 3 };

int exit_code(const Report& r);
int exit_code(const Error& e);

std::string version_string();

}  // namespace hofer
