// hofer-lab: command-line runner over the C API.
//
//   hofer-lab list
//   hofer-lab <module> <experiment> [--key value ...] [--config FILE] [--json PATH] [--csv PATH]
//   hofer-lab run <experiment-id> [...]

#include "hofer/hofer_lab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int exit_config = 2;

int list() {
    for (size_t i = 0; i < hofer_experiment_count(); ++i)
        std::printf("%-22s %s %s  -- %s\n", hofer_experiment_id(i), hofer_experiment_module(i),
                    hofer_experiment_command(i), hofer_experiment_citation(i));
    return 0;
}

std::optional<std::string> lookup(const std::string& module, const std::string& command) {
    for (size_t i = 0; i < hofer_experiment_count(); ++i) {
        const std::string id = hofer_experiment_id(i);
        if (module == "run" ? id == command
                            : module == hofer_experiment_module(i) && (command == hofer_experiment_command(i) || command == id))
            return id;
    }
    return std::nullopt;
}

// "--key value" and "--key=value" pairs; a bare "--flag" means true.
bool parse_overrides(const std::vector<std::string>& args, Json& out) {
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.size() < 3 || a.compare(0, 2, "--") != 0) {
            std::cerr << "error: unexpected argument '" << a << "'\n";
            return false;
        }
        std::string key = a.substr(2);
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            out[key.substr(0, eq)] = key.substr(eq + 1);
        } else if (i + 1 < args.size() && args[i + 1].compare(0, 2, "--") != 0) {
            out[key] = args[++i];
        } else {
            out[key] = "true";
        }
    }
    return true;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
    return bool(f);
}

int fail(hofer_status s) {
    std::cerr << "error: " << hofer_last_error() << "\n";
    return hofer_status_exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hofer geometry numerical laboratory"};
    app.allow_extras();
    app.set_version_flag("--version", std::string(hofer_version()));

    std::string module, command, json_path, csv_path, config_path;
    app.add_option("module", module, "module, 'list' or 'run'");
    app.add_option("experiment", command, "experiment within the module, or an id after 'run'");
    app.add_option("--json", json_path, "write the report here instead of stdout");
    app.add_option("--csv", csv_path, "write the experiment's curve as CSV");
    app.add_option("--config", config_path, "JSON file with config overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    if (module == "list") return list();
    if (module.empty() || command.empty()) {
        std::cerr << app.help() << "\n";
        return exit_config;
    }
    const auto id = lookup(module, command);
    if (!id) {
        std::cerr << "error: unknown experiment '" << module << " " << command << "' (see 'hofer-lab list')\n";
        return exit_config;
    }

    Json overrides = Json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "error: cannot read " << config_path << "\n";
            return exit_config;
        }
        try {
            overrides = Json::parse(f);
        } catch (const std::exception& e) {
            std::cerr << "error: " << config_path << ": " << e.what() << "\n";
            return exit_config;
        }
        if (!overrides.is_object()) {
            std::cerr << "error: " << config_path << " must hold a JSON object\n";
            return exit_config;
        }
    }
    if (!parse_overrides(app.remaining(), overrides)) return exit_config;

    hofer_report* r = nullptr;
    if (hofer_status s = hofer_run(id->c_str(), overrides.dump().c_str(), &r); s != HOFER_OK) return fail(s);

    char* text = nullptr;
    if (hofer_status s = hofer_report_json(r, 1, &text); s != HOFER_OK) {
        hofer_report_free(r);
        return fail(s);
    }
    int rc = hofer_report_exit_code(r);
    if (json_path.empty()) {
        std::cout << text << "\n";
    } else {
        if (!write_file(json_path, std::string(text) + "\n")) {
            std::cerr << "error: cannot write " << json_path << "\n";
            rc = exit_config;
        }
        const Json j = Json::parse(text);
        for (const auto& v : j.at("verdicts"))
            std::cout << (v.at("passed").get<bool>() ? "PASS " : "FAIL ") << v.at("name").get<std::string>() << "\n";
    }
    hofer_string_free(text);

    if (!csv_path.empty() && rc != exit_config) {
        char* csv = nullptr;
        if (hofer_status s = hofer_report_curve_csv(r, nullptr, &csv); s != HOFER_OK) {
            hofer_report_free(r);
            return fail(s);
        }
        if (!write_file(csv_path, csv)) {
            std::cerr << "error: cannot write " << csv_path << "\n";
            rc = exit_config;
        }
        hofer_string_free(csv);
    }
    hofer_report_free(r);
    return rc;
}
