#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace hofer {

struct Scalar {
    double value = 0.0;
    double error = 0.0;  // error bar, 0 when not estimated
};

struct Verdict {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=", ">=", "==", "bool"
    std::string detail;
};

struct Curve {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Report {
    static constexpr const char* schema_id = "hofer-lab.report/1";

    std::string experiment;
    std::string version;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::map<std::string, Scalar> scalars;
    std::vector<Verdict> verdicts;
    std::vector<std::string> citations;
    std::map<std::string, Curve> curves;
    std::vector<std::string> notes;
    // Headline values, written as extra top-level keys of the JSON (e.g. "flux": [dp, dq]).
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    double runtime_s = 0.0;

    void add_scalar(const std::string& name, double value, double error = 0.0);
    double scalar(const std::string& name) const;

    Verdict& check_le(const std::string& name, double value, double threshold, const std::string& detail = "");
    Verdict& check_ge(const std::string& name, double value, double threshold, const std::string& detail = "");
    Verdict& check(const std::string& name, bool passed, const std::string& detail = "");
    const Verdict* find_verdict(const std::string& name) const;

    bool all_passed() const;
    // Merges scalars (prefixed), verdicts (prefixed), curves and notes of another report.
    void absorb(const Report& other, const std::string& prefix);

    nlohmann::ordered_json to_json(bool include_runtime = true) const;
    static Report from_json(const nlohmann::ordered_json& j);
    std::string curve_csv(const std::string& name) const;
};

}  // namespace hofer
