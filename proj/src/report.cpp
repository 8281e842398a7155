#include "hofer/report.hpp"
#include "hofer/types.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hofer {

namespace {

using json = nlohmann::ordered_json;

// JSON has no NaN/Inf; encode them as strings so round trips stay lossless.
json encode(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double decode(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::invalid_argument, "bad number string '" + s + "'");
    }
    return j.get<double>();
}

}  // namespace

void Report::add_scalar(const std::string& name, double value, double error) { scalars[name] = Scalar{value, error}; }

double Report::scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end()) throw Error(ErrorCode::invalid_argument, "report has no scalar '" + name + "'");
    return it->second.value;
}

Verdict& Report::check_le(const std::string& name, double value, double threshold, const std::string& detail) {
    verdicts.push_back(Verdict{name, value <= threshold, value, threshold, "<=", detail});
    return verdicts.back();
}

Verdict& Report::check_ge(const std::string& name, double value, double threshold, const std::string& detail) {
    verdicts.push_back(Verdict{name, value >= threshold, value, threshold, ">=", detail});
    return verdicts.back();
}

Verdict& Report::check(const std::string& name, bool passed, const std::string& detail) {
    verdicts.push_back(Verdict{name, passed, passed ? 1.0 : 0.0, 1.0, "bool", detail});
    return verdicts.back();
}

const Verdict* Report::find_verdict(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

bool Report::all_passed() const {
    for (const auto& v : verdicts)
        if (!v.passed) return false;
    return true;
}

void Report::absorb(const Report& other, const std::string& prefix) {
    for (const auto& [k, s] : other.scalars) scalars[prefix + k] = s;
    for (auto v : other.verdicts) {
        v.name = prefix + v.name;
        verdicts.push_back(v);
    }
    for (const auto& [k, c] : other.curves) curves[prefix + k] = c;
    for (const auto& n : other.notes) notes.push_back(n);
}

nlohmann::ordered_json Report::to_json(bool include_runtime) const {
    json j;
    j["schema"] = schema_id;
    j["experiment"] = experiment;
    j["version"] = version;
    j["config"] = config;
    json sc = json::object();
    for (const auto& [k, s] : scalars) sc[k] = json{{"value", encode(s.value)}, {"error", encode(s.error)}};
    j["scalars"] = sc;
    json vs = json::array();
    for (const auto& v : verdicts)
        vs.push_back(json{{"name", v.name},
                          {"passed", v.passed},
                          {"value", encode(v.value)},
                          {"threshold", encode(v.threshold)},
                          {"relation", v.relation},
                          {"detail", v.detail}});
    j["verdicts"] = vs;
    j["passed"] = all_passed();
    j["citations"] = citations;
    json cs = json::object();
    for (const auto& [k, c] : curves) {
        json rows = json::array();
        for (const auto& r : c.rows) {
            json row = json::array();
            for (double x : r) row.push_back(encode(x));
            rows.push_back(row);
        }
        cs[k] = json{{"columns", c.columns}, {"rows", rows}};
    }
    j["curves"] = cs;
    j["notes"] = notes;
    for (const auto& [k, v] : results.items()) {
        if (j.contains(k) || k == "runtime_s") throw Error(ErrorCode::internal, "result key '" + k + "' is reserved");
        j[k] = v;
    }
    if (include_runtime) j["runtime_s"] = runtime_s;
    return j;
}

Report Report::from_json(const nlohmann::ordered_json& j) {
    if (j.value("schema", std::string()) != schema_id)
        throw Error(ErrorCode::invalid_argument, "unknown report schema");
    Report r;
    r.experiment = j.at("experiment").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config");
    for (const auto& [k, s] : j.at("scalars").items()) r.scalars[k] = Scalar{decode(s.at("value")), decode(s.at("error"))};
    for (const auto& v : j.at("verdicts"))
        r.verdicts.push_back(Verdict{v.at("name").get<std::string>(), v.at("passed").get<bool>(), decode(v.at("value")),
                                     decode(v.at("threshold")), v.at("relation").get<std::string>(),
                                     v.at("detail").get<std::string>()});
    r.citations = j.at("citations").get<std::vector<std::string>>();
    for (const auto& [k, c] : j.at("curves").items()) {
        Curve cv;
        cv.columns = c.at("columns").get<std::vector<std::string>>();
        for (const auto& row : c.at("rows")) {
            std::vector<double> rr;
            for (const auto& x : row) rr.push_back(decode(x));
            cv.rows.push_back(rr);
        }
        r.curves[k] = cv;
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("runtime_s")) r.runtime_s = j.at("runtime_s").get<double>();
    static const char* reserved[] = {"schema", "experiment", "version", "config", "scalars", "verdicts", "passed",
                                     "citations", "curves", "notes", "runtime_s"};
    for (const auto& [k, v] : j.items())
        if (std::find(std::begin(reserved), std::end(reserved), k) == std::end(reserved)) r.results[k] = v;
    return r;
}

std::string Report::curve_csv(const std::string& name) const {
    auto it = curves.find(name);
    if (it == curves.end()) throw Error(ErrorCode::invalid_argument, "report has no curve '" + name + "'");
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < it->second.columns.size(); ++i) os << (i ? "," : "") << it->second.columns[i];
    os << "\n";
    for (const auto& row : it->second.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

}  // namespace hofer
