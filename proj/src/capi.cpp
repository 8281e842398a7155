#include "hofer/hofer_lab.h"

#include "hofer/experiments.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

struct hofer_report {
    hofer::Report report;
    std::string csv_curve;
};

namespace {

thread_local std::string last_error;

hofer_status to_status(hofer::ErrorCode c) {
    switch (c) {
        case hofer::ErrorCode::invalid_argument: return HOFER_ERR_INVALID_ARGUMENT;
        case hofer::ErrorCode::unsupported: return HOFER_ERR_UNSUPPORTED;
        case hofer::ErrorCode::not_converged: return HOFER_ERR_NOT_CONVERGED;
        case hofer::ErrorCode::escape: return HOFER_ERR_ESCAPE;
        case hofer::ErrorCode::verification_failed: return HOFER_ERR_VERIFICATION_FAILED;
        case hofer::ErrorCode::config: return HOFER_ERR_CONFIG;
        case hofer::ErrorCode::internal: return HOFER_ERR_INTERNAL;
    }
    return HOFER_ERR_INTERNAL;
}

hofer_status fail(hofer_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

// Runs f, mapping exceptions to status codes.
template <class Fn>
hofer_status guarded(Fn&& f) {
    try {
        last_error.clear();
        f();
        return HOFER_OK;
    } catch (const hofer::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(HOFER_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(HOFER_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HOFER_ERR_INTERNAL, "unknown exception");
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

const hofer::Experiment* at(size_t i) {
    const auto& all = hofer::experiments();
    return i < all.size() ? &all[i] : nullptr;
}

}  // namespace

extern "C" {

const char* hofer_version(void) {
    static const std::string v = hofer::version_string();
    return v.c_str();
}

const char* hofer_last_error(void) { return last_error.c_str(); }

size_t hofer_experiment_count(void) { return hofer::experiments().size(); }

const char* hofer_experiment_id(size_t i) { return at(i) ? at(i)->id.c_str() : nullptr; }
const char* hofer_experiment_module(size_t i) { return at(i) ? at(i)->module.c_str() : nullptr; }
const char* hofer_experiment_command(size_t i) { return at(i) ? at(i)->command.c_str() : nullptr; }
const char* hofer_experiment_citation(size_t i) { return at(i) ? at(i)->citation.c_str() : nullptr; }

hofer_status hofer_experiment_defaults(const char* id, char** json_out) {
    if (!id || !json_out) return fail(HOFER_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *json_out = dup(hofer::find_experiment(id).defaults.dump()); });
}

hofer_status hofer_run(const char* id, const char* config_json, hofer_report** out) {
    if (!id || !out) return fail(HOFER_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        hofer::Json overrides = hofer::Json::object();
        if (config_json && *config_json) overrides = hofer::Json::parse(config_json);
        const hofer::Experiment& e = hofer::find_experiment(id);
        auto* r = new hofer_report{hofer::run_experiment(e.id, overrides), e.csv_curve};
        *out = r;
    });
}

void hofer_report_free(hofer_report* r) { delete r; }

int hofer_report_passed(const hofer_report* r) { return r ? (r->report.all_passed() ? 1 : 0) : -1; }

int hofer_report_exit_code(const hofer_report* r) {
    return r ? hofer::exit_code(r->report) : hofer::exit_numerical;
}

int hofer_status_exit_code(hofer_status s) {
    switch (s) {
        case HOFER_OK: return hofer::exit_pass;
        case HOFER_ERR_INVALID_ARGUMENT:
        case HOFER_ERR_UNSUPPORTED:
        case HOFER_ERR_CONFIG: return hofer::exit_config;
        default: return hofer::exit_numerical;
    }
}

hofer_status hofer_report_json(const hofer_report* r, int include_runtime, char** out) {
    if (!r || !out) return fail(HOFER_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = dup(r->report.to_json(include_runtime != 0).dump(2)); });
}

hofer_status hofer_report_curve_csv(const hofer_report* r, const char* name, char** out) {
    if (!r || !out) return fail(HOFER_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::string n = name ? name : r->csv_curve;
        if (n.empty()) {
            if (r->report.curves.empty())
                throw hofer::Error(hofer::ErrorCode::invalid_argument, "report has no curves");
            n = r->report.curves.begin()->first;
        }
        *out = dup(r->report.curve_csv(n));
    });
}

hofer_status hofer_report_scalar(const hofer_report* r, const char* name, double* out) {
    if (!r || !name || !out) return fail(HOFER_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = r->report.scalar(name); });
}

void hofer_string_free(char* s) { std::free(s); }

}  // extern "C"
