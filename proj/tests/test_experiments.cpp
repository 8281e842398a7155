#include "hofer/experiments.hpp"

#include <doctest.h>

#include <set>

using namespace hofer;

TEST_CASE("registry") {
    const auto& all = experiments();
    CHECK(all.size() >= 16);
    std::set<std::string> ids, pairs;
    for (const Experiment& e : all) {
        CHECK(ids.insert(e.id).second);
        CHECK(pairs.insert(e.module + " " + e.command).second);
        CHECK_FALSE(e.citation.empty());
        CHECK(e.defaults.is_object());
    }
    CHECK(ids.count("flux-gamma"));
    CHECK(ids.count("morse-homology"));
    CHECK(find_experiment("hofer", "square-energy").id == "square-energy");
    CHECK(find_experiment("flux", "flux-gamma").id == "flux-gamma");
    CHECK_THROWS_AS(find_experiment("nope"), Error);
    CHECK_THROWS_AS(find_experiment("hofer", "nope"), Error);
}

TEST_CASE("config resolution") {
    const Experiment& e = find_experiment("square-energy");
    const Json c = resolve_config(e, Json{{"u", "0.25"}});
    CHECK(c.at("u").get<double>() == 0.25);
    CHECK(c.at("eps").get<double>() == 0.01);

    auto code = [&](const Experiment& x, const Json& o) {
        try {
            resolve_config(x, o);
        } catch (const Error& err) {
            return exit_code(err);
        }
        return -1;
    };
    CHECK(code(e, Json{{"v", 1}}) == exit_config);
    CHECK(code(e, Json{{"u", "half"}}) == exit_config);
    CHECK(code(e, Json{{"u", "0.5x"}}) == exit_config);
    CHECK(code(e, Json::array()) == exit_config);
    CHECK(code(find_experiment("growth-delta"), Json{{"n", 2.5}}) == exit_config);
    CHECK(code(find_experiment("growth-delta"), Json{{"candidates", 3}}) == exit_config);
    CHECK(resolve_config(find_experiment("growth-delta"), Json{{"n", "6"}}).at("n").get<int>() == 6);
}

TEST_CASE("square energy and conjugate scan") {
    const Report r = run_experiment("square-energy", Json{{"u", 0.5}});
    CHECK(r.all_passed());
    CHECK(r.scalar("hofer_length") <= 0.26);
    CHECK(exit_code(r) == exit_pass);
    CHECK(r.config.at("u").get<double>() == 0.5);
    CHECK(r.experiment == "square-energy");
    CHECK(r.citations.size() == 1);

    const Report s = run_experiment("conjugate-scan", Json{{"lambda", 0.5}});
    CHECK(s.all_passed());
    CHECK(s.results.at("roots").empty());

    // roots at T = k / lambda
    const Report t = run_experiment("conjugate-scan", Json{{"lambda", 2.0}});
    CHECK(t.all_passed());
    REQUIRE(t.results.at("roots").size() == 2);
    CHECK(t.results.at("roots")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(t.results.at("roots")[1].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("failing verdicts and errors map to exit codes") {
    // translations cannot bring delta of a bump below 1/2
    const Report r = run_experiment("growth-delta", Json{{"bound", 0.4}});
    CHECK_FALSE(r.all_passed());
    CHECK(exit_code(r) == exit_verdict_failed);

    try {
        run_experiment("morse-homology", Json{{"surface", "sphere2"}, {"function", "tilted_height"}});
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(exit_code(e) == exit_config);
    }
    CHECK(exit_code(Error(ErrorCode::not_converged, "x")) == exit_numerical);
    CHECK(exit_code(Error(ErrorCode::verification_failed, "x")) == exit_numerical);
}

TEST_CASE("determinism and round trip") {
    for (const char* id : {"flux-path", "dbar-family", "morse-homology", "lemma-integral"}) {
        const Report a = run_experiment(id), b = run_experiment(id);
        CHECK(a.to_json(false).dump() == b.to_json(false).dump());
        const Report c = Report::from_json(a.to_json());
        CHECK(c.to_json().dump() == a.to_json().dump());
    }
    const Report f = run_experiment("flux-path", Json{{"map", "translate_q:0.37"}});
    const Json j = f.to_json();
    CHECK(j.at("flux")[0].get<double>() == doctest::Approx(0.37).epsilon(1e-9));
    CHECK(std::abs(j.at("flux")[1].get<double>()) < 1e-9);
    CHECK(j.at("schema").is_string());
    CHECK(j.at("version").get<std::string>() == version_string());
}
