#include <doctest.h>

#include "hofer/flow.hpp"

#include <cmath>
#include <thread>

using namespace hofer;

namespace {

FlowOptions opts(Scheme s, double step = 1e-3) {
    FlowOptions o;
    o.scheme = s;
    o.step = step;
    return o;
}

}  // namespace

TEST_CASE("translation generator moves q by u") {
    auto H = catalog("translation_gen", {{"u", 0.37}});
    for (auto s : {Scheme::rk4, Scheme::implicit_midpoint}) {
        Vec y = flow_point(H, vec2(0.2, -0.1), 0, 1, opts(s));
        CHECK(std::abs(y[0] - 0.2) < 1e-9);
        CHECK(std::abs(y[1] - 0.27) < 1e-9);
    }
}

TEST_CASE("full turn on the sphere and oscillator phase") {
    auto F = catalog("rotation_1");
    Vec x = vec3(0.6, 0.0, 0.8);
    CHECK((flow_point(F, x, 0, 1, opts(Scheme::rk4)) - x).norm() < 1e-5);
    CHECK((flow_point(F, x, 0, 1, opts(Scheme::implicit_midpoint, 2.5e-4)) - x).norm() < 1e-5);

    auto osc = catalog("oscillator", {{"lambda", 1.0}});
    Vec z0 = vec2(0.3, 0.4);
    Vec z = flow_point(osc, z0, 0, 0.25, opts(Scheme::rk4));
    // e^{i pi/2} z0
    CHECK(std::abs(z[0] + 0.4) < 1e-6);
    CHECK(std::abs(z[1] - 0.3) < 1e-6);
}

TEST_CASE("default scheme choice") {
    CHECK(default_flow_options(catalog("oscillator")).scheme == Scheme::implicit_midpoint);
    CHECK(default_flow_options(catalog("shear_p", {{"beta", 0.3}})).scheme == Scheme::rk4);
}

TEST_CASE("order and composition") {
    auto F = catalog("tilted_height");
    Vec x = vec2(0.13, 0.29);
    for (auto s : {Scheme::rk4, Scheme::implicit_midpoint}) {
        const double h = 1e-2;
        Vec a = flow_point(F, x, 0, 1, opts(s, h));
        Vec b = flow_point(F, x, 0, 1, opts(s, h / 2));
        Vec c = flow_point(F, x, 0, 1, opts(s, h / 4));
        const double e1 = (a - b).norm(), e2 = (b - c).norm();
        // order >= 2: halving the step cuts the change by at least 4 (16 allows round-off slack for rk4)
        CHECK(e2 <= e1 / 3.5);
        Vec y = flow_point(F, flow_point(F, x, 0, 0.4, opts(s)), 0.4, 1.0, opts(s));
        Vec z = flow_point(F, x, 0, 1.0, opts(s));
        CHECK((y - z).norm() < 1e-9);
    }
}

TEST_CASE("backward-forward identity and escapes") {
    auto F = catalog("shear_q", {{"amplitude", 0.7}, {"beta", 0.4}});
    FlowMap f(F, opts(Scheme::rk4));
    auto g = sample_grid(ManifoldSpec::torus2(), 8);
    double worst = 0;
    for (const auto& x : g.points) worst = std::max(worst, (f.inverse(f(x, 0.8), 0.8) - x).norm());
    CHECK(worst < 1e-6);

    auto H = catalog("translation_gen", {{"u", 1.0}});
    FlowOptions o = opts(Scheme::rk4);
    o.chart_box = Box{{{-1, 1}, {-1, 1}}};
    CHECK_THROWS_AS(flow_point(H, vec2(0, 0.5), 0, 1, o), Error);
}

TEST_CASE("implicit midpoint non-convergence is reported") {
    auto F = catalog("oscillator", {{"lambda", 200.0}});
    FlowOptions o = opts(Scheme::implicit_midpoint, 0.5);
    CHECK_THROWS_AS(flow_point(F, vec2(1, 0), 0, 1, o), Error);
}

TEST_CASE("monodromy") {
    const double lam = 0.7;
    auto F = catalog("oscillator", {{"lambda", lam}});
    auto mm = monodromy(F, vec2(0, 0), 1.0);
    for (double t : {0.0, 0.31, 0.5, 1.0}) {
        Mat M = mm.at(t);
        const double a = 2 * pi * lam * t;
        Mat R(2, 2);
        R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        CHECK((M - R).norm() < 1e-6);
        CHECK(std::abs(M.determinant() - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(monodromy(F, vec2(0.5, 0), 1.0), Error);
    // vanishing Hessian on the flat top of a bump
    auto B = catalog("radial_bump", {{"inner", 0.3}, {"outer", 0.6}});
    auto mb = monodromy(B, vec2(0.0, 0.5), 1.0);
    CHECK((mb.at(1.0) - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("time-reversed monodromy is the inverse") {
    auto F = catalog("tilted_height");
    Vec x = vec2(0.21, 0.12);
    Mat M = linearized_flow(F, x, 0, 0.6);
    Vec y = flow_point(F, x, 0, 0.6, opts(Scheme::rk4));
    Mat Mb = linearized_flow(F, y, 0.6, 0);
    CHECK((Mb - M.inverse()).norm() < 1e-5);
}

TEST_CASE("symplecticity and conservation audits") {
    auto osc = catalog("oscillator", {{"lambda", 1.0}});
    auto g = sample_grid(ManifoldSpec::euclidean(1), 4, Box{{{-1, 1}, {-1, 1}}});
    FlowMap mid(osc, opts(Scheme::implicit_midpoint));
    CHECK(symplecticity_report(mid, g, 1.0).scalar("max_residual") <= 1e-6);
    FlowMap rk(osc, opts(Scheme::rk4, 0.05));
    const double drift = symplecticity_report(rk, g, 1.0).scalar("max_residual");
    CHECK(drift > 1e-12);
    auto Z = catalog("zero");
    FlowMap id(Z, opts(Scheme::rk4));
    CHECK(symplecticity_report(id, sample_grid(ManifoldSpec::torus2(), 4), 1.0).scalar("max_residual") < 1e-9);

    CHECK(conservation_report(mid, vec2(0.3, -0.5), 1.0).scalar("max_energy_drift") <= 1e-9);
    CHECK(conservation_report(id, vec2(0.3, 0.5), 1.0).scalar("max_energy_drift") == 0.0);
    auto R = catalog("rotation_1");
    FlowMap fr(R, opts(Scheme::implicit_midpoint));
    Vec x = vec3(0.36, 0.48, 0.8);
    double worst = 0;
    for (const auto& p : integrate_flow(R, x, 0, 1, fr.options()).points) worst = std::max(worst, std::abs(p[2] - x[2]));
    CHECK(worst <= 1e-6);
    auto td = catalog("shear_p", {{"beta", 0.5}});
    FlowMap ft(td, opts(Scheme::rk4));
    CHECK_THROWS_AS(conservation_report(ft, vec2(0.1, 0.1), 1.0), Error);
}

TEST_CASE("sphere symplecticity on a grid") {
    auto F = catalog("height", {{"ax", 1.0}, {"az", 0.5}});
    FlowMap f(F, opts(Scheme::rk4));
    auto g = sample_grid(ManifoldSpec::sphere2(), 4);
    CHECK(symplecticity_report(f, g, 0.7).scalar("max_residual") < 1e-6);
}

TEST_CASE("trajectory cache is shared across threads") {
    auto F = catalog("tilted_height");
    const FlowMap f(F, opts(Scheme::rk4));
    std::vector<std::thread> pool;
    std::vector<double> ends(8);
    for (int i = 0; i < 8; ++i)
        pool.emplace_back([&, i] { ends[i] = f.trajectory(vec2(0.1 * (i % 2), 0.2), 0.5).back()[0]; });
    for (auto& t : pool) t.join();
    CHECK(f.cache_size() == 2);
    CHECK(ends[0] == ends[2]);
}
