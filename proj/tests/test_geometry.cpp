#include <doctest.h>

#include "hofer/geometry.hpp"

#include <cmath>
#include <random>

using namespace hofer;

TEST_CASE("omega on canonical basis and antisymmetry") {
    auto M = ManifoldSpec::euclidean(1);
    Vec x = vec2(0.3, -0.2);
    CHECK(omega_eval(M, x, vec2(1, 0), vec2(0, 1)) == doctest::Approx(1.0));
    CHECK(omega_eval(M, x, vec2(0.4, 0.7), vec2(0.4, 0.7)) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    for (auto Mk : {ManifoldSpec::euclidean(2), ManifoldSpec::torus2(), ManifoldSpec::cylinder()}) {
        for (int k = 0; k < 50; ++k) {
            Vec a(Mk.dim()), b(Mk.dim()), y1(Mk.dim()), y2(Mk.dim());
            for (int i = 0; i < Mk.dim(); ++i) {
                a[i] = U(rng);
                b[i] = U(rng);
                y1[i] = U(rng);
                y2[i] = U(rng);
            }
            CHECK(omega_eval(Mk, y1, a, b) == -omega_eval(Mk, y1, b, a));
            // constant in x
            CHECK(omega_eval(Mk, y1, a, b) == omega_eval(Mk, y2, a, b));
        }
    }
}

TEST_CASE("sphere omega matches the cross-product formula") {
    auto S = ManifoldSpec::sphere2();
    CHECK(omega_eval(S, vec3(0, 0, 1), vec3(1, 0, 0), vec3(0, 1, 0)) == doctest::Approx(1.0));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for (int k = 0; k < 50; ++k) {
        Eigen::Vector3d x(N(rng), N(rng), N(rng));
        x.normalize();
        Eigen::Vector3d a(N(rng), N(rng), N(rng)), b(N(rng), N(rng), N(rng));
        a -= x * x.dot(a);
        b -= x * x.dot(b);
        const double oracle = b.dot(x.cross(a));
        Vec X = vec3(x.x(), x.y(), x.z()), A = vec3(a.x(), a.y(), a.z()), B = vec3(b.x(), b.y(), b.z());
        CHECK(omega_eval(S, X, A, B) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(omega_eval(S, X, A, B) == -omega_eval(S, X, B, A));
    }
    CHECK_THROWS_AS(omega_eval(S, vec3(0, 0, 1), vec3(0, 0, 1), vec3(1, 0, 0)), Error);
}

TEST_CASE("mean values") {
    auto T = ManifoldSpec::torus2();
    auto g = sample_grid(T, 16);
    CHECK(mean_value(T, [](const Vec&) { return 2.5; }, g) == doctest::Approx(2.5));
    CHECK(std::abs(mean_value(T, [](const Vec& x) { return std::sin(2 * pi * x[0]); }, g)) < 1e-10);
    CHECK(std::abs(mean_value(T, [](const Vec& x) { return 0.3 + std::cos(2 * pi * x[1] + 0.4) - std::sin(2 * pi * x[0]); }, g) - 0.3) < 1e-10);
    auto S = ManifoldSpec::sphere2();
    auto gs = sample_grid(S, 16);
    CHECK(std::abs(mean_value(S, [](const Vec& x) { return x[2]; }, gs)) < 1e-6);
    CHECK_THROWS_AS(mean_value(ManifoldSpec::cylinder(), [](const Vec&) { return 1.0; }, g), Error);
}

TEST_CASE("grids") {
    auto g = sample_grid(ManifoldSpec::torus2(), 8);
    CHECK(g.size() == 64);
    for (double w : g.weights) CHECK(w == doctest::Approx(1.0 / 64));

    for (int k : {4, 7, 16}) {
        auto S = ManifoldSpec::sphere2();
        auto gs = sample_grid(S, k);
        CHECK(gs.size() == static_cast<std::size_t>(20 * k * k));
        CHECK(std::abs(gs.total_weight() - 4 * pi) / (4 * pi) < 1e-6);
        for (const auto& p : gs.points) CHECK(std::abs(p.norm() - 1.0) < 1e-12);
    }
    auto gn = sample_grid(ManifoldSpec::normalized_sphere2(), 8);
    CHECK(gn.total_weight() == doctest::Approx(1.0).epsilon(1e-10));

    Box box{{{0, 1}, {0, 1}}};
    auto ge = sample_grid(ManifoldSpec::euclidean(1), 10, box);
    CHECK(ge.size() == 100);
    CHECK(ge.total_weight() == doctest::Approx(1.0));

    CHECK_THROWS_AS(sample_grid(ManifoldSpec::torus2(), 3), Error);
    CHECK_THROWS_AS(sample_grid(ManifoldSpec::torus2(), 8, Box{{{0.5, 1.5}, {0, 1}}}), Error);
    CHECK_THROWS_AS(sample_grid(ManifoldSpec::sphere2(), 8, Box{{{0, 1}, {0, 1}}}), Error);
}

TEST_CASE("distances respect periodicity") {
    auto T = ManifoldSpec::torus2();
    CHECK(distance(T, vec2(0.05, 0.5), vec2(0.95, 0.5)) == doctest::Approx(0.1));
    auto C = ManifoldSpec::cylinder();
    CHECK(distance(C, vec2(0.0, 0.02), vec2(0.0, 0.98)) == doctest::Approx(0.04));
    CHECK(distance(C, vec2(-0.4, 0.0), vec2(0.4, 0.0)) == doctest::Approx(0.8));
}
