#include "hofer/lagrangian.hpp"
#include "hofer/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace hofer;

TEST_CASE("Liouville pairing of planar cycles") {
    for (double r : {0.3, 1.0, 2.5}) CHECK(std::abs(liouville_pairing(circle_cycle(r, 512, 0.4, -1.0)) - pi * r * r) < 1e-6);
    CHECK(std::abs(liouville_pairing(figure_eight_cycle())) < 1e-6);
    CHECK(std::abs(liouville_pairing(named_cycle("zero_section", {{"r", 2.0}}))) < 1e-12);

    // clockwise traversal flips the sign
    const ParametrizedCycle cw = sample_cycle([](double s) { return vec2(std::cos(2 * pi * s), -std::sin(2 * pi * s)); });
    CHECK(liouville_pairing(cw) == doctest::Approx(-pi).epsilon(1e-9));

    // orientation-preserving reparametrization
    auto ellipse = [](double s) { return vec2(1.5 * std::cos(2 * pi * s), 0.7 * std::sin(2 * pi * s) + 0.2 * std::cos(4 * pi * s)); };
    const double a0 = liouville_pairing(sample_cycle(ellipse, 1024));
    const double a1 = liouville_pairing(
        sample_cycle([&](double s) { return ellipse(s + 0.08 * std::sin(2 * pi * s)); }, 1024));
    CHECK(std::abs(a0 - a1) < 1e-8);
    CHECK(a0 == doctest::Approx(pi * 1.5 * 0.7).epsilon(1e-9));

    // a circle in the (p1, q1) plane of R^4 plus a loop in the (p2, q2) plane
    const ParametrizedCycle c4 = sample_cycle([](double s) {
        Vec x(4);
        x << std::cos(2 * pi * s), 0.5 * std::cos(2 * pi * s), std::sin(2 * pi * s), 0.5 * std::sin(2 * pi * s);
        return x;
    });
    CHECK(liouville_pairing(c4) == doctest::Approx(pi * 1.25).epsilon(1e-9));

    CHECK_THROWS_AS(liouville_pairing(sample_cycle([](double s) { return vec2(s, s * s); }, 512)), Error);
    CHECK_THROWS_AS(liouville_pairing(circle_cycle(1.0, 64)), Error);
    CHECK_THROWS_AS(named_cycle("spiral"), Error);
}

TEST_CASE("cycles from CSV") {
    const std::string path = "lagrangian_cycle_test.csv";
    {
        std::ofstream out(path);
        out << "p,q\n";
        const int n = 400;
        for (int k = 0; k <= n; ++k) out << std::cos(2 * pi * k / n) * 0.5 << "," << std::sin(2 * pi * k / n) * 0.5 << "\n";
    }
    const ParametrizedCycle c = read_cycle_csv(path);
    CHECK(c.size() == 401);
    CHECK(liouville_pairing(c) == doctest::Approx(pi * 0.25).epsilon(1e-6));
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_cycle_csv("no/such/file.csv"), Error);
}

TEST_CASE("rationality constant of split tori") {
    auto check_ratio = [](double x, long long p, long long q) {
        const auto r = rational_approximation(x);
        REQUIRE(r.has_value());
        CHECK(r->first == p);
        CHECK(r->second == q);
    };
    check_ratio(0.75, 3, 4);
    check_ratio(355.0 / 113.0, 355, 113);
    CHECK_FALSE(rational_approximation(std::sqrt(2.0)).has_value());
    CHECK_FALSE(rational_approximation(pi).has_value());

    for (double r : {0.5, 1.0, 3.0}) {
        const auto g = gamma_split_torus({r, r, r});
        REQUIRE(g.has_value());
        CHECK(*g == doctest::Approx(pi * r * r).epsilon(1e-12));
    }
    CHECK_FALSE(gamma_split_torus({1.0, std::cbrt(2.0)}).has_value());
    const auto two = gamma_split_torus({1.0, std::sqrt(2.0)});
    REQUIRE(two.has_value());
    CHECK(*two == doctest::Approx(pi).epsilon(1e-12));

    // areas pi/4 and pi/9 span (pi/36) Z
    const auto g = gamma_split_torus({0.5, 1.0 / 3.0});
    REQUIRE(g.has_value());
    CHECK(*g == doctest::Approx(pi / 36.0).epsilon(1e-12));

    // gamma(k radii) = k^2 gamma(radii)
    for (double k : {0.5, 2.0, 3.0}) {
        const auto a = gamma_split_torus({0.5, 1.0 / 3.0}), b = gamma_split_torus({0.5 * k, k / 3.0});
        REQUIRE(b.has_value());
        CHECK(*b == doctest::Approx(k * k * *a).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma_split_torus({1.0, -1.0}), Error);
}

TEST_CASE("suspension map") {
    const SuspensionMap still{catalog("zero"), [](double u) { return vec2(u, 0.3); }, -1.0, "zero"};
    const SuspensionPoint a = suspension(still, vec2(0.2, 0.3), 0.6);
    CHECK((a.y - vec2(0.2, 0.3)).norm() < 1e-15);
    CHECK(a.r == 0.0);
    CHECK(a.t == 0.6);
    CHECK(isotropy_residual(still) < 1e-8);

    const SuspensionMap eq = equator_rotation_suspension();
    for (double t : {0.0, 0.3, 0.9}) {
        const SuspensionPoint p = suspension(eq, eq.base(0.17), t);
        CHECK(std::abs(p.r) < 1e-12);
        CHECK(std::abs(p.y[2]) < 1e-12);
    }
    const SuspensionMap mer = meridian_rotation_suspension();
    const Vec x = mer.base(0.1);
    const SuspensionPoint p0 = suspension(mer, x, 0.0);
    CHECK(p0.r == doctest::Approx(-mer.H(x, 0.0)));

    const Report rep = suspension_isotropy_check(eq);
    CHECK(rep.all_passed());
    CHECK(rep.scalar("isotropy_residual") <= 1e-5);
    CHECK(suspension_isotropy_check(mer).all_passed());

    // wrong r-sign: the residual becomes 2 dH(h_* xi), nonzero off the equator
    SuspensionMap broken = mer;
    broken.r_sign = 1.0;
    CHECK(isotropy_residual(broken) >= 1e-2);
    CHECK_FALSE(suspension_isotropy_check(broken).all_passed());

    // residual shrinks under step halving
    const double r1 = isotropy_residual(mer, 16, 8, 1e-2), r2 = isotropy_residual(mer, 16, 8, 5e-3);
    CHECK(r2 < r1);

    // a half-turn is not a loop
    SuspensionMap half = eq;
    half.H = catalog("rotation_k", {{"k", 0.5}});
    CHECK(suspension_loop_defect(half) > 1.0);
    CHECK_FALSE(suspension_isotropy_check(half).all_passed());
}

TEST_CASE("exactness integral of loop homotopies") {
    const Vec x = vec3(0.36, 0.48, 0.8);
    CHECK(exactness_integral(constant_family(ManifoldSpec::sphere2()), x, 0.4).value == 0.0);

    // the family's H generates its h: d/dt h = sgrad H_{t,s}
    const LoopFamily fam = tilted_axis_family(1.1);
    for (double s : {0.0, 0.5, 1.0}) {
        Hamiltonian slice;
        slice.manifold = fam.manifold;
        slice.value = [&fam, s](const Vec& y, double t) { return fam.H(y, t, s); };
        const double t = 0.37, h = 1e-5;
        const Vec y = fam.h(x, t, s);
        const Vec v = (fam.h(x, t + h, s) - fam.h(x, t - h, s)) / (2 * h);
        CHECK((v - sgrad(slice, y, t)).norm() < 1e-6);
    }

    for (double s : {0.0, 0.25, 0.6, 1.0}) {
        for (const Vec& y : {x, vec3(1, 0, 0), vec3(0, 0.6, -0.8)}) {
            const ExactnessResult r = exactness_integral(fam, y, s);
            CHECK(r.is_loop);
            CHECK(std::abs(r.value) <= 1e-5);
        }
    }

    const LoopFamily drift = tilted_axis_family(1.1, 0.5);
    CHECK_THROWS_AS(exactness_integral(drift, x, 0.5), Error);
    const ExactnessResult bad = exactness_integral(drift, x, 0.5, false);
    CHECK_FALSE(bad.is_loop);
    CHECK(std::abs(bad.value) >= 1e-2);
}

TEST_CASE("annulus area bookkeeping") {
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 16);
    const AnnulusArea flat = annulus_area(catalog("zero"), 0.1, tg);
    CHECK(flat.area == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(flat.defect < 1e-12);

    const ManifoldSpec S = ManifoldSpec::normalized_sphere2();
    const Hamiltonian rot = catalog("rotation_1", {{"area_scale", S.area_scale}});
    const AnnulusArea turn = annulus_area(rot, 0.01, sample_grid(S, 12));
    CHECK(std::abs(turn.area - 2.04) < 2e-3);
    CHECK(turn.defect < 1e-9);

    // time-dependent loop data: brute-force oracle on the defined a_+, a_-
    const Hamiltonian sh = catalog("shear_p", {{"beta", 0.6}, {"amplitude", 0.9}});
    const AnnulusArea A = annulus_area(sh, 0.05, tg);
    double oracle = 0.0;
    const int n = 4001;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * i / (n - 1);
        const double c = t <= 1.0 ? 1.0 + 0.6 * std::sin(2 * pi * t) : 1.0 + 0.6 * std::sin(2 * pi * (2.0 - t));
        const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) * 2.0 / (n - 1);
        oracle += w * (2.0 * c * 0.9 / (2 * pi) + 2 * 0.05);
    }
    CHECK(A.area == doctest::Approx(oracle).epsilon(1e-6));

    for (const Vec& y : {vec3(0.6, 0.0, 0.8), vec3(0, 1, 0)}) CHECK(std::abs(doubling_integral(rot, y)) < 1e-12);
    CHECK(std::abs(doubling_integral(sh, vec2(0.3, 0.1))) < 1e-9);
}
