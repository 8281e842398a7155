#include "hofer/dbar.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hofer;

TEST_CASE("dbar operator") {
    const Complex z(0.3, -0.2);
    CHECK(std::abs(dbar(conjugate_disc(), z)[0] - 1.0) < 1e-15);
    CHECK(std::abs(dbar(square_disc(), z)[0]) < 1e-15);
    for (double s : {0.0, 0.3, 0.9, 0.99})
        for (const Complex w : {Complex(0.1, 0.2), Complex(-0.9, 0.0), Complex(0.0, 0.99)})
            CHECK(std::abs(dbar(family_map(s), w)[0] - s) <= 1e-12);

    // difference mode agrees with the analytic derivatives
    DiscMap numeric = family_map(0.6);
    numeric.fx = nullptr;
    numeric.fy = nullptr;
    CHECK(std::abs(dbar(numeric, z, 1e-3)[0] - 0.6) < 1e-9);
    CHECK_THROWS_AS(dbar(numeric, Complex(0.9995, 0.0), 1e-3), Error);
}

TEST_CASE("area inequalities") {
    const DiscAreas id = areas(identity_disc());
    CHECK(id.symplectic == doctest::Approx(pi).epsilon(1e-12));
    CHECK(id.euclidean == doctest::Approx(pi).epsilon(1e-12));
    CHECK(std::abs(id.dbar_energy) < 1e-12);
    CHECK(id.report.all_passed());

    const DiscAreas bar = areas(conjugate_disc());
    CHECK(bar.symplectic == doctest::Approx(-pi).epsilon(1e-12));
    CHECK(bar.euclidean == doctest::Approx(pi).epsilon(1e-12));
    CHECK(bar.report.all_passed());

    const DiscAreas fs = areas(family_map(0.5));
    CHECK(fs.report.all_passed());
    CHECK(fs.report.scalar("slack_upper") >= 0.0);
    // dbar f_s = s, so the energy is 2 pi s^2
    CHECK(fs.dbar_energy == doctest::Approx(2 * pi * 0.25).epsilon(1e-9));
    // omega(f_s) = -pi s^2 + int |u'|^2 with the holomorphic part u
    CHECK(fs.euclidean >= std::abs(fs.symplectic) - 1e-9);

    // the pointwise inequalities on random vectors of C^2
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst_i = 1.0, worst_ii = 1.0;
    for (int k = 0; k < 1000; ++k) {
        CVec xi(2), eta(2);
        for (int j = 0; j < 2; ++j) {
            xi[j] = Complex(N(rng), N(rng));
            eta[j] = Complex(N(rng), N(rng));
        }
        worst_i = std::min(worst_i, dbar_bound_density(xi, eta) - area_density(xi, eta));
        worst_ii = std::min(worst_ii, area_density(xi, eta) - std::abs(omega_c(xi, eta)));
    }
    CHECK(worst_i >= -1e-12);
    CHECK(worst_ii >= -1e-12);
}

TEST_CASE("explicit family f_s") {
    CHECK(std::abs(family_eval(0.0, Complex(0.4, 0.3)) - 1.0) < 1e-15);
    CHECK(family_boundary_modulus_defect(0.7) <= 1e-9);
    for (double s : {0.1, 0.5, 0.9, 0.99}) {
        CHECK(family_boundary_degree(s) == 1);
        CHECK(std::abs(family_alpha(s)) > 1.0);
    }
    CHECK(family_deviation(0.99, 0.5, false) <= 0.1);
    // blow-up near -1: no uniform convergence
    const double near1 = family_deviation(0.9, 0.1, true), near2 = family_deviation(0.999, 0.1, true);
    CHECK(near1 > 1.0);
    CHECK(near2 > 1.0);
    CHECK_THROWS_AS(family_eval(1.0, 0.0), Error);
    CHECK_THROWS_AS(family_eval(0.5, Complex(-2.0, 0.0)), Error);

    const Curve c = real_section(0.9, 101);
    CHECK(c.rows.size() == 101);
    CHECK(c.rows.front()[1] == doctest::Approx(1.0));  // f_s(-1) = 1
}

TEST_CASE("boundary sigma") {
    CHECK(std::abs(boundary_sigma(constant_disc(Complex(0.3, 2.0))).sigma) < 1e-15);
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const SigmaResult r = boundary_sigma(family_map(s));
        CHECK(std::abs(r.sigma - s) <= 1e-6);
        CHECK(r.bounded);
        CHECK(std::abs(r.sigma) <= 1.0 + 1e-6);
    }
    // sigma of a non-holomorphic boundary datum: phi = conj(z) gives 1, phi = z gives 0
    CHECK(std::abs(boundary_sigma(conjugate_disc()).sigma - 1.0) < 1e-12);
    CHECK(std::abs(boundary_sigma(identity_disc()).sigma) < 1e-12);
}
