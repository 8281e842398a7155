#include "hofer/hofer.hpp"
#include "hofer/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace hofer;

namespace {

Hamiltonian constant_on(const ManifoldSpec& M, double c) {
    Hamiltonian F;
    F.manifold = M;
    F.value = [c](const Vec&, double) { return c; };
    F.name = "constant";
    return F;
}

PointSet cap_sample(const Eigen::Vector3d& center, double radius, int rings) {
    PointSet A;
    Eigen::Vector3d u = center.unitOrthogonal(), v = center.cross(u);
    for (int i = 0; i <= rings; ++i) {
        const double r = radius * i / rings;
        const int around = std::max(1, 6 * i);
        for (int j = 0; j < around; ++j) {
            const double a = 2.0 * pi * j / around;
            Eigen::Vector3d y = (center + std::tan(r) * (std::cos(a) * u + std::sin(a) * v)).normalized();
            A.points.push_back(vec3(y.x(), y.y(), y.z()));
        }
    }
    A.covering_radius = radius / rings;
    return A;
}

}  // namespace

TEST_CASE("linf and lp norms") {
    const Grid sg = sample_grid(ManifoldSpec::sphere2(), 16);
    CHECK(norm(catalog("height"), 0.0, NormKind::Linf(), sg) == doctest::Approx(2.0).epsilon(1e-3));

    const Grid tg = sample_grid(ManifoldSpec::torus2(), 32);
    CHECK(norm(constant_on(ManifoldSpec::torus2(), 3.5), 0.0, NormKind::Linf(), tg) == 0.0);
    CHECK(norm(constant_on(ManifoldSpec::torus2(), 1.0), 0.0, NormKind::Lp(2.0), tg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(norm(catalog("tilted_height"), 0.0, NormKind::Lp(0.5), tg), Error);
}

TEST_CASE("refinement recovers off-grid extrema") {
    // the maximum of the tilted height sits between grid nodes at coarse resolution
    const Hamiltonian F = catalog("tilted_height");
    const OscillationEstimate coarse = oscillation(F, 0.0, sample_grid(ManifoldSpec::torus2(), 8));
    const OscillationEstimate fine = oscillation(F, 0.0, sample_grid(ManifoldSpec::torus2(), 256), 40);
    CHECK(std::abs(coarse.value - fine.value) < 1e-6);
    CHECK(coarse.error >= 0.0);
}

TEST_CASE("path length") {
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 32);
    const Hamiltonian F = catalog("shear_p", {{"amplitude", 0.7}});
    const double c = oscillation(F, 0.0, tg).value;
    CHECK(path_length(F, {0, 1}, LengthKind::length_linf, tg) == doctest::Approx(c).epsilon(1e-12));

    const ManifoldSpec S = ManifoldSpec::normalized_sphere2();
    const Hamiltonian rot = catalog("rotation_1", {{"area_scale", S.area_scale}});
    CHECK(std::abs(path_length(rot, {0, 1}, LengthKind::length_linf, sample_grid(S, 12)) - 1.0) < 1e-3);

    // b(t) = 2t on [0, 1/2]
    const Hamiltonian G = catalog("shear_q", {{"amplitude", 0.4}, {"beta", 0.5}});
    const Hamiltonian Gb = reparametrize(G, TimeMap{[](double t) { return 2.0 * t; }, [](double) { return 2.0; }}, {0.0, 0.5});
    const double l0 = path_length(G, {0, 1}, LengthKind::length_linf, tg);
    const double l1 = path_length(Gb, {0, 0.5}, LengthKind::length_linf, tg);
    CHECK(std::abs(l0 - l1) < 1e-6);

    // vert0 never exceeds vert
    for (double beta : {0.0, 0.3, 0.9}) {
        const Hamiltonian H = catalog("shear_p", {{"beta", beta}, {"phase", 0.2}});
        CHECK(path_length(H, {0, 1}, LengthKind::vert0, tg) <= path_length(H, {0, 1}, LengthKind::vert, tg) + 1e-12);
    }
    CHECK_THROWS_AS(parse_length_kind("sup"), Error);
}

TEST_CASE("norm is invariant under symplectic changes of variables") {
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 64);
    const Hamiltonian H = catalog("tilted_height");
    const Hamiltonian psi_gen = catalog("shear_q", {{"amplitude", 0.3}});
    Hamiltonian Hpsi = H;
    Hpsi.gradient = nullptr;
    Hpsi.hessian = nullptr;
    Hpsi.value = [H, psi_gen](const Vec& x, double t) { return H(psi_gen.exact_flow(x, 1.0, 0.0), t); };
    const double a = norm(H, 0.0, NormKind::Linf(), tg), b = norm(Hpsi, 0.0, NormKind::Linf(), tg);
    CHECK(std::abs(a - b) < 1e-6);
    const double la = norm(H, 0.0, NormKind::Lp(2.0), sample_grid(ManifoldSpec::torus2(), 256));
    const double lb = norm(Hpsi, 0.0, NormKind::Lp(2.0), sample_grid(ManifoldSpec::torus2(), 256));
    CHECK(std::abs(la - lb) < 1e-3);
}

TEST_CASE("displacement test") {
    const FlowMap identity(catalog("zero"));
    PointSet A;
    for (int i = 0; i < 5; ++i) A.points.push_back(vec2(0.3 + 0.01 * i, 0.4));
    A.covering_radius = 0.005;
    CHECK_FALSE(displaces(identity, 1.0, A, 1e-3));
    CHECK_THROWS_AS(displaces(identity, 1.0, A, 0.0), Error);

    // half turn about the x3 axis carries an equatorial cap to the antipodal one
    const FlowMap half_turn(catalog("rotation_k", {{"k", 0.5}}));
    const PointSet cap = cap_sample(Eigen::Vector3d(1, 0, 0), 0.2, 6);
    const DisplacementTest d = displacement_test(half_turn, 1.0, cap, 1e-2);
    CHECK(d.displaced);
    // chordal distance between the nearest points of the two caps
    CHECK(d.min_distance == doctest::Approx(2.0 * std::cos(0.2)).epsilon(1e-3));
    CHECK_FALSE(displaces(half_turn, 0.05, cap, 1e-2));
}

TEST_CASE("square displacement certificate") {
    const SquareCertificate c = square_displacement_certificate(0.5, 0.01);
    CHECK(c.certificate.value <= 0.26);
    CHECK(c.certificate.value >= 0.25 - 1e-9);
    CHECK(c.displacement.displaced);
    CHECK(c.certificate.note.find("upper bound") != std::string::npos);
    CHECK(c.hamiltonian.evidence.support.has_value());

    CHECK(square_displacement_certificate(0.1, 0.01).certificate.value <= 0.02);

    // tighter eps never loosens the bound
    double prev = 1e9;
    for (double eps : {0.08, 0.04, 0.02, 0.01, 0.005}) {
        const double v = square_displacement_certificate(0.5, eps).certificate.value;
        CHECK(v <= prev + 1e-12);
        CHECK(v <= 0.25 + eps);
        prev = v;
    }
    CHECK_THROWS_AS(square_displacement_certificate(-1.0, 0.01), Error);
}

TEST_CASE("annulus grid and winding number") {
    const Grid g = annulus_grid(vec2(0.3, -0.2), 0.4, 0.6, 16, 128);
    CHECK(g.total_weight() == doctest::Approx(pi * (0.36 - 0.16)).epsilon(1e-12));
    std::vector<Vec> square{vec2(0, 0), vec2(1, 0), vec2(1, 1), vec2(0, 1)};
    CHECK(winding_number(square, vec2(0.5, 0.5)) == 1);
    CHECK(winding_number(square, vec2(1.5, 0.5)) == 0);
    std::reverse(square.begin(), square.end());
    CHECK(winding_number(square, vec2(0.5, 0.5)) == -1);
}

TEST_CASE("L_p degeneracy family") {
    const LpDegeneracyStep s = lp_degeneracy_demo(1.0, 0.01);
    CHECK(s.lp_cost <= 0.01);
    CHECK(s.displaced);
    CHECK(s.report.all_passed());
    const Curve& sweep = s.report.curves.at("sweep");
    REQUIRE(sweep.rows.size() >= 2);
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
        CHECK(sweep.rows[i][1] / sweep.rows[i - 1][1] <= 0.6);
        CHECK(sweep.rows[i][2] >= 1.0 - 1e-2);
        CHECK(sweep.rows[i][3] == 1.0);
    }
    CHECK(sweep.rows[0][2] >= 1.0 - 1e-2);
    CHECK_THROWS_AS(lp_degeneracy_demo(0.5, 0.01), Error);
}

TEST_CASE("moving circle family moves its boundary rigidly") {
    const Hamiltonian G = moving_circle_family(0.01, 0.5, 1.1);
    for (double t : {0.0, 0.3, 0.8}) {
        for (double a : {0.1, 1.7, 4.0}) {
            const Vec x = vec2(0.5 * std::cos(a), 1.1 * t + 0.5 * std::sin(a));
            const Vec v = sgrad(G, x, t);
            CHECK(std::abs(v[0]) < 1e-12);
            CHECK(v[1] == doctest::Approx(1.1).epsilon(1e-12));
            CHECK(G.grad(x, t).isApprox(fd_gradient([&](const Vec& y) { return G(y, t); }, x, 1e-6), 1e-6));
        }
    }
}
