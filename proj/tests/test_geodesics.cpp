#include "hofer/geodesics.hpp"
#include "hofer/hofer.hpp"
#include "hofer/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hofer;

namespace {

// -pi lambda |x|^2: the origin is a nondegenerate maximum.
Hamiltonian inverted_oscillator(double lambda) {
    Hamiltonian F = catalog("oscillator", {{"lambda", lambda}});
    auto v = F.value;
    auto g = F.gradient;
    auto h = F.hessian;
    auto e = F.exact_flow;
    F.value = [v](const Vec& x, double t) { return -v(x, t); };
    F.gradient = [g](const Vec& x, double t) { return Vec(-g(x, t)); };
    F.hessian = [h](const Vec& x, double t) { return Mat(-h(x, t)); };
    F.exact_flow = [e](const Vec& x, double t0, double t1) { return e(x, t1, t0); };
    F.name = "inverted_oscillator";
    return F;
}

VariationField circle(double r, int n = 4096) {
    return VariationField::sample([r](double t) { return vec2(r * (std::cos(2 * pi * t) - 1.0), r * std::sin(2 * pi * t)); }, n);
}

Hamiltonian bump_times(const std::function<double(double)>& c) {
    Hamiltonian B = catalog("tilted_height");
    auto v = B.value;
    auto g = B.gradient;
    Hamiltonian K = B;
    K.autonomous = false;
    K.hessian = nullptr;
    K.exact_flow = nullptr;
    K.value = [v, c](const Vec& x, double t) { return c(t) * v(x, 0.0); };
    K.gradient = [g, c](const Vec& x, double t) { return Vec(c(t) * g(x, 0.0)); };
    K.name = "c(t)B";
    return K;
}

}  // namespace

TEST_CASE("variation fields") {
    CHECK_THROWS_AS(VariationField::sample([](double) { return vec2(1.0, 0.0); }, 64), Error);
    const double r = 0.3;
    const VariationField v = circle(r);
    CHECK(v.values.front().norm() == 0.0);
    CHECK(v.values.back().norm() == 0.0);
    // closed forms for the circle through the origin
    CHECK(energy(v) == doctest::Approx(4 * pi * pi * r * r).epsilon(1e-9));
    CHECK(curve_length(v) == doctest::Approx(2 * pi * r).epsilon(1e-9));
    CHECK(signed_area(v) == doctest::Approx(pi * r * r).epsilon(1e-9));
}

TEST_CASE("v1 projection") {
    const Grid g = sample_grid(ManifoldSpec::torus2(), 6);
    const V1Generator zero = v1_project(catalog("tilted_height"));
    for (const Vec& x : g.points)
        for (double t : {0.0, 0.3, 0.9}) CHECK(std::abs(zero.G(x, t)) < 1e-12);

    const Hamiltonian B = catalog("tilted_height");
    const V1Generator same = v1_project(bump_times([](double t) { return std::sin(2 * pi * t); }));
    const V1Generator lin = v1_project(bump_times([](double t) { return t; }));
    for (const Vec& x : g.points) {
        for (double t : {0.0, 0.25, 0.6, 1.0}) {
            CHECK(std::abs(same.G(x, t) - std::sin(2 * pi * t) * B(x, 0.0)) < 1e-8);
            CHECK(std::abs(lin.G(x, t) - (t - 0.5) * B(x, 0.0)) < 1e-12);
            // primitive of (t - 1/2) B
            CHECK(std::abs(lin.primitive(x, t) - 0.5 * (t * t - t) * B(x, 0.0)) < 1e-12);
        }
    }
    CHECK(check_v1(lin.G, g.points).ok);
    CHECK_FALSE(check_v1(bump_times([](double t) { return t; }), g.points).ok);
}

TEST_CASE("random generators have consistent primitives") {
    for (const ManifoldSpec& M : {ManifoldSpec::euclidean(1), ManifoldSpec::torus2(), ManifoldSpec::sphere2(), ManifoldSpec::cylinder()}) {
        const V1Generator G = random_v1_generator(M, 11, 3, 1.0);
        const Grid g = sample_grid(M, 4);
        CHECK(check_v1(G.G, g.points, 1e-10).ok);
        const QuadratureRule q = gauss_legendre(30, 0.0, 0.37);
        for (std::size_t i = 0; i < g.size(); i += 7) {
            const Vec& x = g.points[i];
            double s = 0.0;
            for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * G.G(x, q.nodes[k]);
            CHECK(G.primitive(x, 0.37) == doctest::Approx(s).epsilon(1e-10));
            const Vec fd = fd_gradient([&](const Vec& y) { return G.primitive(y, 0.37); }, x, 1e-6);
            CHECK((G.primitive_gradient(x, 0.37) - fd).norm() < 1e-7);
        }
    }
}

TEST_CASE("Hhat generates h in t") {
    for (const ManifoldSpec& M : {ManifoldSpec::euclidean(1), ManifoldSpec::torus2()}) {
        const Hamiltonian F = M.kind == ManifoldKind::torus2 ? catalog("zero") : inverted_oscillator(0.7);
        const Variation var(std::make_shared<FlowMap>(F), random_v1_generator(M, 5, 2, 1.0), 64);
        const Vec y = vec2(0.31, -0.12);
        for (double t : {0.2, 0.55}) {
            for (double eps : {0.05, -0.08}) {
                const double dt = 1e-5;
                const Vec z = var.h(y, t, eps);
                const Vec dz = (var.h(y, t + dt, eps) - var.h(y, t - dt, eps)) / (2 * dt);
                Hamiltonian Hh;
                Hh.manifold = M;
                Hh.time = {t, t};
                Hh.value = [&](const Vec& w, double) { return var.Hhat(w, t, eps); };
                CHECK((sgrad(Hh, z, t) - dz).norm() < 1e-6);
            }
        }
    }
}

TEST_CASE("variations of a path") {
    const Hamiltonian F = inverted_oscillator(0.9);
    auto flow = std::make_shared<FlowMap>(F);
    const Vec origin = vec2(0.0, 0.0);

    // G = 0 is the constant variation
    const Variation flat(flow, v1_project(catalog("oscillator")));
    const VariationField v0 = flat.velocity(origin, 256);
    for (const Vec& v : v0.values) CHECK(v.norm() < 1e-12);

    // loop property f_{1,eps} = f_1
    const Variation var(flow, random_v1_generator(F.manifold, 3, 3, 1.0));
    const Grid g = sample_grid(F.manifold, 4);
    CHECK(var.endpoint_defect(g.points, 0.05) < 1e-8);
    for (double eps : {-0.05, 0.05})
        CHECK((var.f(vec2(0.2, 0.4), 1.0, eps) - F.exact_flow(vec2(0.2, 0.4), 0.0, 1.0)).norm() < 1e-6);

    // prescribed velocity a(t)
    const TangentCurve a{[](double t) { return vec2(std::sin(pi * t) * std::cos(3 * t), std::sin(2 * pi * t) * t); },
                         [](double t) {
                             return vec2(pi * std::cos(pi * t) * std::cos(3 * t) - 3 * std::sin(pi * t) * std::sin(3 * t),
                                         2 * pi * std::cos(2 * pi * t) * t + std::sin(2 * pi * t));
                         }};
    const Variation target(flow, generator_for_target(F, origin, a));
    const VariationField v = target.velocity(origin, 512);
    for (std::size_t i = 0; i < v.times.size(); ++i) CHECK((v.values[i] - a.a(v.times[i])).norm() < 1e-4);

    // generators with nonzero time average are rejected
    Hamiltonian bad = catalog("oscillator");
    bad.autonomous = false;
    V1Generator notv1{bad, [](const Vec& x, double t) { return t * x.squaredNorm(); }, nullptr};
    CHECK_THROWS_AS(Variation(flow, notv1), Error);
}

TEST_CASE("second variation form on circles") {
    const double r = 0.3;
    const VariationField v = circle(r);
    for (double lambda : {0.5, 0.9, 1.0, 1.7}) {
        const ExtremalData ex = extremal_at(catalog("oscillator", {{"lambda", lambda}}), std::nullopt, vec2(0, 0));
        CHECK(ex.nondegenerate_minus);
        const double Q = second_variation_Q(ex, -1, v);
        CHECK(std::abs(Q - (-2 * pi * r * r / lambda + 2 * pi * r * r)) < 1e-4);
        CHECK(std::abs(Q - (-energy(v) / (2 * pi * lambda) + 2 * signed_area(v))) < 1e-10);
    }
    const ExtremalData ex1 = extremal_at(catalog("oscillator"), std::nullopt, vec2(0, 0));
    CHECK(std::abs(second_variation_Q(ex1, -1, v)) < 1e-4);
    CHECK(second_variation_Q(ex1, -1, VariationField::sample([](double) { return vec2(0, 0); }, 64)) == 0.0);

    // C(t) singular
    const ExtremalData flat = extremal_at(catalog("translation_gen"), std::nullopt, vec2(0, 0));
    CHECK_THROWS_AS(second_variation_Q(flat, -1, v), Error);
}

TEST_CASE("isoperimetric inequality for random closed curves") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N(0.0, 1.0);
    const double lambda = 0.9;
    for (int c = 0; c < 20; ++c) {
        double a[2][4], b[2][4];
        for (auto& row : a)
            for (double& x : row) x = N(rng);
        for (auto& row : b)
            for (double& x : row) x = N(rng);
        auto curve = [&](double t) {
            Vec v = vec2(0, 0);
            for (int k = 1; k <= 4; ++k)
                for (int i = 0; i < 2; ++i)
                    v[i] += (a[i][k - 1] * (std::cos(2 * pi * k * t) - 1.0) + b[i][k - 1] * std::sin(2 * pi * k * t)) / k;
            return v;
        };
        const VariationField v = VariationField::sample(curve, 4096);
        CHECK(4 * pi * lambda * signed_area(v) <= energy(v) + 1e-6);
        CHECK(4 * pi * std::abs(signed_area(v)) <= curve_length(v) * curve_length(v) + 1e-6);
        CHECK(curve_length(v) * curve_length(v) <= energy(v) + 1e-6);
    }
}

TEST_CASE("second derivative of the length matches Q") {
    const Hamiltonian F = inverted_oscillator(0.9);
    auto flow = std::make_shared<FlowMap>(F);
    const ExtremalData ex = extremal_at(F, vec2(0, 0), std::nullopt);
    REQUIRE(ex.nondegenerate_plus);
    for (std::uint64_t seed : {21u, 22u}) {
        const Variation var(flow, random_v1_generator(F.manifold, seed, 3, 8.0));
        const VariationField v = var.velocity(vec2(0, 0));
        const double Q = second_variation_Q(ex, 1, v);
        const SecondDerivative d = fd_second_derivative(var, ex, 1, 1e-2, 24);
        CHECK(std::abs(d.value - Q) <= std::max(1e-3, 1e-2 * std::abs(Q)));
        CHECK(std::abs(d.richardson - Q) <= std::max(1e-3, 1e-2 * std::abs(Q)));
        // the variant with Omega(v', v') in place of Omega(v', v) drops -int Omega(v', v) = 2 area(v)
        const double misprint = Q - 2.0 * signed_area(v);
        CHECK(std::abs(misprint - d.value) > std::max(1e-3, 1e-2 * std::abs(Q)));
    }
}

TEST_CASE("Lemma integral vanishes at eps = 0") {
    for (const ManifoldSpec& M : {ManifoldSpec::euclidean(1), ManifoldSpec::torus2()}) {
        const Hamiltonian F = M.kind == ManifoldKind::torus2 ? catalog("tilted_height") : inverted_oscillator(0.9);
        auto flow = std::make_shared<FlowMap>(F);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Variation var(flow, random_v1_generator(M, seed, 3, 2.0));
            for (const Vec& x : {vec2(0.1, 0.2), vec2(-0.4, 0.7)}) CHECK(std::abs(lemma_integral(var, x)) <= 1e-5);
        }
    }
}

TEST_CASE("quasi-autonomous test") {
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 32);
    const QuasiautonomousResult r = quasiautonomous_test(catalog("tilted_height"), tg, 1e-6);
    CHECK(r.quasiautonomous);
    CHECK(r.extremal.nondegenerate_plus);
    CHECK(r.extremal.nondegenerate_minus);
    CHECK(sgrad(catalog("tilted_height"), *r.extremal.x_plus, 0.0).norm() < 1e-8);

    const ManifoldSpec S = ManifoldSpec::sphere2();
    const Grid sg = sample_grid(S, 12);
    Hamiltonian growing = catalog("height");
    growing.autonomous = false;
    growing.exact_flow = nullptr;
    growing.value = [](const Vec& x, double t) { return (1.0 + t) * x[2]; };
    growing.gradient = [](const Vec&, double t) { return vec3(0, 0, 1.0 + t); };
    const QuasiautonomousResult g = quasiautonomous_test(growing, sg, 1e-6);
    CHECK_FALSE(g.quasiautonomous);
    CHECK(g.oscillation_spread == doctest::Approx(2.0).epsilon(1e-3));

    Hamiltonian shifted = growing;
    shifted.value = [](const Vec& x, double t) { return x[2] + std::cos(2 * pi * t); };
    shifted.gradient = [](const Vec&, double) { return vec3(0, 0, 1.0); };
    const QuasiautonomousResult s = quasiautonomous_test(normalize(shifted, S, sg), sg, 1e-6);
    CHECK(s.quasiautonomous);
    CHECK(s.extremal.nondegenerate_plus);
    CHECK(s.extremal.x_plus->isApprox(vec3(0, 0, 1), 1e-6));
}

TEST_CASE("length profile at a quasi-autonomous path") {
    const Hamiltonian F = catalog("tilted_height");
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 32);
    const QuasiautonomousResult q = quasiautonomous_test(F, tg, 1e-6);
    auto flow = std::make_shared<FlowMap>(F);
    const Variation var(flow, random_v1_generator(F.manifold, 9, 2, 0.5));
    const std::vector<double> eps{-0.04, -0.02, -0.01, 0.0, 0.01, 0.02, 0.04};
    const LengthProfile prof = length_profile(var, q.extremal, eps, 24);
    REQUIRE(prof.tracking_ok);
    const double vert0 = path_length(F, {0, 1}, LengthKind::vert0, tg);
    CHECK(prof.points[3].ell == doctest::Approx(vert0).epsilon(1e-9));
    // one-sided slopes at 0 vanish
    CHECK(std::abs((prof.points[4].ell - prof.points[3].ell) / 0.01) <= 1e-1);
    CHECK(std::abs((prof.points[4].ell - prof.points[3].ell) / 0.01 - (prof.points[5].ell - prof.points[4].ell) / 0.01) < 1.0);
    // convex up to second order: l(eps) >= l(0) - C eps^2 with finite C
    double C = 0.0;
    for (const auto& p : prof.points)
        if (p.eps != 0.0) C = std::max(C, (prof.points[3].ell - p.ell) / (p.eps * p.eps));
    CHECK(std::isfinite(C));
    CHECK(C < 10.0);
    const Curve c = prof.curve();
    CHECK(c.rows.size() == eps.size());
}

TEST_CASE("quasi-autonomous paths minimize the length to first order") {
    // VERT F - eps G VERT_0 >= VERT F VERT_0 for G in V1
    const Hamiltonian F = catalog("tilted_height");
    const Grid tg = sample_grid(ManifoldSpec::torus2(), 16);
    const double base = oscillation(F, 0.0, tg, 60).value;
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        const V1Generator G = random_v1_generator(F.manifold, seed, 2, 1.0);
        for (double eps : {-0.1, -0.01, 0.01, 0.1}) {
            Hamiltonian D = G.G;
            D.value = [&](const Vec& x, double t) { return F.value(x, t) - eps * G.G.value(x, t); };
            D.gradient = [&](const Vec& x, double t) { return Vec(F.gradient(x, t) - eps * G.G.gradient(x, t)); };
            std::vector<double> osc(33);
            for (int k = 0; k <= 32; ++k) osc[k] = oscillation(D, k / 32.0, tg, 60).value;
            CHECK(simpson(osc, 0.0, 1.0) >= base - 1e-6);
        }
    }
}

TEST_CASE("conjugate point scan") {
    std::vector<double> T;
    for (int i = 1; i <= 210; ++i) T.push_back(1.05 * i / 210.0);
    auto scan = [&](double lambda) {
        const Hamiltonian F = catalog("oscillator", {{"lambda", lambda}});
        return conjugate_point_scan(F, extremal_at(F, std::nullopt, vec2(0, 0)), -1, T);
    };
    const ConjugateScan a = scan(0.5);
    CHECK(a.roots.empty());
    CHECK_FALSE(a.degenerate);
    const ConjugateScan b = scan(1.5);
    REQUIRE(!b.roots.empty());
    CHECK(std::abs(b.roots.front().T - 2.0 / 3.0) < 1e-4);
    CHECK(b.roots.front().kernel.size() == 2);
    const ConjugateScan c = scan(1.0);
    REQUIRE(c.roots.size() == 1);
    CHECK(std::abs(c.roots.front().T - 1.0) < 1e-4);

    Hamiltonian zero = catalog("oscillator", {{"lambda", 0.0}});
    const ConjugateScan z = conjugate_point_scan(zero, extremal_at(zero, std::nullopt, vec2(0, 0)), -1, T);
    CHECK(z.degenerate);
    CHECK(z.roots.empty());
}
