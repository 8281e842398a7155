#include "hofer/morse.hpp"
#include "hofer/numerics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace hofer;

namespace {

// F = cos(2 pi p): whole circles of critical points
Hamiltonian ridge() {
    Hamiltonian F;
    F.manifold = ManifoldSpec::torus2();
    F.name = "ridge";
    F.value = [](const Vec& x, double) { return std::cos(2 * pi * x[0]); };
    return F;
}

// Bitmask oracle: v is a subset of the basis, bit j = coefficient of e_j.
unsigned boundary_of(const ChainComplexZ2& c, unsigned v) {
    unsigned out = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (v >> j & 1u)
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c.d[i][j]) out ^= 1u << i;
    return out;
}

int rank_bits(std::vector<unsigned> v) {
    int r = 0;
    for (int bit = 31; bit >= 0; --bit) {
        auto it = std::find_if(v.begin() + r, v.end(), [bit](unsigned x) { return x >> bit & 1u; });
        if (it == v.end()) continue;
        std::iter_swap(v.begin() + r, it);
        for (std::size_t k = 0; k < v.size(); ++k)
            if (int(k) != r && (v[k] >> bit & 1u)) v[k] ^= v[r];
        ++r;
    }
    return r;
}

// Enumerates every subspace of span(B \ {e}) as the span of a subset of its vectors.
bool essential_brute(const ChainComplexZ2& c, int e) {
    const unsigned n = unsigned(c.size());
    std::vector<unsigned> V;
    for (unsigned v = 1; v < (1u << n); ++v)
        if (!(v >> e & 1u)) V.push_back(v);
    std::vector<unsigned> Z, B;
    for (unsigned v = 1; v < (1u << n); ++v) {
        if (boundary_of(c, v) == 0) Z.push_back(v);
        B.push_back(boundary_of(c, v));
    }
    const int dimZ = rank_bits(Z), dimB = rank_bits(B);
    std::set<std::vector<bool>> seen;
    for (unsigned long mask = 0; mask < (1ul << V.size()); ++mask) {
        std::vector<bool> member(1u << n, false);
        member[0] = true;
        for (std::size_t k = 0; k < V.size(); ++k) {
            if (!(mask >> k & 1ul)) continue;
            std::vector<bool> next = member;
            for (unsigned w = 0; w < (1u << n); ++w)
                if (member[w]) next[w ^ V[k]] = true;
            member = next;
        }
        if (!seen.insert(member).second) continue;
        bool invariant = true;
        std::vector<unsigned> img = B;
        for (unsigned w = 0; w < (1u << n); ++w) {
            if (!member[w]) continue;
            const unsigned b = boundary_of(c, w);
            if (!member[b]) invariant = false;
            if (b == 0) img.push_back(w);
        }
        if (invariant && rank_bits(img) - dimB == dimZ - dimB) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("critical points") {
    const ManifoldSpec S = ManifoldSpec::sphere2();
    const auto sp = critical_points(catalog("height"), S);
    REQUIRE(sp.size() == 2);
    CHECK(sp[0].index == 0);
    CHECK(sp[1].index == 2);
    CHECK(sp[1].x[2] == doctest::Approx(1.0));

    const ManifoldSpec T = ManifoldSpec::torus2();
    const Hamiltonian F = catalog("tilted_height");
    const auto tp = critical_points(F, T);
    REQUIRE(tp.size() == 4);
    std::vector<int> idx;
    for (const CriticalPoint& c : tp) idx.push_back(c.index);
    CHECK(idx == std::vector<int>{0, 1, 1, 2});
    for (const CriticalPoint& c : tp) {
        CHECK(c.grad_norm <= 1e-8);
        // Hessian oracle: differences of the value in the chart
        const Mat H = fd_hessian([&F](const Vec& y) { return F(y, 0.0); }, c.x, 1e-4);
        const double det = H.determinant(), tr = H.trace();
        const int neg = det < 0 ? 1 : (tr < 0 ? 2 : 0);
        CHECK(neg == c.index);
        CHECK(std::abs(det) > 1e-2);
    }

    CHECK_THROWS_AS(morse_data(ridge(), T), Error);
    const auto flagged = critical_points(ridge(), T);
    CHECK(std::any_of(flagged.begin(), flagged.end(), [](const CriticalPoint& c) { return c.degenerate; }));
}

TEST_CASE("trajectory counts") {
    const MorseData d = morse_data(catalog("tilted_height"), ManifoldSpec::torus2());
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
            if (d.points[x].index - d.points[y].index != 1) continue;
            const TrajectoryCount c = trajectory_count(d, x, y);
            CHECK(c.trajectories == 2);
            CHECK(c.parity == 0);
            CHECK_FALSE(c.low_confidence);
            ShootingOptions half;
            half.offset = 5e-4;
            CHECK(trajectory_count(d, x, y, half).parity == c.parity);
        }
    CHECK_THROWS_AS(trajectory_count(d, 3, 0), Error);

    // a starved time budget is flagged
    ShootingOptions starved;
    starved.max_steps = 3;
    CHECK(trajectory_count(d, 1, 0, starved).low_confidence);
    CHECK(boundary_operator(d, starved).low_confidence);

    // conformal factors only reparametrize flow lines in two dimensions
    const MorseData flat = morse_data(catalog("tilted_height"), ManifoldSpec::torus2(), ConformalMetric(0.0));
    CHECK(boundary_operator(flat).complex.d == boundary_operator(d).complex.d);
}

TEST_CASE("Z2 complexes") {
    const ChainComplexZ2 zero = make_complex({0, 1, 2}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    CHECK(homology(zero) == std::vector<int>{1, 1, 1});
    for (int e = 0; e < 3; ++e) CHECK(essential_test(zero, e));

    // odd counts injected: d e2 = e1, d e1 = e0
    const ChainComplexZ2 bad = make_complex({0, 1, 2}, {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
    CHECK_FALSE(bad.square_is_zero());
    CHECK_THROWS_AS(homology(bad), Error);
    CHECK_THROWS_AS(essential_test(bad, 0), Error);

    // d a = b, c free: b is a boundary and not essential, c is
    const ChainComplexZ2 c = make_complex({1, 0, 0}, {{0, 0, 0}, {1, 0, 0}, {0, 0, 0}});
    CHECK(homology(c) == std::vector<int>{1, 0});
    CHECK_FALSE(essential_test(c, 1));
    CHECK(essential_test(c, 2));
    CHECK_FALSE(essential_test(c, 0));

    CHECK_THROWS_AS(make_complex({0, 0}, {{0, 1}, {0, 0}}), Error);
    CHECK_THROWS_AS(essential_test(make_complex(std::vector<int>(21, 0), std::vector<std::vector<std::uint8_t>>(
                                                                           21, std::vector<std::uint8_t>(21, 0))),
                                   0),
                    Error);

    // random complexes against the brute-force enumeration
    std::mt19937_64 rng(11);
    int tried = 0;
    while (tried < 60) {
        const int n = 3 + int(rng() % 3);
        std::vector<int> deg(n);
        for (int& g : deg) g = int(rng() % 3);
        std::vector<std::vector<std::uint8_t>> m(n, std::vector<std::uint8_t>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (deg[i] == deg[j] - 1) m[i][j] = std::uint8_t(rng() % 2);
        const ChainComplexZ2 r = make_complex(deg, m);
        if (!r.square_is_zero()) continue;
        ++tried;
        for (int e = 0; e < n; ++e) CHECK(essential_test(r, e) == essential_brute(r, e));
    }
}

TEST_CASE("Morse homology of the model surfaces") {
    const Report s = morse_report(catalog("height"), ManifoldSpec::sphere2());
    CHECK(s.all_passed());
    CHECK(s.scalar("betti_0") == 1);
    CHECK(s.scalar("betti_1") == 0);
    CHECK(s.scalar("betti_2") == 1);

    const Report t = morse_report(catalog("tilted_height"), ManifoldSpec::torus2());
    CHECK(t.all_passed());
    CHECK(t.scalar("critical_points") == 4);
    CHECK(t.scalar("betti_1") == 2);
    CHECK(t.scalar("euler_characteristic") == 0);
    REQUIRE(t.find_verdict("maximum_essential"));
    CHECK(t.find_verdict("maximum_essential")->passed);

    const MorseData d = morse_data(catalog("tilted_height"), ManifoldSpec::torus2());
    const MorseComplex mc = boundary_operator(d);
    for (const auto& row : mc.complex.d)
        for (auto v : row) CHECK(v == 0);
}
