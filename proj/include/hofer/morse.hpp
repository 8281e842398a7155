#pragma once

#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hofer {

// Round (sphere) or flat (torus) metric times exp(amplitude * u(x)), u a fixed random
// trigonometric (torus) or quadratic (sphere) polynomial drawn from the seed.
class ConformalMetric {
public:
    explicit ConformalMetric(double amplitude = 1e-2, std::uint64_t seed = 1309);

    double factor(const ManifoldSpec& M, const Vec& x) const;
    double amplitude() const { return amplitude_; }
    std::uint64_t seed() const { return seed_; }

private:
    double amplitude_;
    std::uint64_t seed_;
    std::vector<double> coef_;
};

struct CriticalPoint {
    Vec x;
    double value = 0.0;
    int index = 0;
    Vec eigenvalues;  // Riemannian Hessian in an orthonormal tangent frame, ascending
    double grad_norm = 0.0;
    bool degenerate = false;  // some |eigenvalue| < 1e-4
};

// Riemannian gradient and Hessian of F restricted to M in the frame tangent_basis(M, x).
Vec surface_gradient(const Hamiltonian& F, const ManifoldSpec& M, const Vec& x);
Mat surface_hessian(const Hamiltonian& F, const ManifoldSpec& M, const Vec& x);

// Newton from the seeds of sample_grid(M, seed_resolution); points within 1e-4 are merged.
// Degenerate points are returned flagged.
std::vector<CriticalPoint> critical_points(const Hamiltonian& F, const ManifoldSpec& M, int seed_resolution = 16);

struct MorseData {
    Hamiltonian F;
    ManifoldSpec M;
    ConformalMetric metric;
    std::vector<CriticalPoint> points;  // sorted by index, then value
};

// Error (verification_failed) when a critical point is degenerate or off the tolerance.
MorseData morse_data(const Hamiltonian& F, const ManifoldSpec& M, const ConformalMetric& metric = ConformalMetric(),
                     int seed_resolution = 16);

struct ShootingOptions {
    double offset = 1e-3;
    double step = 0.0;         // 0: 0.2 / largest |Hessian eigenvalue| over Crit F
    long max_steps = 200000;   // time budget per shot
};

struct TrajectoryCount {
    int from = 0, to = 0;
    int shots = 0;
    int landed = 0;          // shots that reached `to`
    int trajectories = 0;    // distinct after clustering
    int parity = 0;
    bool low_confidence = false;
};

// Connecting orbits x -> y of the negative gradient flow, i(x) - i(y) = 1.
// Saddle sources shoot along their two unstable directions; maxima are reached from the
// saddle along its two stable directions with the flow reversed.
TrajectoryCount trajectory_count(const MorseData& data, int x, int y, const ShootingOptions& opt = {});

// Z2 complex with a fixed basis. d[i][j] is the coefficient of e_i in the boundary of e_j.
struct ChainComplexZ2 {
    std::vector<int> degree;
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint8_t>> d;

    std::size_t size() const { return degree.size(); }
    bool square_is_zero() const;
};

// Checks shapes and that the boundary lowers degree by one; throws invalid_argument.
ChainComplexZ2 make_complex(std::vector<int> degree, std::vector<std::vector<std::uint8_t>> d,
                            std::vector<std::string> labels = {});

struct MorseComplex {
    ChainComplexZ2 complex;
    std::vector<TrajectoryCount> counts;
    bool low_confidence = false;
};

MorseComplex boundary_operator(const MorseData& data, const ShootingOptions& opt = {});

// Betti numbers over Z2 in degrees 0..max degree. Error (verification_failed) unless d^2 = 0.
std::vector<int> homology(const ChainComplexZ2& c);

// e is essential iff no d-invariant K inside span(B \ {e}) has H(K) -> H(C) onto.
// Images grow with K, so the largest invariant K = {v : dv in span(B \ {e})} decides.
bool essential_test(const ChainComplexZ2& c, int e);

// Rank over Z2 of a list of vectors.
int rank_z2(std::vector<std::vector<std::uint8_t>> rows);

// Critical points, complex, Betti numbers, Euler characteristic, essentiality of the maximum
// and stability of the parities under halving the offset.
Report morse_report(const Hamiltonian& F, const ManifoldSpec& M, const ConformalMetric& metric = ConformalMetric(),
                    const ShootingOptions& opt = {});

}  // namespace hofer
