#pragma once

#include "hofer/flow.hpp"
#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hofer {

using PointMap = std::function<Vec(const Vec&)>;

// An explicitly parametrized Hamiltonian diffeomorphism with its inverse.
struct Candidate {
    std::string name;
    PointMap map;
    PointMap inverse;
};

using CandidateSet = std::vector<Candidate>;

Candidate identity_candidate();
Candidate torus_translation(double a, double b);
Candidate sphere_rotation(const Eigen::Vector3d& axis, double angle);
// Time-t map of F and its inverse (closed-form flow when available).
Candidate flow_candidate(const Hamiltonian& F, double t = 1.0);

// Translations by (j/n, k/n) for 0 <= j,k < n, identity included.
CandidateSet torus_translations(int n);

// max |Omega(D phi xi, D phi eta) - Omega(xi, eta)| over grid points and tangent basis pairs.
double symplecticity_residual(const Candidate& c, const ManifoldSpec& M, const Grid& g, double h = 1e-6);

struct DeltaResult {
    double value = 1.0;
    std::string witness;
    std::vector<double> ratios;  // per candidate, in input order
};

// min over candidates of ||F + F o phi|| / (2 ||F||), L-infinity norms on the grid.
DeltaResult delta(const Hamiltonian& F, const CandidateSet& C, const Grid& g);

// min over sequences (phi_1..phi_{N-1}, phi_0 = id prepended) of ||sum F o phi_j|| / (N ||F||).
DeltaResult delta_N(const Hamiltonian& F, int N, const std::vector<CandidateSet>& sequences, const Grid& g);

// Sequences phi_j = translation by j (a, b) for each (a, b) in shifts.
std::vector<CandidateSet> translation_sequences(int N, const std::vector<std::pair<double, double>>& shifts);

struct ReverseKamResult {
    double value = 0.0;     // sup |E| over scanned levels with a winding band component
    double level = 0.0;     // witnessing level
    double tolerance = 0.0;
    int levels_scanned = 0;
    int winding_levels = 0;
};

// E(F) on the cylinder: levels E in [min F, max F] in steps of tol, band {|F - E| < tol}.
// The grid must be a cylinder grid with resolution >= 64.
ReverseKamResult reverse_kam_E(const Hamiltonian& F, const Grid& g, double tol);

// True if some connected component of the marked cells winds around the periodic q-axis.
// cells are indexed [i_p * nq + i_q]; neighbours are 4-connected, periodic in q only.
bool has_winding_component(const std::vector<char>& marked, int np, int nq);

struct CommutatorCheck {
    Hamiltonian G;
    Report report;
};

// G(x,t) = F(x) + F(phi^{-1} f_t^{-1} x), generating g_t = f_t phi f_t phi^{-1}; verified on a sample grid.
CommutatorCheck straightened_commutator(const Hamiltonian& F, const Candidate& phi, double T, const Grid& g);

struct SkewProduct {
    ManifoldSpec manifold;
    std::function<Vec(const Vec&, double)> h;  // loop h(t), h(0) = h(1)
    double alpha = 0.0;
    std::string name;
};

// h(t) = R_x(beta) R_z(2 pi t) on the sphere; its inverse path is generated by 2 pi x3.
SkewProduct tilted_rotation_loop(double alpha, double beta = pi / 4);
SkewProduct identity_loop(const ManifoldSpec& M, double alpha);

// max over grid points of |h(1) y - h(0) y|.
double loop_closure_defect(const SkewProduct& S, const Grid& g);

struct SkewPoint {
    Vec y;
    double t = 0.0;
};

SkewPoint skew_iterate(const SkewProduct& S, SkewPoint p, int k);

struct LoopAverage {
    std::vector<int> N;
    std::vector<double> vert;            // (1/N) max_t osc_y F_N
    std::vector<double> vert0;           // (1/N) int_0^1 osc_y F_N dt
    double telescoping_defect = 0.0;     // max |F_N - F_{N-1} - H o T^{N-1}| on samples
    Curve curve() const;
};

// Birkhoff sums F_N = sum_{k<N} H o T^k on the grid times t_samples uniform times.
LoopAverage loop_average_decay(const SkewProduct& S, const std::function<double(const Vec&, double)>& H, int N_max,
                               const Grid& g, int t_samples = 32);

}  // namespace hofer
