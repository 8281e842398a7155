#pragma once

#include "hofer/flow.hpp"
#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <string>
#include <vector>

namespace hofer {

struct NormKind {
    enum Type { linf, lp } type = linf;
    double p = 2.0;

    static NormKind Linf() { return {linf, 0.0}; }
    static NormKind Lp(double p) { return {lp, p}; }
    std::string name() const;
};

struct Extremum {
    double value = 0.0;
    Vec point;
};

// max - min of F_t: grid argmax/argmin followed by a compass search with shrinking radius.
struct OscillationEstimate {
    Extremum max;
    Extremum min;
    double value = 0.0;
    double error = 0.0;  // change produced by the refinement pass
};

OscillationEstimate oscillation(const Hamiltonian& F, double t, const Grid& g, int refine_steps = 20);

double norm(const Hamiltonian& F, double t, const NormKind& kind, const Grid& g);

enum class LengthKind { length_linf, vert, vert0 };

LengthKind parse_length_kind(const std::string& name);

// Simpson (length, vert0) or maximum (vert) of the L-infinity norm over >= 65 time samples.
double path_length(const Hamiltonian& F, Interval ab, LengthKind kind, const Grid& g, int samples = 65);

struct LengthCertificate {
    std::string hamiltonian;
    std::string kind;
    double value = 0.0;
    double error = 0.0;
    int grid_resolution = 0;
    std::string note = "upper bound for rho/e, not the infimum";
};

// Finite sample of a target set; every point of the set lies within covering_radius of a sample.
struct PointSet {
    std::vector<Vec> points;
    double covering_radius = 0.0;
};

struct DisplacementTest {
    bool displaced = false;
    double min_distance = 0.0;
    double threshold = 0.0;
};

DisplacementTest displacement_test(const FlowMap& f, double t, const PointSet& A, double margin);
bool displaces(const FlowMap& f, double t, const PointSet& A, double margin);

struct SquareCertificate {
    NormalizedHamiltonian hamiltonian;
    LengthCertificate certificate;
    DisplacementTest displacement;
    double cutoff_margin = 0.0;
};

// Cutoff of H = u p near K = [0,u] x [0,2u]; the flow moves the square (0,u)^2 by u along q.
SquareCertificate square_displacement_certificate(double u, double eps);

struct LpDegeneracyStep {
    Hamiltonian hamiltonian;  // G_t at the final tube half-width
    double width = 0.0;
    double lp_cost = 0.0;
    double linf_cost = 0.0;
    bool displaced = false;
    Report report;
};

// Moving-circle cutoff family on R^2: G_t = D p chi(dist(x, S_t)) where S_t is the boundary of the
// disc A (radius R) translated by D t along q, chi = 1 on the tube of half-width w.
// The width is halved until the L_p path cost is at most target.
LpDegeneracyStep lp_degeneracy_demo(double p, double target, double radius = 0.5, double shift = 1.1);

// The same family at a fixed width.
Hamiltonian moving_circle_family(double width, double radius, double shift);

// Polar quadrature on the annulus r_in <= |x - c| <= r_out.
Grid annulus_grid(const Vec& center, double r_in, double r_out, int radial, int angular);

// Winding number of a closed polygon around a point of the plane.
int winding_number(const std::vector<Vec>& polygon, const Vec& x);

}  // namespace hofer
