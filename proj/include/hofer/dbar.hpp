#pragma once

#include "hofer/report.hpp"
#include "hofer/types.hpp"

#include <complex>
#include <functional>
#include <string>

namespace hofer {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;

// f: D^2 -> C^n. Partial derivatives in x and y are optional; without them central differences are used.
struct DiscMap {
    std::function<CVec(Complex)> f;
    std::function<CVec(Complex)> fx;
    std::function<CVec(Complex)> fy;
    std::string name;

    bool analytic() const { return fx && fy; }
    CVec dx(Complex z) const;
    CVec dy(Complex z) const;
};

DiscMap identity_disc();   // z
DiscMap conjugate_disc();  // conj(z)
DiscMap square_disc();     // z^2
DiscMap constant_disc(Complex c);
// f_s(z) = s conj(z) + (1 - s^2) / (s z + 1), s in [0, 1)
DiscMap family_map(double s);

// Gauss-Legendre nodes in r on [0, 1], uniform angles; weights include the Jacobian r.
struct PolarGrid {
    std::vector<Complex> points;
    std::vector<double> weights;
    int radial = 0;
    int angular = 0;
};

PolarGrid polar_grid(int radial = 128, int angular = 256);

// (1/2)(df/dx + i df/dy); in difference mode z must keep a margin 2h from the boundary.
CVec dbar(const DiscMap& f, Complex z, double h = 1e-5);

// omega(xi, eta) = sum Im(conj(xi_j) eta_j) for the identification w = p + i q.
double omega_c(const CVec& xi, const CVec& eta);

// sqrt(|xi|^2 |eta|^2 - <xi, eta>^2) and (1/2)|xi + i eta|^2 + omega(xi, eta).
double area_density(const CVec& xi, const CVec& eta);
double dbar_bound_density(const CVec& xi, const CVec& eta);

struct DiscAreas {
    double symplectic = 0.0;   // omega(f)
    double euclidean = 0.0;    // area(f)
    double dbar_energy = 0.0;  // 2 int |dbar f|^2
    double error = 0.0;        // quadrature error bar (full vs half resolution)
    Report report;
};

DiscAreas areas(const DiscMap& f, int radial = 128, int angular = 256);

// Value of f_s; Error at the pole s z = -1 or for s outside [0, 1).
Complex family_eval(double s, Complex z);

// max ||f_s(e^{i theta})| - 1| over angles.
double family_boundary_modulus_defect(double s, int angles = 64);
// Winding number of theta -> s + z u(z) on |z| = 1, u(z) = (1 - s^2)/(s z + 1).
int family_boundary_degree(double s, int angles = 1024);
// alpha = -e^{i theta} / s of the Moebius normal form.
Complex family_alpha(double s, double theta = 0.0);

// sup |f_s(z) - conj(z)| over sample points of the disc with |z + 1| >= delta (outside) or <= delta (inside).
double family_deviation(double s, double delta, bool inside, int radial = 64, int angular = 256);

struct SigmaResult {
    Complex sigma;
    double boundary_max = 0.0;  // max |phi| on the boundary circle
    bool bounded = false;       // |sigma| <= boundary_max (+1e-12)
};

// sigma = (1/2 pi) int (phi dy - i phi dx) over |z| = 1, phi the first coordinate; trapezoid rule.
SigmaResult boundary_sigma(const DiscMap& f, int angles = 1024);

// Columns x, f_s(x), conj(x) along the real diameter.
Curve real_section(double s, int samples = 401);

}  // namespace hofer
