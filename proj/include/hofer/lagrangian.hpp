#pragma once

#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

// Closed curve sampled at s_k = k / (n - 1), k = 0..n-1; the last sample repeats the first.
struct ParametrizedCycle {
    std::vector<Vec> samples;

    std::size_t size() const { return samples.size(); }
    double closure_gap() const;
};

// c(s) sampled uniformly; c(1) is taken from c(0) exactly when the gap is below 1e-9.
ParametrizedCycle sample_cycle(const std::function<Vec(double)>& c, int n = 1024);
ParametrizedCycle circle_cycle(double r, int n = 1024, double cp = 0.0, double cq = 0.0);
// (p, q) = (sin 2 pi s, sin 4 pi s / 2): two lobes of equal area and opposite orientation.
ParametrizedCycle figure_eight_cycle(int n = 1024);
// circle, figure_eight, zero_section (a loop in {p = 0}); parameters r, cp, cq.
ParametrizedCycle named_cycle(const std::string& name, const Params& params = {}, int n = 1024);
// CSV rows of coordinates (p_1..p_n, q_1..q_n); a header line is skipped if present.
ParametrizedCycle read_cycle_csv(const std::string& path);

// Closed integral of sum p_j dq_j over a cycle in R^{2n}.
double liouville_pairing(const ParametrizedCycle& c);

// Positive generator of the group spanned by {pi r_i^2}, or none when it is dense.
std::optional<double> gamma_split_torus(const std::vector<double>& radii);

// Best rational approximation p/q with q <= max_den and |q x - p| <= tol, by continued fractions.
std::optional<std::pair<long long, long long>> rational_approximation(double x, long long max_den = 1000000,
                                                                       double tol = 1e-9);

// (x, t) -> (h_t x, r_sign H(h_t x, t), t) on M x T*S^1 with sigma = Omega + dr ^ dt.
// L is a curve u -> base(u), u in [0, 1].
struct SuspensionMap {
    Hamiltonian H;  // 1-periodic generator of the loop h_t
    std::function<Vec(double)> base;
    double r_sign = -1.0;  // -1 is the suspension; +1 breaks the pullback
    std::string name;

    Vec h(const Vec& x, double t) const;
};

struct SuspensionPoint {
    Vec y;
    double r = 0.0;
    double t = 0.0;
};

SuspensionPoint suspension(const SuspensionMap& S, const Vec& x, double t);

// max |h_1 x - x| over samples of L.
double suspension_loop_defect(const SuspensionMap& S, int samples = 64);

// max |sigma(phi_* d/du, phi_* d/dt)| on a u x t sample lattice, central differences with step h.
double isotropy_residual(const SuspensionMap& S, int u_samples = 32, int t_samples = 16, double h = 1e-4);

Report suspension_isotropy_check(const SuspensionMap& S, int u_samples = 32, int t_samples = 16, double h = 1e-4);

SuspensionMap equator_rotation_suspension(double area_scale = 1.0);
// Great circle through the poles under the same rotation loop.
SuspensionMap meridian_rotation_suspension(double area_scale = 1.0);

// Two-parameter family h_{t,s} with generators H(., t, s).
struct LoopFamily {
    ManifoldSpec manifold;
    std::function<Vec(const Vec&, double, double)> h;        // (x, t, s)
    std::function<double(const Vec&, double, double)> H;     // (x, t, s)
    std::string name;
};

LoopFamily constant_family(const ManifoldSpec& M);
// Rotation by -2 pi turns t about a(s) = (sin(tilt s), 0, cos(tilt s)), H = 2 pi turns area_scale <a(s), x>.
// turns = 1 gives loops; other values give the non-loop control.
LoopFamily tilted_axis_family(double tilt, double turns = 1.0, double area_scale = 1.0);

struct ExactnessResult {
    double value = 0.0;
    double loop_defect = 0.0;  // max over t in {0, 1} of |h_{t,s} x - x|
    bool is_loop = true;
};

// int_0^1 dH/ds (h_{t,s} x, t, s) dt; the s-derivative by fourth-order central differences.
// With require_loop the slice must close up within 1e-6, else Error.
ExactnessResult exactness_integral(const LoopFamily& family, const Vec& x, double s, bool require_loop = true,
                                   int t_nodes = 64, double ds = 1e-3);

// G(x, t) = H(x, t) on [0, 1] and -H(x, 2 - t) on [1, 2].
Hamiltonian doubled_loop(const Hamiltonian& H);

struct AnnulusArea {
    double area = 0.0;     // int_0^2 (a_+ - a_-) dt
    double length = 0.0;   // int_0^1 osc H_t dt
    double formula = 0.0;  // 2 length + 4 eps
    double defect = 0.0;
};

// a_+(t) = -min G_t + eps, a_-(t) = -max G_t - eps.
AnnulusArea annulus_area(const Hamiltonian& H, double eps, const Grid& g, int samples = 129);

// int_0^2 G(g_t x, t) dt with g_t the doubled path.
// samples is the Simpson sample count on each half.
double doubling_integral(const Hamiltonian& H, const Vec& x, int samples = 65);

}  // namespace hofer
