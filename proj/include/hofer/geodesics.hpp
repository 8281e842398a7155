#pragma once

#include "hofer/flow.hpp"
#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace hofer {

// Curve in a fixed tangent space on a uniform grid of [0,1]; v(0) = v(1) = 0.
struct VariationField {
    std::vector<double> times;
    std::vector<Vec> values;

    // Samples v at n+1 uniform times. Endpoint values must vanish within tol and are then set to zero.
    static VariationField sample(const std::function<Vec(double)>& v, int n = 4096, double tol = 1e-8);
    int intervals() const { return static_cast<int>(times.size()) - 1; }
};

double energy(const VariationField& v);  // integral of |v'|^2
double curve_length(const VariationField& v);
double signed_area(const VariationField& v);  // (1/2) integral of Omega(v, v') in the plane

// G with zero time average at every point, with its primitive K_t(x) = int_0^t G(x,s) ds.
struct V1Generator {
    Hamiltonian G;
    ScalarField primitive;
    GradientField primitive_gradient;

    // K_t as an autonomous Hamiltonian at frozen t.
    Hamiltonian slice(double t) const;
};

struct V1Check {
    bool ok = false;
    double max_time_average = 0.0;
};

// max over sample points of |int_0^1 G(x,t) dt|.
V1Check check_v1(const Hamiltonian& G, const std::vector<Vec>& samples, double tol = 1e-8);

// G(x,t) = K(x,t) - int_0^1 K(x,s) ds, primitives by Gauss-Legendre quadrature.
V1Generator v1_project(const Hamiltonian& K, int nodes = 24);

// Random sum of sin/cos(2 pi k t) times spatial basis functions suited to the manifold
// (cubic monomials on R^2n and the sphere, low Fourier modes on the torus, mixed on the cylinder).
V1Generator random_v1_generator(const ManifoldSpec& M, std::uint64_t seed, int terms = 4, double amplitude = 1.0,
                                int max_frequency = 3);

struct ExtremalData {
    Hamiltonian F;
    std::optional<Vec> x_plus;
    std::optional<Vec> x_minus;
    bool nondegenerate_plus = false;
    bool nondegenerate_minus = false;

    // C(t) = J Hess F(x, t) in the canonical chart, J(p, q) = (-q, p).
    Mat C(int sign, double t) const;
    const Vec& point(int sign) const;
};

// Fixed extrema declared by the caller (used on open charts where grid extrema sit on the boundary).
ExtremalData extremal_at(const Hamiltonian& F, std::optional<Vec> x_plus, std::optional<Vec> x_minus,
                         int time_samples = 17);

struct QuasiautonomousResult {
    bool quasiautonomous = false;
    double oscillation_spread = 0.0;  // max_t osc - min_t osc
    double point_drift = 0.0;         // largest move of argmax/argmin over t
    ExtremalData extremal;
};

QuasiautonomousResult quasiautonomous_test(const Hamiltonian& F, const Grid& g, double tol, int time_samples = 17);

// f_{t,eps} = f_t o h_{t,eps}, where h_{t,eps} is the time-eps flow of K_t.
class Variation {
public:
    Variation(std::shared_ptr<const FlowMap> base, V1Generator G, int eps_steps = 16);

    const FlowMap& base() const { return *base_; }
    const V1Generator& generator() const { return G_; }

    Vec h(const Vec& y, double t, double eps) const;
    Vec f(const Vec& x, double t, double eps) const;
    // t-generator of h_{t,eps}: Hhat(y,t,eps) = int_0^eps G(phi_{K_t}^{-tau} y, t) dtau.
    double Hhat(const Vec& y, double t, double eps) const;
    // Generator of f_{t,eps}: F(x,t) + Hhat(f_t^{-1} x, t, eps).
    double generator_value(const Vec& x, double t, double eps) const;
    // F(f_t y, t) + Hhat(y, t, eps), the generator seen from the pulled-back point.
    double pulled_back(const Vec& y, double t, double eps) const;

    // v(t) = d/deps f_{t,eps}(x)|_0 = Df_t(x) sgrad K_t(x); x must be fixed by the base flow.
    VariationField velocity(const Vec& x, int n = 4096) const;

    // max over |eps| <= eps_max of the displacement of h_{1,eps} from the identity.
    double endpoint_defect(const std::vector<Vec>& samples, double eps_max) const;

private:
    std::shared_ptr<const FlowMap> base_;
    V1Generator G_;
    int eps_steps_;
    Vec base_point(const Vec& y, double t) const;
};

struct ProfilePoint {
    double eps = 0.0;
    double ell_plus = 0.0;
    double ell_minus = 0.0;
    double ell = 0.0;
    bool tracked = true;
};

struct LengthProfile {
    std::vector<ProfilePoint> points;
    bool tracking_ok = true;
    Curve curve() const;
};

// l_+(eps) = int max_x F(x,t,eps) dt, l_-(eps) = int min_x F(x,t,eps) dt; extrema tracked by Newton
// warm-started from x_+ / x_- and then from the previous time node.
LengthProfile length_profile(const Variation& var, const ExtremalData& ex, const std::vector<double>& eps_list,
                             int time_nodes = 40);

struct SecondDerivative {
    double value = 0.0;           // 5-point stencil at step h
    double half_step = 0.0;       // same at h/2
    double richardson = 0.0;      // (16 half_step - value)/15
};

// Second derivative at 0 of l_sign from the 5-point stencil.
SecondDerivative fd_second_derivative(const Variation& var, const ExtremalData& ex, int sign, double h = 1e-2,
                                      int time_nodes = 40);

// Q(v) = -int (Omega(C^{-1} v', v') + Omega(v', v)) dt.
double second_variation_Q(const ExtremalData& ex, int sign, const VariationField& v);

// int_0^1 d/deps Hhat(x, t, eps)|_0 dt, the integral of the eps-derivative of the generator along f_{t,eps} x.
double lemma_integral(const Variation& var, const Vec& x, int time_nodes = 32, double h = 1e-3);

// Target a(t) with a(0) = a(1) = 0 and its derivative.
struct TangentCurve {
    std::function<Vec(double)> a;
    std::function<Vec(double)> da;
};

// G(x,t) = Omega(x - x0, c(t)) with c = d/dt(M(t)^{-1} a(t)); then v(t) reproduces a(t).
V1Generator generator_for_target(const Hamiltonian& F, const Vec& x0, const TangentCurve& target, double step = 1e-3);

struct ConjugatePoint {
    double T = 0.0;
    double det = 0.0;
    std::vector<Vec> kernel;
};

struct ConjugateScan {
    std::vector<ConjugatePoint> roots;
    bool degenerate = false;
    double max_abs_det = 0.0;
    Curve curve;  // T, det(M(T) - I)
};

// Roots of d(T) = det(M(T) - I) on the grid (T = 0 excluded): sign changes, and interior minima of |d|
// that reach zero (the symmetric double roots of elliptic fixed points). Roots refined by bisection to 1e-6.
ConjugateScan conjugate_point_scan(const Hamiltonian& F, const ExtremalData& ex, int sign,
                                   const std::vector<double>& T_grid);

}  // namespace hofer
