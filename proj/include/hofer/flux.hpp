#pragma once

#include "hofer/growth.hpp"
#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <array>
#include <functional>
#include <string>

namespace hofer {

// t -> f_t on the torus in lifted coordinates, f_0 = id, t in [0, 1].
// velocity(x, t) = d/dt f_t(x); when empty it is taken by central differences with step 1e-4.
struct SymplecticPath {
    std::function<Vec(const Vec&, double)> map;
    std::function<Vec(const Vec&, double)> velocity;
    std::string name;
    std::function<Mat(const Vec&, double)> jacobian;  // optional D f_t(x), used by the audit

    Vec operator()(const Vec& x, double t) const { return map(x, t); }
    Vec dt(const Vec& x, double t) const;
};

// (p, q) -> (p + a t, q + b t)
SymplecticPath translation_path(double a, double b);
// F = a cos(2 pi t) sin(2 pi p) / (2 pi): q moves by a sin(2 pi t) cos(2 pi p) / (2 pi), so f_1 = id.
Hamiltonian pulsing_shear(double amplitude = 1.0);
// Flow of a torus Hamiltonian; velocity = sgrad F_t(f_t x).
SymplecticPath hamiltonian_path(const Hamiltonian& F);
// f first, then g, each run at double speed with the clock 3u^2 - 2u^3, so the velocity vanishes at the junction.
SymplecticPath concatenate(const SymplecticPath& f, const SymplecticPath& g);
// t -> f_{b(t)} with b(0) = 0, b(1) = 1.
SymplecticPath reparametrize_path(const SymplecticPath& f, const std::function<double(double)>& b,
                                  const std::function<double(double)>& db);
// "translate_q:T", "translate_p:T", "translate:a,b" or a torus catalog Hamiltonian name.
SymplecticPath parse_path(const std::string& spec);

// Max symplecticity residual of the slices at t in {0, 1/4, ..., 1} on an 8^2 grid.
double path_symplecticity_residual(const SymplecticPath& P);

// Coefficients of [dp] and [dq], reported = -(raw periods of i_xi Omega) so that
// the vertical translation loop gives (1, 0).
struct FluxValue {
    double dp = 0.0;
    double dq = 0.0;
    double raw_dp = 0.0;  // internal i_xi Omega convention
    double raw_dq = 0.0;
};

// Periods of lambda_t over f_t(C_p) and f_t(C_q), C_p = {q = const}, C_q = {p = const}; Simpson in t.
// Error (verification_failed) when a slice fails the symplecticity audit at 1e-5.
FluxValue flux_of_path(const SymplecticPath& P, int t_samples = 65, int s_samples = 256);

// Closed curve on the torus in lifted coordinates: c(1) - c(0) is an integer vector, its homology class.
struct TorusCycle {
    std::function<Vec(double)> c;
    std::string name;

    std::array<long, 2> homology_class() const;
};

TorusCycle straight_cycle(long m_p, long m_q, double p0 = 0.0, double q0 = 0.0);
// Straight cycle of class (m_p, m_q) with a transverse wiggle.
TorusCycle wavy_cycle(long m_p, long m_q, double amplitude = 0.05);
TorusCycle contractible_cycle(double r = 0.1, double cp = 0.5, double cq = 0.5);

// ([Omega], swept 2-cycle) = int int Omega(d/ds f_t c(s), d/dt f_t c(s)) ds dt.
double swept_area(const SymplecticPath& P, const TorusCycle& C, int t_samples = 65, int s_samples = 256);

// (flux, [C]) against the swept area; requires a loop (f_1 = id within 1e-6).
Report flux_pairing_check(const SymplecticPath& P, const TorusCycle& C);

struct ConjugationResult {
    Candidate map;  // phi f phi^{-1}
    double residual = 0.0;
};

ConjugationResult conjugate(const Candidate& phi, const Candidate& f);

struct CommutatorHamiltonian {
    Hamiltonian G;
    double max_error = 0.0;  // flow of G vs phi^{-1} f_t^{-1} phi f_t at t = 1
};

// G(q) = F(q) - F(q + b) for a q-only F and phi(p, q) = (p, q + b); Error (verification_failed) above 1e-4.
CommutatorHamiltonian commutator_hamiltonian(const Hamiltonian& F, double b);

}  // namespace hofer
