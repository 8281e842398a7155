#include "hofer/flux.hpp"

#include "hofer/flow.hpp"
#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hofer {

namespace {

constexpr double time_step = 1e-4;

// cubic clock: its derivative is quadratic, which Simpson integrates exactly
double clock(double u) { return u * u * (3.0 - 2.0 * u); }
double clock_rate(double u) { return 6.0 * u * (1.0 - u); }

Vec wrap(Vec d) {
    d[0] -= std::round(d[0]);
    d[1] -= std::round(d[1]);
    return d;
}

double omega2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

// Lifted samples and s-derivatives of s -> f_t(c(s)), s_k = k / N.
struct ImageCurve {
    std::vector<Vec> points;
    std::vector<Vec> tangents;
};

ImageCurve image_curve(const SymplecticPath& P, const TorusCycle& C, double t, int N) {
    const auto cls = C.homology_class();
    const Vec shift = vec2(double(cls[0]), double(cls[1]));
    std::vector<Vec> y(N);
    for (int k = 0; k < N; ++k) y[k] = P(C.c(double(k) / N), t);
    // unwrap along s, then differentiate the periodic remainder
    std::vector<Vec> z(N);
    z[0] = y[0];
    for (int k = 1; k < N; ++k) z[k] = z[k - 1] + wrap(y[k] - y[k - 1]);
    ImageCurve out;
    out.points = z;
    out.tangents.assign(N, shift);
    for (int a = 0; a < 2; ++a) {
        std::vector<double> r(N);
        for (int k = 0; k < N; ++k) r[k] = z[k][a] - shift[a] * double(k) / N;
        const std::vector<double> dr = periodic_derivative(r);
        for (int k = 0; k < N; ++k) out.tangents[k][a] += dr[k];
    }
    return out;
}

// int_0^1 Omega(xi_t(f_t c(s)), d/ds f_t c(s)) ds
double raw_period(const SymplecticPath& P, const TorusCycle& C, double t, int N) {
    std::vector<double> v(N);
    if (P.jacobian) {
        // a strongly sheared image is badly resolved; push the tangent of C forward instead
        const std::vector<Vec> dc = image_curve(SymplecticPath{[](const Vec& x, double) { return x; }, nullptr, "id", nullptr},
                                                C, 0.0, N)
                                        .tangents;
        parallel_for(N, [&](std::size_t k) {
            const Vec x = C.c(double(k) / N);
            const Vec tangent = P.jacobian(x, t) * dc[k];
            v[k] = omega2(P.dt(x, t), tangent);
        });
    } else {
        const ImageCurve im = image_curve(P, C, t, N);
        parallel_for(N, [&](std::size_t k) { v[k] = omega2(P.dt(C.c(double(k) / N), t), im.tangents[k]); });
    }
    double s = 0.0;
    for (double x : v) s += x;
    return s / N;
}

void check_counts(int t_samples, int s_samples) {
    if (t_samples < 3 || t_samples % 2 == 0) throw Error(ErrorCode::invalid_argument, "t_samples must be odd and >= 3");
    if (s_samples < 16) throw Error(ErrorCode::invalid_argument, "s_samples must be at least 16");
}

double loop_defect(const SymplecticPath& P) {
    const Grid g = sample_grid(ManifoldSpec::torus2(), 8);
    double worst = 0.0;
    for (const Vec& x : g.points) worst = std::max(worst, wrap(P(x, 1.0) - x).norm());
    for (const Vec& x : g.points) worst = std::max(worst, wrap(P(x, 0.0) - x).norm());
    return worst;
}

}  // namespace

Vec SymplecticPath::dt(const Vec& x, double t) const {
    if (velocity) return velocity(x, t);
    return wrap(map(x, t + time_step) - map(x, t - time_step)) / (2.0 * time_step);
}

SymplecticPath translation_path(double a, double b) {
    std::ostringstream name;
    name << "translate(" << a << "," << b << ")";
    return {[a, b](const Vec& x, double t) { return vec2(x[0] + a * t, x[1] + b * t); },
            [a, b](const Vec&, double) { return vec2(a, b); }, name.str(), nullptr};
}

Hamiltonian pulsing_shear(double a) {
    Hamiltonian F;
    F.manifold = ManifoldSpec::torus2();
    F.name = "pulsing_shear";
    F.autonomous = false;
    F.value = [a](const Vec& x, double t) { return a * std::cos(2 * pi * t) * std::sin(2 * pi * x[0]) / (2 * pi); };
    F.gradient = [a](const Vec& x, double t) { return vec2(a * std::cos(2 * pi * t) * std::cos(2 * pi * x[0]), 0.0); };
    F.exact_flow = [a](const Vec& x, double t0, double t1) {
        const double c = a * (std::sin(2 * pi * t1) - std::sin(2 * pi * t0)) / (2 * pi);
        return vec2(x[0], x[1] + c * std::cos(2 * pi * x[0]));
    };
    return F;
}

SymplecticPath hamiltonian_path(const Hamiltonian& F) {
    if (F.manifold.kind != ManifoldKind::torus2) throw Error(ErrorCode::unsupported, "flux paths live on the torus");
    const FlowOptions opt = default_flow_options(F);
    SymplecticPath P;
    P.name = "flow(" + F.name + ")";
    if (F.has_exact_flow()) {
        P.map = [F](const Vec& x, double t) { return F.exact_flow(x, 0.0, t); };
    } else {
        P.map = [F, opt](const Vec& x, double t) { return flow_point(F, x, 0.0, t, opt); };
    }
    P.velocity = [F, m = P.map](const Vec& x, double t) { return sgrad(F, m(x, t), t); };
    // differences of an implicitly solved flow are noisy; use the linearized flow instead
    if (!F.has_exact_flow()) P.jacobian = [F](const Vec& x, double t) { return linearized_flow(F, x, 0.0, t); };
    return P;
}

SymplecticPath concatenate(const SymplecticPath& f, const SymplecticPath& g) {
    SymplecticPath P;
    P.name = f.name + "*" + g.name;
    P.map = [f, g](const Vec& x, double t) {
        if (t <= 0.5) return f(x, clock(2.0 * t));
        return g(f(x, 1.0), clock(2.0 * t - 1.0));
    };
    P.velocity = [f, g](const Vec& x, double t) -> Vec {
        if (t <= 0.5) return f.dt(x, clock(2.0 * t)) * (2.0 * clock_rate(2.0 * t));
        return g.dt(f(x, 1.0), clock(2.0 * t - 1.0)) * (2.0 * clock_rate(2.0 * t - 1.0));
    };
    return P;
}

SymplecticPath reparametrize_path(const SymplecticPath& f, const std::function<double(double)>& b,
                                  const std::function<double(double)>& db) {
    return {[f, b](const Vec& x, double t) { return f(x, b(t)); },
            [f, b, db](const Vec& x, double t) -> Vec { return f.dt(x, b(t)) * db(t); }, f.name + "(reparametrized)", nullptr};
}

SymplecticPath parse_path(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    auto number = [&spec](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw Error(ErrorCode::config, "bad number in path '" + spec + "'");
        return v;
    };
    if (colon != std::string::npos) {
        const std::string arg = spec.substr(colon + 1);
        if (head == "translate_q") return translation_path(0.0, number(arg));
        if (head == "translate_p") return translation_path(number(arg), 0.0);
        if (head == "translate") {
            const auto comma = arg.find(',');
            if (comma == std::string::npos) throw Error(ErrorCode::config, "translate needs a,b");
            return translation_path(number(arg.substr(0, comma)), number(arg.substr(comma + 1)));
        }
        throw Error(ErrorCode::config, "unknown path '" + spec + "'");
    }
    const Hamiltonian F = catalog(spec);
    if (F.manifold.kind != ManifoldKind::torus2) throw Error(ErrorCode::config, "path Hamiltonian must live on the torus");
    return hamiltonian_path(F);
}

double path_symplecticity_residual(const SymplecticPath& P) {
    const ManifoldSpec T = ManifoldSpec::torus2();
    const Grid g = sample_grid(T, 8);
    double worst = 0.0;
    if (P.jacobian) {
        // Omega = dp ^ dq: the pullback defect is |det Df_t - 1|
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (const Vec& x : g.points) worst = std::max(worst, std::abs(P.jacobian(x, t).determinant() - 1.0));
        return worst;
    }
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Candidate c{P.name, [&P, t](const Vec& x) { return P(x, t); }, nullptr};
        worst = std::max(worst, symplecticity_residual(c, T, g));
    }
    return worst;
}

FluxValue flux_of_path(const SymplecticPath& P, int t_samples, int s_samples) {
    check_counts(t_samples, s_samples);
    const double audit = path_symplecticity_residual(P);
    if (audit > 1e-5) {
        std::ostringstream os;
        os << "path " << P.name << " fails the symplecticity audit (" << audit << ")";
        throw Error(ErrorCode::verification_failed, os.str());
    }
    const TorusCycle Cp = straight_cycle(1, 0, 0.0, 0.3), Cq = straight_cycle(0, 1, 0.3, 0.0);
    std::vector<double> a(t_samples), b(t_samples);
    for (int i = 0; i < t_samples; ++i) {
        const double t = double(i) / (t_samples - 1);
        a[i] = raw_period(P, Cp, t, s_samples);
        b[i] = raw_period(P, Cq, t, s_samples);
    }
    FluxValue f;
    f.raw_dp = simpson(a, 0.0, 1.0);
    f.raw_dq = simpson(b, 0.0, 1.0);
    f.dp = -f.raw_dp;
    f.dq = -f.raw_dq;
    return f;
}

std::array<long, 2> TorusCycle::homology_class() const {
    const Vec d = c(1.0) - c(0.0);
    const std::array<long, 2> m{std::lround(d[0]), std::lround(d[1])};
    if (std::abs(d[0] - m[0]) > 1e-9 || std::abs(d[1] - m[1]) > 1e-9)
        throw Error(ErrorCode::invalid_argument, "cycle " + name + " does not close on the torus");
    return m;
}

TorusCycle straight_cycle(long m_p, long m_q, double p0, double q0) {
    std::ostringstream name;
    name << "straight(" << m_p << "," << m_q << ")";
    return {[=](double s) { return vec2(p0 + m_p * s, q0 + m_q * s); }, name.str()};
}

TorusCycle wavy_cycle(long m_p, long m_q, double amplitude) {
    const double n = std::hypot(double(m_p), double(m_q));
    const double np = n > 0 ? -m_q / n : 0.0, nq = n > 0 ? m_p / n : 1.0;
    std::ostringstream name;
    name << "wavy(" << m_p << "," << m_q << ")";
    return {[=](double s) {
                const double w = amplitude * (std::sin(2 * pi * s) + 0.5 * std::cos(6 * pi * s) - 0.5);
                return vec2(0.1 + m_p * s + w * np, 0.2 + m_q * s + w * nq);
            },
            name.str()};
}

TorusCycle contractible_cycle(double r, double cp, double cq) {
    return {[=](double s) { return vec2(cp + r * std::cos(2 * pi * s), cq + 0.7 * r * std::sin(2 * pi * s)); },
            "contractible"};
}

double swept_area(const SymplecticPath& P, const TorusCycle& C, int t_samples, int s_samples) {
    check_counts(t_samples, s_samples);
    std::vector<double> v(t_samples);
    for (int i = 0; i < t_samples; ++i) v[i] = -raw_period(P, C, double(i) / (t_samples - 1), s_samples);
    return simpson(v, 0.0, 1.0);
}

Report flux_pairing_check(const SymplecticPath& P, const TorusCycle& C) {
    Report r;
    r.experiment = "flux-pairing";
    const double gap = loop_defect(P);
    r.add_scalar("loop_defect", gap);
    r.check_le("is_loop", gap, 1e-6);
    const FluxValue f = flux_of_path(P);
    const auto m = C.homology_class();
    const double lhs = f.dp * m[0] + f.dq * m[1];
    const double rhs = swept_area(P, C);
    r.add_scalar("flux_dp", f.dp);
    r.add_scalar("flux_dq", f.dq);
    r.add_scalar("flux_pairing", lhs);
    r.add_scalar("swept_area", rhs);
    r.add_scalar("difference", std::abs(lhs - rhs));
    r.check_le("pairing_identity", std::abs(lhs - rhs), 1e-4);
    return r;
}

ConjugationResult conjugate(const Candidate& phi, const Candidate& f) {
    ConjugationResult out;
    out.map.name = phi.name + " o " + f.name + " o " + phi.name + "^-1";
    out.map.map = [phi, f](const Vec& x) { return phi.map(f.map(phi.inverse(x))); };
    if (f.inverse) out.map.inverse = [phi, f](const Vec& x) { return phi.map(f.inverse(phi.inverse(x))); };
    out.residual = symplecticity_residual(out.map, ManifoldSpec::torus2(), sample_grid(ManifoldSpec::torus2(), 8));
    return out;
}

CommutatorHamiltonian commutator_hamiltonian(const Hamiltonian& F, double b) {
    if (F.manifold.kind != ManifoldKind::torus2) throw Error(ErrorCode::unsupported, "commutator Hamiltonian lives on the torus");
    if (!F.autonomous) throw Error(ErrorCode::invalid_argument, "F must be autonomous");
    if (!(b >= 0.0 && b < 1.0)) throw Error(ErrorCode::invalid_argument, "b must lie in [0, 1)");
    for (int i = 0; i < 16; ++i) {
        const double q = (i + 0.37) / 16.0;
        if (std::abs(F(vec2(0.11 * i, q), 0.0) - F(vec2(0.0, q), 0.0)) > 1e-12)
            throw Error(ErrorCode::invalid_argument, "F must depend on q only");
    }
    CommutatorHamiltonian out;
    Hamiltonian& G = out.G;
    G.manifold = F.manifold;
    G.name = "commutator(" + F.name + ")";
    G.value = [F, b](const Vec& x, double) { return F(vec2(0.0, x[1]), 0.0) - F(vec2(0.0, x[1] + b), 0.0); };
    G.gradient = [F, b](const Vec& x, double) {
        return vec2(0.0, F.grad(vec2(0.0, x[1]), 0.0)[1] - F.grad(vec2(0.0, x[1] + b), 0.0)[1]);
    };

    const FlowOptions opt = default_flow_options(F);
    auto f = [&F, &opt](const Vec& x, double t0, double t1) {
        return F.has_exact_flow() ? F.exact_flow(x, t0, t1) : flow_point(F, x, t0, t1, opt);
    };
    const Grid g = sample_grid(F.manifold, 16);
    std::vector<double> err(g.size());
    parallel_for(g.size(), [&](std::size_t i) {
        const Vec& x = g.points[i];
        Vec y = f(x, 0.0, 1.0);
        y[1] += b;
        y = f(y, 1.0, 0.0);
        y[1] -= b;
        const Vec z = flow_point(G, x, 0.0, 1.0, FlowOptions{Scheme::rk4, 1e-3, std::nullopt, 1e-12, 50});
        err[i] = wrap(y - z).norm();
    });
    out.max_error = *std::max_element(err.begin(), err.end());
    if (out.max_error > 1e-4) {
        std::ostringstream os;
        os << "flow of G misses the commutator by " << out.max_error;
        throw Error(ErrorCode::verification_failed, os.str());
    }
    return out;
}

}  // namespace hofer
