#include "hofer/growth.hpp"

#include "hofer/hofer.hpp"
#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace hofer {

namespace {

Vec chart_difference(const ManifoldSpec& M, const Vec& a, const Vec& b) {
    Vec d = a - b;
    if (M.kind == ManifoldKind::torus2) {
        d[0] -= std::round(d[0]);
        d[1] -= std::round(d[1]);
    } else if (M.kind == ManifoldKind::cylinder) {
        d[1] -= std::round(d[1]);
    }
    return d;
}

Vec rotate3(const Eigen::Vector3d& axis, double angle, const Vec& x) {
    Eigen::Vector3d y = Eigen::AngleAxisd(angle, axis.normalized()) * Eigen::Vector3d(x.head<3>());
    return vec3(y.x(), y.y(), y.z());
}

Hamiltonian scalar_field(const ManifoldSpec& M, std::function<double(const Vec&)> f, const std::string& name) {
    Hamiltonian H;
    H.manifold = M;
    H.name = name;
    H.value = [f](const Vec& x, double) { return f(x); };
    return H;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

Candidate identity_candidate() {
    return {"id", [](const Vec& x) { return x; }, [](const Vec& x) { return x; }};
}

Candidate torus_translation(double a, double b) {
    auto shift = [](double da, double db) {
        return [da, db](const Vec& x) {
            Vec y = x;
            y[0] += da;
            y[1] += db;
            y[0] -= std::floor(y[0]);
            y[1] -= std::floor(y[1]);
            return y;
        };
    };
    return {"translate(" + fmt(a) + "," + fmt(b) + ")", shift(a, b), shift(-a, -b)};
}

Candidate sphere_rotation(const Eigen::Vector3d& axis, double angle) {
    if (axis.norm() == 0.0) throw Error(ErrorCode::invalid_argument, "rotation axis must be nonzero");
    return {"rotate(" + fmt(angle) + ")", [axis, angle](const Vec& x) { return rotate3(axis, angle, x); },
            [axis, angle](const Vec& x) { return rotate3(axis, -angle, x); }};
}

Candidate flow_candidate(const Hamiltonian& F, double t) {
    const ManifoldSpec M = F.manifold;
    const double t0 = F.time.lo;
    Candidate c;
    c.name = "flow(" + F.name + "," + fmt(t) + ")";
    if (F.has_exact_flow()) {
        c.map = [F, M, t0, t](const Vec& x) { return canonical_point(M, F.exact_flow(x, t0, t0 + t)); };
        c.inverse = [F, M, t0, t](const Vec& x) { return canonical_point(M, F.exact_flow(x, t0 + t, t0)); };
    } else {
        const FlowOptions opt = default_flow_options(F);
        c.map = [F, M, t0, t, opt](const Vec& x) { return canonical_point(M, flow_point(F, x, t0, t0 + t, opt)); };
        c.inverse = [F, M, t0, t, opt](const Vec& x) { return canonical_point(M, flow_point(F, x, t0 + t, t0, opt)); };
    }
    return c;
}

CandidateSet torus_translations(int n) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "need n >= 1");
    CandidateSet C;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) C.push_back(j == 0 && k == 0 ? identity_candidate() : torus_translation(double(j) / n, double(k) / n));
    return C;
}

double symplecticity_residual(const Candidate& c, const ManifoldSpec& M, const Grid& g, double h) {
    std::vector<double> res(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t i) {
        const Vec& x = g.points[i];
        const Vec y = c.map(x);
        const std::vector<Vec> E = tangent_basis(M, x);
        std::vector<Vec> D;
        for (const Vec& e : E) {
            Vec d = chart_difference(M, c.map(retract(M, x, h * e)), c.map(retract(M, x, -h * e))) / (2.0 * h);
            if (M.kind == ManifoldKind::sphere2) d -= y * y.dot(d);
            D.push_back(d);
        }
        for (std::size_t a = 0; a < E.size(); ++a)
            for (std::size_t b = a + 1; b < E.size(); ++b)
                res[i] = std::max(res[i], std::abs(omega_eval(M, y, D[a], D[b]) - omega_eval(M, x, E[a], E[b])));
    });
    return *std::max_element(res.begin(), res.end());
}

DeltaResult delta(const Hamiltonian& F, const CandidateSet& C, const Grid& g) {
    if (C.empty()) throw Error(ErrorCode::invalid_argument, "empty candidate set");
    const double t = F.time.lo;
    const double nF = oscillation(F, t, g).value;
    if (!(nF > 0.0)) throw Error(ErrorCode::invalid_argument, "delta needs ||F|| > 0");
    DeltaResult r;
    r.value = std::numeric_limits<double>::infinity();
    for (const Candidate& c : C) {
        const Hamiltonian S =
            scalar_field(F.manifold, [&F, &c, t](const Vec& x) { return F(x, t) + F(c.map(x), t); }, "F+F.phi");
        const double ratio = oscillation(S, 0.0, g).value / (2.0 * nF);
        r.ratios.push_back(ratio);
        if (ratio < r.value) {
            r.value = ratio;
            r.witness = c.name;
        }
    }
    return r;
}

DeltaResult delta_N(const Hamiltonian& F, int N, const std::vector<CandidateSet>& sequences, const Grid& g) {
    if (N < 1) throw Error(ErrorCode::invalid_argument, "N must be positive");
    const double t = F.time.lo;
    const double nF = oscillation(F, t, g).value;
    if (!(nF > 0.0)) throw Error(ErrorCode::invalid_argument, "delta_N needs ||F|| > 0");
    DeltaResult r;
    if (N == 1) {
        r.value = 1.0;
        r.witness = "id";
        r.ratios.push_back(1.0);
        return r;
    }
    if (sequences.empty()) throw Error(ErrorCode::invalid_argument, "empty candidate set");
    r.value = std::numeric_limits<double>::infinity();
    for (const CandidateSet& seq : sequences) {
        if (static_cast<int>(seq.size()) != N - 1)
            throw Error(ErrorCode::invalid_argument, "each sequence lists phi_1..phi_{N-1}; phi_0 = id is implicit");
        const Hamiltonian S = scalar_field(
            F.manifold,
            [&F, &seq, t](const Vec& x) {
                double s = F(x, t);
                for (const Candidate& c : seq) s += F(c.map(x), t);
                return s;
            },
            "sum F.phi_j");
        const double ratio = oscillation(S, 0.0, g).value / (N * nF);
        r.ratios.push_back(ratio);
        if (ratio < r.value) {
            r.value = ratio;
            r.witness = seq.front().name + (N > 2 ? ",..." : "");
        }
    }
    return r;
}

std::vector<CandidateSet> translation_sequences(int N, const std::vector<std::pair<double, double>>& shifts) {
    std::vector<CandidateSet> out;
    for (const auto& [a, b] : shifts) {
        CandidateSet seq;
        for (int j = 1; j < N; ++j) seq.push_back(torus_translation(j * a, j * b));
        out.push_back(seq);
    }
    return out;
}

bool has_winding_component(const std::vector<char>& marked, int np, int nq) {
    if (static_cast<int>(marked.size()) != np * nq) throw Error(ErrorCode::invalid_argument, "mask size mismatch");
    const int unset = std::numeric_limits<int>::min();
    std::vector<int> lift(marked.size(), unset);
    for (int start = 0; start < np * nq; ++start) {
        if (!marked[start] || lift[start] != unset) continue;
        // breadth-first search on the lift to R in q; meeting a cell at two lifts means the component winds
        std::deque<int> queue{start};
        lift[start] = 0;
        while (!queue.empty()) {
            const int c = queue.front();
            queue.pop_front();
            const int ip = c / nq, iq = c % nq;
            const int moves[4][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
            for (const auto& m : moves) {
                const int jp = ip + m[0];
                if (jp < 0 || jp >= np) continue;
                int jq = iq + m[1], dl = 0;
                if (jq == nq) {
                    jq = 0;
                    dl = 1;
                } else if (jq < 0) {
                    jq = nq - 1;
                    dl = -1;
                }
                const int n = jp * nq + jq;
                if (!marked[n]) continue;
                const int l = lift[c] + dl;
                if (lift[n] == unset) {
                    lift[n] = l;
                    queue.push_back(n);
                } else if (lift[n] != l) {
                    return true;
                }
            }
        }
    }
    return false;
}

ReverseKamResult reverse_kam_E(const Hamiltonian& F, const Grid& g, double tol) {
    if (F.manifold.kind != ManifoldKind::cylinder) throw Error(ErrorCode::unsupported, "E(F) is defined on the cylinder");
    const int n = g.resolution;
    if (n < 64) throw Error(ErrorCode::invalid_argument, "E(F) needs grid resolution >= 64");
    if (static_cast<int>(g.size()) != n * n) throw Error(ErrorCode::invalid_argument, "E(F) needs a full box grid");
    if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
    std::vector<double> v(g.size());
    parallel_for(g.size(), [&](std::size_t i) { v[i] = F(g.points[i], F.time.lo); });
    double jump = 0.0;
    for (int ip = 0; ip < n; ++ip)
        for (int iq = 0; iq < n; ++iq) {
            const double a = v[ip * n + iq];
            jump = std::max(jump, std::abs(a - v[ip * n + (iq + 1) % n]));
            if (ip + 1 < n) jump = std::max(jump, std::abs(a - v[(ip + 1) * n + iq]));
        }
    if (tol < 0.5 * jump) {
        std::ostringstream os;
        os << "tol " << tol << " is below the grid-induced band width " << 0.5 * jump;
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    ReverseKamResult r;
    r.tolerance = tol;
    std::vector<double> levels;
    for (double E = lo; E < hi; E += tol) levels.push_back(E);
    levels.push_back(hi);
    std::vector<char> wind(levels.size(), 0);
    parallel_for(levels.size(), [&](std::size_t k) {
        std::vector<char> band(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) band[i] = std::abs(v[i] - levels[k]) < tol;
        wind[k] = has_winding_component(band, n, n);
    });
    r.levels_scanned = static_cast<int>(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!wind[k]) continue;
        ++r.winding_levels;
        if (std::abs(levels[k]) >= r.value) {
            r.value = std::abs(levels[k]);
            r.level = levels[k];
        }
    }
    return r;
}

CommutatorCheck straightened_commutator(const Hamiltonian& F, const Candidate& phi, double T, const Grid& g) {
    if (!F.autonomous) throw Error(ErrorCode::invalid_argument, "straightened commutator needs an autonomous F");
    if (!(T > 0.0)) throw Error(ErrorCode::invalid_argument, "T must be positive");
    const ManifoldSpec M = F.manifold;
    const FlowOptions opt = default_flow_options(F);
    const Hamiltonian Fc = F;
    // f_{t1} f_{t0}^{-1}
    auto evolve = [Fc, opt](const Vec& x, double t0, double t1) {
        if (Fc.has_exact_flow()) return Fc.exact_flow(x, t0, t1);
        return flow_point(Fc, x, t0, t1, opt);
    };
    CommutatorCheck out;
    Hamiltonian& G = out.G;
    G.manifold = M;
    G.autonomous = false;
    G.time = {0.0, T};
    G.name = "straightened_commutator";
    G.value = [Fc, phi, evolve](const Vec& x, double t) {
        return Fc.value(x, 0.0) + Fc.value(phi.inverse(canonical_point(Fc.manifold, evolve(x, t, 0.0))), 0.0);
    };

    Report& r = out.report;
    r.experiment = "straightened-commutator";
    // sample: every k-th grid point
    std::vector<Vec> xs;
    const std::size_t stride = std::max<std::size_t>(1, g.size() / 25);
    for (std::size_t i = 0; i < g.size(); i += stride) xs.push_back(g.points[i]);
    double worst = 0.0;
    for (double t : {0.5 * T, T}) {
        std::vector<double> err(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) {
            const Vec& x = xs[i];
            const Vec y = flow_point(G, x, 0.0, t, FlowOptions{Scheme::rk4, 1e-3, std::nullopt, 1e-12, 50});
            // g_t = f_t phi f_t phi^{-1}
            const Vec z = evolve(phi.map(canonical_point(M, evolve(phi.inverse(x), 0.0, t))), 0.0, t);
            err[i] = distance(M, canonical_point(M, y), canonical_point(M, z));
        });
        worst = std::max(worst, *std::max_element(err.begin(), err.end()));
    }
    r.add_scalar("max_path_error", worst);
    r.check_le("path_matches_f_phi_f_phiinv", worst, 1e-4);

    std::vector<double> norms;
    for (int k = 0; k <= 8; ++k) norms.push_back(oscillation(G, T * k / 8.0, g).value);
    const double spread = *std::max_element(norms.begin(), norms.end()) - *std::min_element(norms.begin(), norms.end());
    const Hamiltonian S = scalar_field(
        M, [Fc, phi](const Vec& x) { return Fc.value(x, 0.0) + Fc.value(phi.inverse(x), 0.0); }, "F+F.phi^-1");
    const double target = oscillation(S, 0.0, g).value;
    r.add_scalar("norm_G_t0", norms.front());
    r.add_scalar("norm_spread", spread);
    r.add_scalar("norm_F_plus_F_phiinv", target);
    r.check_le("norm_constant_in_t", spread, 1e-4);
    r.check_le("norm_equals_F_plus_F_phiinv", std::abs(norms.front() - target), 1e-4);
    return out;
}

SkewProduct tilted_rotation_loop(double alpha, double beta) {
    SkewProduct S;
    S.manifold = ManifoldSpec::sphere2();
    S.alpha = alpha;
    S.name = "tilted_rotation_loop";
    const Eigen::Matrix3d Rx = Eigen::AngleAxisd(beta, Eigen::Vector3d::UnitX()).toRotationMatrix();
    S.h = [Rx](const Vec& y, double t) {
        const Eigen::Vector3d z = Rx * (Eigen::AngleAxisd(2.0 * pi * t, Eigen::Vector3d::UnitZ()) * Eigen::Vector3d(y.head<3>()));
        return vec3(z.x(), z.y(), z.z());
    };
    return S;
}

SkewProduct identity_loop(const ManifoldSpec& M, double alpha) {
    return SkewProduct{M, [](const Vec& y, double) { return y; }, alpha, "identity_loop"};
}

double loop_closure_defect(const SkewProduct& S, const Grid& g) {
    double worst = 0.0;
    for (const Vec& y : g.points) worst = std::max(worst, distance(S.manifold, S.h(y, 1.0), S.h(y, 0.0)));
    return worst;
}

SkewPoint skew_iterate(const SkewProduct& S, SkewPoint p, int k) {
    if (k < 0) throw Error(ErrorCode::invalid_argument, "iterate count must be non-negative");
    for (int i = 0; i < k; ++i) {
        p.y = S.h(p.y, p.t);
        p.t += S.alpha;
        p.t -= std::floor(p.t);
    }
    return p;
}

Curve LoopAverage::curve() const {
    Curve c{{"N", "vert", "vert0"}, {}};
    for (std::size_t i = 0; i < N.size(); ++i) c.rows.push_back({double(N[i]), vert[i], vert0[i]});
    return c;
}

LoopAverage loop_average_decay(const SkewProduct& S, const std::function<double(const Vec&, double)>& H, int N_max,
                               const Grid& g, int t_samples) {
    if (N_max < 1) throw Error(ErrorCode::invalid_argument, "N_max must be positive");
    if (t_samples < 2) throw Error(ErrorCode::invalid_argument, "need at least two time samples");
    const std::size_t P = g.size(), T = static_cast<std::size_t>(t_samples);
    std::vector<SkewPoint> state(P * T);
    std::vector<double> sum(P * T, 0.0), previous(P * T, 0.0);
    for (std::size_t j = 0; j < T; ++j)
        for (std::size_t i = 0; i < P; ++i) state[j * P + i] = {g.points[i], double(j) / T};
    LoopAverage out;
    for (int N = 1; N <= N_max; ++N) {
        previous = sum;
        // F_N = F_{N-1} + H o T^{N-1}
        parallel_for(state.size(), [&](std::size_t s) {
            sum[s] += H(state[s].y, state[s].t);
            state[s] = skew_iterate(S, state[s], 1);
        });
        double vert = 0.0, vert0 = 0.0;
        for (std::size_t j = 0; j < T; ++j) {
            const auto first = sum.begin() + j * P;
            const auto [mn, mx] = std::minmax_element(first, first + P);
            vert = std::max(vert, *mx - *mn);
            vert0 += (*mx - *mn) / T;  // periodic trapezoid in t
        }
        out.N.push_back(N);
        out.vert.push_back(vert / N);
        out.vert0.push_back(vert0 / N);
    }
    // telescoping identity on a few samples, with H o T^{N-1} recomputed from scratch
    for (std::size_t s = 0; s < state.size(); s += std::max<std::size_t>(1, state.size() / 7)) {
        const std::size_t i = s % P, j = s / P;
        const SkewPoint p0{g.points[i], double(j) / T};
        const SkewPoint pk = skew_iterate(S, p0, N_max - 1);
        out.telescoping_defect = std::max(out.telescoping_defect, std::abs(sum[s] - previous[s] - H(pk.y, pk.t)));
    }
    return out;
}

}  // namespace hofer
