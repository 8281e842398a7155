#include "hofer/geodesics.hpp"

#include "hofer/hofer.hpp"
#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hofer {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// Fourth-order central differences, one-sided fourth order at the two ends.
std::vector<Vec> derivative(const VariationField& v) {
    const int n = v.intervals();
    if (n < 8) throw Error(ErrorCode::invalid_argument, "variation field needs at least 8 intervals");
    const double h = v.times[1] - v.times[0];
    const auto& y = v.values;
    std::vector<Vec> d(n + 1);
    for (int i = 2; i <= n - 2; ++i) d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
    auto forward = [&](int i, int s) {
        return Vec(s * (-25.0 * y[i] + 48.0 * y[i + s] - 36.0 * y[i + 2 * s] + 16.0 * y[i + 3 * s] - 3.0 * y[i + 4 * s]) /
                   (12.0 * h));
    };
    d[0] = forward(0, 1);
    d[1] = forward(1, 1);
    d[n] = forward(n, -1);
    d[n - 1] = forward(n - 1, -1);
    return d;
}

double simpson_of(const std::vector<double>& f, double a, double b) {
    if (f.size() % 2 == 1) return simpson(f, a, b);
    // even sample count: Simpson on all but the last interval, trapezoid on the last
    std::vector<double> head(f.begin(), f.end() - 1);
    const double h = (b - a) / (f.size() - 1);
    return simpson(head, a, b - h) + 0.5 * h * (f[f.size() - 2] + f.back());
}

double plane_omega(const Vec& a, const Vec& b) {
    const int n = static_cast<int>(a.size()) / 2;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a[j] * b[n + j] - a[n + j] * b[j];
    return s;
}

// Hessian restricted to the tangent plane, in the basis of tangent_basis.
Mat intrinsic_hessian(const Hamiltonian& F, const Vec& x, double t) {
    const std::vector<Vec> E = tangent_basis(F.manifold, x);
    const int d = static_cast<int>(E.size());
    Mat H = F.hess(x, t);
    if (F.manifold.kind == ManifoldKind::sphere2) H -= x.dot(F.grad(x, t)) * Mat::Identity(3, 3);
    Mat R(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) R(i, j) = E[i].dot(H * E[j]);
    return R;
}

// Local Newton search for a maximum (sign = +1) or minimum (sign = -1) of f near y.
bool newton_extremum(const std::function<double(const Vec&)>& f, const ManifoldSpec& M, Vec& y, int sign) {
    for (int it = 0; it < 40; ++it) {
        const std::vector<Vec> E = tangent_basis(M, y);
        const int d = static_cast<int>(E.size());
        auto local = [&](const Vec& u) {
            Vec v = Vec::Zero(y.size());
            for (int i = 0; i < d; ++i) v += u[i] * E[i];
            return f(retract(M, y, v));
        };
        const Vec zero = Vec::Zero(d);
        const Vec g = fd_gradient(local, zero, 1e-5);
        const Mat H = fd_hessian(local, zero, 1e-4);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(sign * H));
        if (es.eigenvalues().maxCoeff() >= 0.0) return false;
        Vec step = -H.ldlt().solve(g);
        const double len = step.norm();
        if (len > 0.05) step *= 0.05 / len;
        Vec v = Vec::Zero(y.size());
        for (int i = 0; i < d; ++i) v += step[i] * E[i];
        y = retract(M, y, v);
        if (len < 1e-11) return true;
    }
    return true;
}

double fd5(const std::function<double(double)>& f, double h) {
    return (-f(2 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2 * h)) / (12.0 * h * h);
}

}  // namespace

VariationField VariationField::sample(const std::function<Vec(double)>& v, int n, double tol) {
    if (n < 8) throw Error(ErrorCode::invalid_argument, "variation field needs at least 8 intervals");
    VariationField f;
    for (int i = 0; i <= n; ++i) {
        const double t = double(i) / n;
        f.times.push_back(t);
        f.values.push_back(v(t));
    }
    const double e0 = f.values.front().norm(), e1 = f.values.back().norm();
    if (e0 > tol || e1 > tol) {
        std::ostringstream os;
        os << "variation field does not vanish at the ends: |v(0)|=" << e0 << ", |v(1)|=" << e1;
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    f.values.front().setZero();
    f.values.back().setZero();
    return f;
}

double energy(const VariationField& v) {
    const std::vector<Vec> d = derivative(v);
    std::vector<double> e(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) e[i] = d[i].squaredNorm();
    return simpson_of(e, 0.0, 1.0);
}

double curve_length(const VariationField& v) {
    const std::vector<Vec> d = derivative(v);
    std::vector<double> e(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) e[i] = d[i].norm();
    return simpson_of(e, 0.0, 1.0);
}

double signed_area(const VariationField& v) {
    const std::vector<Vec> d = derivative(v);
    std::vector<double> e(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) e[i] = 0.5 * plane_omega(v.values[i], d[i]);
    return simpson_of(e, 0.0, 1.0);
}

Hamiltonian V1Generator::slice(double t) const {
    Hamiltonian K;
    K.manifold = G.manifold;
    K.time = {t, t};
    K.autonomous = true;
    K.name = "K_t";
    auto P = primitive;
    K.value = [P, t](const Vec& x, double) { return P(x, t); };
    if (primitive_gradient) {
        auto dP = primitive_gradient;
        K.gradient = [dP, t](const Vec& x, double) { return dP(x, t); };
    }
    return K;
}

V1Check check_v1(const Hamiltonian& G, const std::vector<Vec>& samples, double tol) {
    const QuadratureRule rule = gauss_legendre(24, G.time.lo, G.time.hi);
    V1Check c;
    for (const Vec& x : samples) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * G(x, rule.nodes[i]);
        c.max_time_average = std::max(c.max_time_average, std::abs(s));
    }
    c.ok = c.max_time_average <= tol;
    return c;
}

V1Generator v1_project(const Hamiltonian& K, int nodes) {
    if (nodes < 2) throw Error(ErrorCode::invalid_argument, "v1_project needs at least 2 nodes");
    const QuadratureRule avg = gauss_legendre(nodes, K.time.lo, K.time.hi);
    const double span = K.time.width();
    auto mean = [K, avg, span](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < avg.nodes.size(); ++i) s += avg.weights[i] * K(x, avg.nodes[i]);
        return s / span;
    };
    auto mean_grad = [K, avg, span](const Vec& x) {
        Vec s = Vec::Zero(x.size());
        for (std::size_t i = 0; i < avg.nodes.size(); ++i) s += avg.weights[i] * K.grad(x, avg.nodes[i]);
        return Vec(s / span);
    };
    V1Generator out;
    out.G = K;
    out.G.autonomous = false;
    out.G.exact_flow = nullptr;
    out.G.hessian = nullptr;
    out.G.name = "v1(" + K.name + ")";
    out.G.value = [K, mean](const Vec& x, double t) { return K.value(x, t) - mean(x); };
    out.G.gradient = [K, mean_grad](const Vec& x, double t) { return Vec(K.grad(x, t) - mean_grad(x)); };
    const Hamiltonian G = out.G;
    const double t0 = K.time.lo;
    out.primitive = [G, t0, nodes](const Vec& x, double t) {
        if (t == t0) return 0.0;
        const QuadratureRule r = gauss_legendre(nodes, t0, t);
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * G.value(x, r.nodes[i]);
        return s;
    };
    out.primitive_gradient = [G, t0, nodes](const Vec& x, double t) {
        Vec s = Vec::Zero(x.size());
        if (t == t0) return s;
        const QuadratureRule r = gauss_legendre(nodes, t0, t);
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * G.grad(x, r.nodes[i]);
        return s;
    };
    return out;
}

namespace {

// A spatial basis function with gradient.
struct SpatialTerm {
    enum Kind { monomial, fourier, cylinder_mode } kind = monomial;
    std::vector<int> exponents;  // monomial powers, or (j, k) wave numbers
    bool sine = false;
    double coef = 0.0;

    double eval(const Vec& x, Vec* grad) const {
        const int d = static_cast<int>(x.size());
        if (kind == monomial) {
            double v = coef;
            for (int i = 0; i < d; ++i) v *= std::pow(x[i], exponents[i]);
            if (grad) {
                for (int i = 0; i < d; ++i) {
                    if (exponents[i] == 0) continue;
                    double g = coef * exponents[i] * std::pow(x[i], exponents[i] - 1);
                    for (int j = 0; j < d; ++j)
                        if (j != i) g *= std::pow(x[j], exponents[j]);
                    (*grad)[i] += g;
                }
            }
            return v;
        }
        if (kind == fourier) {
            const double a = 2.0 * pi * (exponents[0] * x[0] + exponents[1] * x[1]);
            const double v = sine ? std::sin(a) : std::cos(a);
            const double dv = sine ? std::cos(a) : -std::sin(a);
            if (grad) {
                (*grad)[0] += coef * dv * 2.0 * pi * exponents[0];
                (*grad)[1] += coef * dv * 2.0 * pi * exponents[1];
            }
            return coef * v;
        }
        // p^a * trig(2 pi k q)
        const int a = exponents[0], k = exponents[1];
        const double w = 2.0 * pi * k * x[1];
        const double tq = k == 0 ? 1.0 : (sine ? std::sin(w) : std::cos(w));
        const double dtq = k == 0 ? 0.0 : 2.0 * pi * k * (sine ? std::cos(w) : -std::sin(w));
        const double pa = std::pow(x[0], a);
        if (grad) {
            (*grad)[0] += coef * (a == 0 ? 0.0 : a * std::pow(x[0], a - 1)) * tq;
            (*grad)[1] += coef * pa * dtq;
        }
        return coef * pa * tq;
    }
};

struct TimeTerm {
    int k = 1;
    bool sine = true;
    std::vector<SpatialTerm> spatial;

    double c(double t) const { return sine ? std::sin(2.0 * pi * k * t) : std::cos(2.0 * pi * k * t); }
    double C(double t) const {
        const double w = 2.0 * pi * k;
        return sine ? (1.0 - std::cos(w * t)) / w : std::sin(w * t) / w;
    }
    double space(const Vec& x, Vec* grad) const {
        double s = 0.0;
        for (const auto& term : spatial) s += term.eval(x, grad);
        return s;
    }
};

std::vector<SpatialTerm> random_spatial(const ManifoldSpec& M, std::mt19937_64& rng, double amplitude) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<SpatialTerm> out;
    const int d = M.ambient_dim();
    if (M.kind == ManifoldKind::euclidean || M.kind == ManifoldKind::sphere2) {
        // all monomials of degree 1..3
        std::vector<std::vector<int>> exps;
        std::vector<int> e(d, 0);
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == d) {
                int deg = 0;
                for (int v : e) deg += v;
                if (deg >= 1) exps.push_back(e);
                return;
            }
            for (int p = 0; p <= left; ++p) {
                e[i] = p;
                rec(i + 1, left - p);
            }
            e[i] = 0;
        };
        rec(0, 3);
        const double scale = amplitude / std::sqrt(double(exps.size()));
        for (const auto& ex : exps) out.push_back({SpatialTerm::monomial, ex, false, scale * normal(rng)});
    } else if (M.kind == ManifoldKind::torus2) {
        std::vector<std::vector<int>> waves;
        for (int j = -2; j <= 2; ++j)
            for (int k = 0; k <= 2; ++k)
                if (k > 0 || j > 0) waves.push_back({j, k});
        const double scale = amplitude / std::sqrt(2.0 * waves.size()) / (2.0 * pi);
        for (const auto& w : waves)
            for (bool s : {false, true}) out.push_back({SpatialTerm::fourier, w, s, scale * normal(rng)});
    } else {
        const double scale = amplitude / std::sqrt(20.0);
        for (int a = 0; a <= 3; ++a)
            for (int k = 0; k <= 2; ++k)
                for (bool s : {false, true}) {
                    if (k == 0 && (s || a == 0)) continue;
                    out.push_back({SpatialTerm::cylinder_mode, {a, k}, s, scale * normal(rng)});
                }
    }
    return out;
}

}  // namespace

V1Generator random_v1_generator(const ManifoldSpec& M, std::uint64_t seed, int terms, double amplitude,
                                int max_frequency) {
    if (terms < 1 || max_frequency < 1) throw Error(ErrorCode::invalid_argument, "need at least one term and frequency");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> freq(1, max_frequency);
    std::bernoulli_distribution coin(0.5);
    auto parts = std::make_shared<std::vector<TimeTerm>>();
    for (int i = 0; i < terms; ++i) {
        TimeTerm tt;
        tt.k = freq(rng);
        tt.sine = coin(rng);
        tt.spatial = random_spatial(M, rng, amplitude / std::sqrt(double(terms)));
        parts->push_back(std::move(tt));
    }
    const int d = M.ambient_dim();
    V1Generator out;
    Hamiltonian& G = out.G;
    G.manifold = M;
    G.autonomous = false;
    G.time = {0.0, 1.0};
    std::ostringstream os;
    os << "random_v1(seed=" << seed << ")";
    G.name = os.str();
    G.value = [parts](const Vec& x, double t) {
        double s = 0.0;
        for (const auto& p : *parts) s += p.c(t) * p.space(x, nullptr);
        return s;
    };
    G.gradient = [parts, d](const Vec& x, double t) {
        Vec g = Vec::Zero(d);
        for (const auto& p : *parts) {
            Vec gi = Vec::Zero(d);
            p.space(x, &gi);
            g += p.c(t) * gi;
        }
        return g;
    };
    out.primitive = [parts](const Vec& x, double t) {
        double s = 0.0;
        for (const auto& p : *parts) s += p.C(t) * p.space(x, nullptr);
        return s;
    };
    out.primitive_gradient = [parts, d](const Vec& x, double t) {
        Vec g = Vec::Zero(d);
        for (const auto& p : *parts) {
            Vec gi = Vec::Zero(d);
            p.space(x, &gi);
            g += p.C(t) * gi;
        }
        return g;
    };
    return out;
}

Mat ExtremalData::C(int sign, double t) const {
    if (F.manifold.kind == ManifoldKind::sphere2) throw Error(ErrorCode::unsupported, "C(t) needs a canonical chart");
    return sgrad_jacobian(F, point(sign), t);
}

const Vec& ExtremalData::point(int sign) const {
    const auto& p = sign > 0 ? x_plus : x_minus;
    if (!p) throw Error(ErrorCode::invalid_argument, sign > 0 ? "no maximum point recorded" : "no minimum point recorded");
    return *p;
}

ExtremalData extremal_at(const Hamiltonian& F, std::optional<Vec> x_plus, std::optional<Vec> x_minus,
                         int time_samples) {
    ExtremalData ex;
    ex.F = F;
    ex.x_plus = x_plus;
    ex.x_minus = x_minus;
    auto definite = [&](const Vec& x, int sign) {
        for (int k = 0; k < time_samples; ++k) {
            const double t = F.time.lo + F.time.width() * k / std::max(1, time_samples - 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(intrinsic_hessian(F, x, t)));
            const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
            if (sign > 0 ? hi >= -1e-8 : lo <= 1e-8) return false;
        }
        return true;
    };
    if (x_plus) {
        check_point(F.manifold, *x_plus);
        ex.nondegenerate_plus = definite(*x_plus, 1);
    }
    if (x_minus) {
        check_point(F.manifold, *x_minus);
        ex.nondegenerate_minus = definite(*x_minus, -1);
    }
    return ex;
}

QuasiautonomousResult quasiautonomous_test(const Hamiltonian& F, const Grid& g, double tol, int time_samples) {
    QuasiautonomousResult r;
    std::vector<double> osc;
    Vec xp0, xm0;
    for (int k = 0; k < time_samples; ++k) {
        const double t = F.time.lo + F.time.width() * k / std::max(1, time_samples - 1);
        const OscillationEstimate e = oscillation(F, t, g, 40);
        osc.push_back(e.value);
        if (k == 0) {
            xp0 = e.max.point;
            xm0 = e.min.point;
        }
        r.point_drift = std::max({r.point_drift, distance(F.manifold, e.max.point, xp0),
                                  distance(F.manifold, e.min.point, xm0)});
    }
    r.oscillation_spread = *std::max_element(osc.begin(), osc.end()) - *std::min_element(osc.begin(), osc.end());
    const double resolution = g.spacing > 0.0 ? g.spacing : 1e-3;
    r.quasiautonomous = r.oscillation_spread <= tol && r.point_drift <= resolution;
    // polish the recorded extrema so that they are fixed points to solver precision
    const double t0 = F.time.lo;
    auto f0 = [&](const Vec& x) { return F(x, t0); };
    Vec xp = xp0, xm = xm0;
    if (newton_extremum(f0, F.manifold, xp, 1) && distance(F.manifold, xp, xp0) <= resolution) xp0 = canonical_point(F.manifold, xp);
    if (newton_extremum(f0, F.manifold, xm, -1) && distance(F.manifold, xm, xm0) <= resolution) xm0 = canonical_point(F.manifold, xm);
    r.extremal = extremal_at(F, xp0, xm0);
    return r;
}

Variation::Variation(std::shared_ptr<const FlowMap> base, V1Generator G, int eps_steps)
    : base_(std::move(base)), G_(std::move(G)), eps_steps_(eps_steps) {
    if (!base_) throw Error(ErrorCode::invalid_argument, "variation needs a base flow");
    if (!G_.primitive) throw Error(ErrorCode::invalid_argument, "generator has no primitive");
    if (eps_steps_ < 1) throw Error(ErrorCode::invalid_argument, "eps_steps must be positive");
    const Grid probe = sample_grid(G_.G.manifold, 4);
    const V1Check c = check_v1(G_.G, probe.points, 1e-8);
    if (!c.ok) {
        std::ostringstream os;
        os << "generator is not in V1: time average up to " << c.max_time_average;
        throw Error(ErrorCode::invalid_argument, os.str());
    }
}

Vec Variation::h(const Vec& y, double t, double eps) const {
    if (eps == 0.0) return y;
    const Hamiltonian K = G_.slice(t);
    const ManifoldSpec& M = K.manifold;
    const double dt = eps / eps_steps_;
    Vec z = y;
    for (int i = 0; i < eps_steps_; ++i) {
        const Vec k1 = sgrad(K, z, t);
        const Vec k2 = sgrad(K, Vec(z + 0.5 * dt * k1), t);
        const Vec k3 = sgrad(K, Vec(z + 0.5 * dt * k2), t);
        const Vec k4 = sgrad(K, Vec(z + dt * k3), t);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (M.kind == ManifoldKind::sphere2) z /= z.norm();
    }
    return z;
}

Vec Variation::base_point(const Vec& y, double t) const {
    const Hamiltonian& F = base_->hamiltonian();
    if (F.has_exact_flow()) return F.exact_flow(y, F.time.lo, t);
    return flow_point(F, y, F.time.lo, t, base_->options());
}

Vec Variation::f(const Vec& x, double t, double eps) const { return base_point(h(x, t, eps), t); }

double Variation::Hhat(const Vec& y, double t, double eps) const {
    if (eps == 0.0) return 0.0;
    const Hamiltonian K = G_.slice(t);
    const Hamiltonian& G = G_.G;
    const ManifoldSpec& M = K.manifold;
    // z' = -sgrad K_t(z), I' = G(z, t) on tau in [0, eps]
    const double dt = eps / eps_steps_;
    Vec z = y;
    double I = 0.0;
    for (int i = 0; i < eps_steps_; ++i) {
        const Vec k1 = -sgrad(K, z, t);
        const double j1 = G(z, t);
        const Vec z2 = z + 0.5 * dt * k1;
        const Vec k2 = -sgrad(K, z2, t);
        const double j2 = G(z2, t);
        const Vec z3 = z + 0.5 * dt * k2;
        const Vec k3 = -sgrad(K, z3, t);
        const double j3 = G(z3, t);
        const Vec z4 = z + dt * k3;
        const Vec k4 = -sgrad(K, z4, t);
        const double j4 = G(z4, t);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (M.kind == ManifoldKind::sphere2) z /= z.norm();
        I += dt / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
    }
    return I;
}

double Variation::generator_value(const Vec& x, double t, double eps) const {
    const Hamiltonian& F = base_->hamiltonian();
    const Vec y = F.has_exact_flow() ? F.exact_flow(x, t, F.time.lo) : flow_point(F, x, t, F.time.lo, base_->options());
    return F(x, t) + Hhat(y, t, eps);
}

double Variation::pulled_back(const Vec& y, double t, double eps) const {
    const Hamiltonian& F = base_->hamiltonian();
    // autonomous flows preserve F
    const double f = F.autonomous ? F(y, t) : F(base_point(y, t), t);
    return f + Hhat(y, t, eps);
}

VariationField Variation::velocity(const Vec& x, int n) const {
    const Hamiltonian& F = base_->hamiltonian();
    Hamiltonian Fc = F;
    const MonodromyMatrix mm = monodromy(Fc, x, F.time.hi, 1e-3);
    return VariationField::sample(
        [&](double t) {
            const double tt = F.time.lo + F.time.width() * t;
            return Vec(mm.at(tt) * sgrad(G_.slice(tt), x, tt));
        },
        n);
}

double Variation::endpoint_defect(const std::vector<Vec>& samples, double eps_max) const {
    double worst = 0.0;
    const double t1 = G_.G.time.hi;
    for (const Vec& y : samples)
        for (double e : {-eps_max, -0.5 * eps_max, 0.5 * eps_max, eps_max})
            worst = std::max(worst, (h(y, t1, e) - y).norm());
    return worst;
}

Curve LengthProfile::curve() const {
    Curve c{{"eps", "ell", "ell_plus", "ell_minus", "tracked"}, {}};
    for (const auto& p : points) c.rows.push_back({p.eps, p.ell, p.ell_plus, p.ell_minus, p.tracked ? 1.0 : 0.0});
    return c;
}

namespace {

// int_0^1 of the tracked extremum of the pulled-back generator; NaN when tracking fails.
double tracked_integral(const Variation& var, const Vec& start, int sign, double eps, const QuadratureRule& rule,
                        bool& ok) {
    const ManifoldSpec& M = var.generator().G.manifold;
    Vec y = start;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        auto f = [&](const Vec& z) { return var.pulled_back(z, t, eps); };
        if (!newton_extremum(f, M, y, sign)) {
            ok = false;
            return nan_value;
        }
        s += rule.weights[i] * f(y);
    }
    return s;
}

}  // namespace

LengthProfile length_profile(const Variation& var, const ExtremalData& ex, const std::vector<double>& eps_list,
                             int time_nodes) {
    const Interval T = var.generator().G.time;
    const QuadratureRule rule = gauss_legendre(time_nodes, T.lo, T.hi);
    LengthProfile prof;
    prof.points.resize(eps_list.size());
    parallel_for(eps_list.size(), [&](std::size_t k) {
        ProfilePoint p;
        p.eps = eps_list[k];
        p.ell_plus = p.ell_minus = nan_value;
        if (ex.x_plus) p.ell_plus = tracked_integral(var, *ex.x_plus, 1, p.eps, rule, p.tracked);
        if (ex.x_minus) p.ell_minus = tracked_integral(var, *ex.x_minus, -1, p.eps, rule, p.tracked);
        p.ell = p.ell_plus - p.ell_minus;
        prof.points[k] = p;
    });
    for (const auto& p : prof.points) prof.tracking_ok = prof.tracking_ok && p.tracked;
    return prof;
}

SecondDerivative fd_second_derivative(const Variation& var, const ExtremalData& ex, int sign, double h,
                                      int time_nodes) {
    const std::vector<double> eps{-2 * h, -h, -0.5 * h, 0.0, 0.5 * h, h, 2 * h};
    ExtremalData one = ex;
    if (sign > 0) one.x_minus.reset();
    else one.x_plus.reset();
    const LengthProfile prof = length_profile(var, one, eps, time_nodes);
    if (!prof.tracking_ok) throw Error(ErrorCode::not_converged, "extremum tracking failed in the eps scan");
    auto ell = [&](double e) {
        for (const auto& p : prof.points)
            if (std::abs(p.eps - e) < 1e-15) return sign > 0 ? p.ell_plus : p.ell_minus;
        throw Error(ErrorCode::internal, "missing eps sample");
    };
    SecondDerivative d;
    d.value = fd5(ell, h);
    d.half_step = fd5(ell, 0.5 * h);
    d.richardson = (16.0 * d.half_step - d.value) / 15.0;
    return d;
}

double second_variation_Q(const ExtremalData& ex, int sign, const VariationField& v) {
    const Vec& x = ex.point(sign);
    const Mat W = omega_matrix(ex.F.manifold);
    const std::vector<Vec> dv = derivative(v);
    const int n = v.intervals();
    const Interval T = ex.F.time;
    std::vector<double> integrand(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = T.lo + T.width() * v.times[i];
        const Mat C = sgrad_jacobian(ex.F, x, t);
        Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(C)};
        if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) {
            std::ostringstream os;
            os << "C(t) is singular at t=" << t;
            throw Error(ErrorCode::invalid_argument, os.str());
        }
        const Vec Cinv_dv = lu.solve(Eigen::VectorXd(dv[i]));
        integrand[i] = Cinv_dv.dot(W * dv[i]) + dv[i].dot(W * v.values[i]);
    }
    return -simpson_of(integrand, 0.0, 1.0);
}

double lemma_integral(const Variation& var, const Vec& x, int time_nodes, double h) {
    const Interval T = var.generator().G.time;
    const QuadratureRule rule = gauss_legendre(time_nodes, T.lo, T.hi);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        // d/deps of the generator at f_{t,eps} x, eps = 0; the pulled-back point of f_t x is x
        const double d = (8.0 * (var.Hhat(x, t, h) - var.Hhat(x, t, -h)) - (var.Hhat(x, t, 2 * h) - var.Hhat(x, t, -2 * h))) /
                         (12.0 * h);
        s += rule.weights[i] * d;
    }
    return s;
}

V1Generator generator_for_target(const Hamiltonian& F, const Vec& x0, const TangentCurve& target, double step) {
    const Mat W = omega_matrix(F.manifold);
    auto mm = std::make_shared<MonodromyMatrix>(monodromy(F, x0, F.time.hi, step));
    const Hamiltonian Fc = F;
    // c(t) = M^{-1}(a' - A a), A = D sgrad F(x0)
    auto c = [mm, Fc, x0, target](double t) {
        const Mat M = mm->at(t);
        const Mat A = sgrad_jacobian(Fc, x0, t);
        return Vec(M.lu().solve(Eigen::VectorXd(target.da(t) - A * target.a(t))));
    };
    auto b = [mm, target](double t) { return Vec(mm->at(t).lu().solve(Eigen::VectorXd(target.a(t)))); };
    V1Generator out;
    out.G.manifold = F.manifold;
    out.G.autonomous = false;
    out.G.time = F.time;
    out.G.name = "target_generator";
    out.G.value = [W, x0, c](const Vec& x, double t) { return Vec(x - x0).dot(W * c(t)); };
    out.G.gradient = [W, c](const Vec&, double t) { return Vec(W * c(t)); };
    out.primitive = [W, x0, b](const Vec& x, double t) { return Vec(x - x0).dot(W * b(t)); };
    out.primitive_gradient = [W, b](const Vec&, double t) { return Vec(W * b(t)); };
    return out;
}

ConjugateScan conjugate_point_scan(const Hamiltonian& F, const ExtremalData& ex, int sign,
                                   const std::vector<double>& T_grid) {
    if (!F.autonomous) throw Error(ErrorCode::invalid_argument, "conjugate point scan needs an autonomous Hamiltonian");
    std::vector<double> Ts;
    for (double T : T_grid)
        if (T > 0.0) Ts.push_back(T);
    std::sort(Ts.begin(), Ts.end());
    if (Ts.size() < 3) throw Error(ErrorCode::invalid_argument, "conjugate point scan needs at least 3 positive times");
    const Vec& x = ex.point(sign);
    Hamiltonian Fc = F;
    Fc.time = {0.0, Ts.back()};
    const MonodromyMatrix mm = monodromy(Fc, x, Ts.back(), 1e-3);
    const int d = F.manifold.dim();
    auto det = [&](double T) { return (mm.at(T) - Mat::Identity(d, d)).determinant(); };

    ConjugateScan scan;
    scan.curve.columns = {"T", "det"};
    std::vector<double> D(Ts.size());
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        D[i] = det(Ts[i]);
        scan.curve.rows.push_back({Ts[i], D[i]});
        scan.max_abs_det = std::max(scan.max_abs_det, std::abs(D[i]));
    }
    if (scan.max_abs_det < 1e-10) {
        scan.degenerate = true;
        return scan;
    }
    const double accept = 1e-7 * std::max(1.0, scan.max_abs_det);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < Ts.size(); ++i) {
        if (D[i] == 0.0) {
            roots.push_back(Ts[i]);
            continue;
        }
        if (D[i] * D[i + 1] < 0.0) {
            double a = Ts[i], b = Ts[i + 1], da = D[i];
            while (b - a > 1e-9) {
                const double m = 0.5 * (a + b), dm = det(m);
                if (dm * da <= 0.0) b = m;
                else {
                    a = m;
                    da = dm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
    }
    // touching zeros: interior minima of |d|
    for (std::size_t i = 1; i + 1 < Ts.size(); ++i) {
        if (!(std::abs(D[i]) <= std::abs(D[i - 1]) && std::abs(D[i]) <= std::abs(D[i + 1]))) continue;
        double a = Ts[i - 1], b = Ts[i + 1];
        auto slope = [&](double T) {
            const double e = 1e-6;
            return std::abs(det(T + e)) - std::abs(det(T - e));
        };
        while (b - a > 1e-8) {
            const double m = 0.5 * (a + b);
            if (slope(m) > 0.0) b = m;
            else a = m;
        }
        const double T = 0.5 * (a + b);
        if (std::abs(det(T)) <= accept) roots.push_back(T);
    }
    std::sort(roots.begin(), roots.end());
    for (double T : roots) {
        if (!scan.roots.empty() && T - scan.roots.back().T < 1e-4) continue;
        ConjugatePoint cp;
        cp.T = T;
        const Mat A = mm.at(T) - Mat::Identity(d, d);
        cp.det = A.determinant();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(A), Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cut = 1e-4 * std::max(1.0, mm.at(T).norm());
        for (int j = 0; j < sv.size(); ++j)
            if (sv[j] <= cut) cp.kernel.push_back(Vec(svd.matrixV().col(j)));
        scan.roots.push_back(cp);
    }
    return scan;
}

}  // namespace hofer
