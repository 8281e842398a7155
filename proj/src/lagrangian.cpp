#include "hofer/lagrangian.hpp"

#include "hofer/flow.hpp"
#include "hofer/hofer.hpp"
#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hofer {

namespace {

constexpr double closure_tol = 1e-9;

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

Vec tangent_part(const ManifoldSpec& M, const Vec& y, Vec v) {
    if (M.kind == ManifoldKind::sphere2) v -= y * y.dot(v);
    return v;
}

Vec rotate_about(const Eigen::Vector3d& axis, double angle, const Vec& x) {
    const Eigen::Vector3d y = Eigen::AngleAxisd(angle, axis) * Eigen::Vector3d(x.head<3>());
    return vec3(y.x(), y.y(), y.z());
}

Vec flow_of(const Hamiltonian& H, const Vec& x, double t0, double t1) {
    if (H.has_exact_flow()) return canonical_point(H.manifold, H.exact_flow(x, t0, t1));
    return canonical_point(H.manifold, flow_point(H, x, t0, t1, default_flow_options(H)));
}

}  // namespace

double ParametrizedCycle::closure_gap() const {
    if (samples.empty()) return 0.0;
    return (samples.front() - samples.back()).norm();
}

ParametrizedCycle sample_cycle(const std::function<Vec(double)>& c, int n) {
    if (n < 3) throw Error(ErrorCode::invalid_argument, "a cycle needs at least 3 samples");
    ParametrizedCycle out;
    out.samples.reserve(n);
    for (int k = 0; k < n; ++k) out.samples.push_back(c(double(k) / (n - 1)));
    if (out.closure_gap() <= closure_tol) out.samples.back() = out.samples.front();
    return out;
}

ParametrizedCycle circle_cycle(double r, int n, double cp, double cq) {
    return sample_cycle([=](double s) { return vec2(cp + r * std::cos(2.0 * pi * s), cq + r * std::sin(2.0 * pi * s)); }, n);
}

ParametrizedCycle figure_eight_cycle(int n) {
    return sample_cycle([](double s) { return vec2(std::sin(2.0 * pi * s), 0.5 * std::sin(4.0 * pi * s)); }, n);
}

ParametrizedCycle named_cycle(const std::string& name, const Params& params, int n) {
    auto get = [&params](const std::string& k, double d) {
        const auto it = params.find(k);
        return it == params.end() ? d : it->second;
    };
    for (const auto& [k, v] : params)
        if (k != "r" && k != "cp" && k != "cq") throw Error(ErrorCode::config, "unknown curve parameter '" + k + "'");
    if (name == "circle") return circle_cycle(get("r", 1.0), n, get("cp", 0.0), get("cq", 0.0));
    if (name == "figure_eight") return figure_eight_cycle(n);
    if (name == "zero_section") {
        const double r = get("r", 1.0), cq = get("cq", 0.0);
        // out and back along the q axis
        return sample_cycle([r, cq](double s) { return vec2(0.0, cq + r * std::sin(2.0 * pi * s)); }, n);
    }
    throw Error(ErrorCode::config, "unknown curve '" + name + "'");
}

ParametrizedCycle read_cycle_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "cannot read curve file " + path);
    ParametrizedCycle c;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw Error(ErrorCode::config, "non-numeric row in " + path);
        }
        first = false;
        if (!c.samples.empty() && static_cast<Eigen::Index>(row.size()) != c.samples.front().size())
            throw Error(ErrorCode::config, "ragged rows in " + path);
        c.samples.push_back(Eigen::Map<const Vec>(row.data(), static_cast<Eigen::Index>(row.size())));
    }
    if (c.samples.size() < 3) throw Error(ErrorCode::config, "too few samples in " + path);
    return c;
}

double liouville_pairing(const ParametrizedCycle& c) {
    if (c.size() < 256) throw Error(ErrorCode::invalid_argument, "a cycle needs at least 256 samples");
    if (c.closure_gap() > closure_tol) throw Error(ErrorCode::invalid_argument, "curve is not closed");
    const Eigen::Index dim = c.samples.front().size();
    if (dim % 2 != 0) throw Error(ErrorCode::invalid_argument, "curve must live in R^{2n}");
    const std::size_t N = c.size() - 1;
    const Eigen::Index n = dim / 2;
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<double> q(N);
        for (std::size_t k = 0; k < N; ++k) q[k] = c.samples[k][n + j];
        const std::vector<double> dq = periodic_derivative(q);
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += c.samples[k][j] * dq[k];
        total += s / N;
    }
    return total;
}

std::optional<std::pair<long long, long long>> rational_approximation(double x, long long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    const double scale = std::max(1.0, std::abs(x));
    long long h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    double y = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(y);
        if (std::abs(a) > 1e15) break;
        const long long ai = static_cast<long long>(a);
        const long long h = ai * h1 + h2, k = ai * k1 + k2;
        if (k > max_den) break;
        if (std::abs(k * x - h) <= tol * scale) return std::make_pair(h, k);
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        const double frac = y - a;
        if (frac <= 0.0) break;
        y = 1.0 / frac;
    }
    return std::nullopt;
}

std::optional<double> gamma_split_torus(const std::vector<double>& radii) {
    if (radii.empty()) throw Error(ErrorCode::invalid_argument, "no radii");
    for (double r : radii)
        if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "radii must be positive");
    const double a0 = pi * radii.front() * radii.front();
    std::vector<std::pair<long long, long long>> ratios;
    long long D = 1;
    for (double r : radii) {
        const auto pq = rational_approximation(pi * r * r / a0);
        if (!pq) return std::nullopt;
        ratios.push_back(*pq);
        const long long l = std::lcm(D, pq->second);
        if (l > 1000000000000LL) return std::nullopt;
        D = l;
    }
    long long g = 0;
    for (const auto& [p, q] : ratios) g = std::gcd(g, p * (D / q));
    return a0 * double(g) / double(D);
}

Vec SuspensionMap::h(const Vec& x, double t) const { return flow_of(H, x, 0.0, t); }

SuspensionPoint suspension(const SuspensionMap& S, const Vec& x, double t) {
    const Vec y = S.h(x, t);
    return {y, S.r_sign * S.H(y, t), t};
}

double suspension_loop_defect(const SuspensionMap& S, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = S.base((i + 0.5) / samples);
        worst = std::max(worst, distance(S.H.manifold, S.h(x, 1.0), x));
    }
    return worst;
}

double isotropy_residual(const SuspensionMap& S, int u_samples, int t_samples, double h) {
    if (u_samples < 1 || t_samples < 1 || !(h > 0.0)) throw Error(ErrorCode::invalid_argument, "bad isotropy lattice");
    const ManifoldSpec& M = S.H.manifold;
    std::vector<double> res(static_cast<std::size_t>(u_samples) * t_samples);
    parallel_for(res.size(), [&](std::size_t idx) {
        const double u = (idx / t_samples + 0.5) / u_samples, t = (idx % t_samples + 0.5) / t_samples;
        const Vec x0 = S.base(u), xp = S.base(u + h), xm = S.base(u - h);
        const SuspensionPoint c = suspension(S, x0, t), up = suspension(S, xp, t), um = suspension(S, xm, t);
        const SuspensionPoint tp = suspension(S, x0, t + h), tm = suspension(S, x0, t - h);
        const Vec Yu = tangent_part(M, c.y, chart_difference(M, up.y, um.y) / (2.0 * h));
        const Vec Yt = tangent_part(M, c.y, chart_difference(M, tp.y, tm.y) / (2.0 * h));
        const double ru = (up.r - um.r) / (2.0 * h);
        // sigma = Omega + dr ^ dt on (d/du, d/dt); dt(d/du) = 0
        res[idx] = std::abs(omega_eval(M, c.y, Yu, Yt) + ru);
    });
    return *std::max_element(res.begin(), res.end());
}

Report suspension_isotropy_check(const SuspensionMap& S, int u_samples, int t_samples, double h) {
    Report r;
    r.experiment = "suspension-isotropy";
    const double res = isotropy_residual(S, u_samples, t_samples, h);
    const double gap = suspension_loop_defect(S);
    r.add_scalar("isotropy_residual", res);
    r.add_scalar("loop_defect", gap);
    r.add_scalar("fd_step", h);
    r.check_le("loop_closes", gap, 1e-6);
    r.check_le("isotropic", res, 1e-5);
    return r;
}

SuspensionMap equator_rotation_suspension(double area_scale) {
    return {catalog("rotation_k", {{"k", 1.0}, {"area_scale", area_scale}}),
            [](double u) { return vec3(std::cos(2.0 * pi * u), std::sin(2.0 * pi * u), 0.0); }, -1.0,
            "equator/rotation"};
}

SuspensionMap meridian_rotation_suspension(double area_scale) {
    return {catalog("rotation_k", {{"k", 1.0}, {"area_scale", area_scale}}),
            [](double u) { return vec3(std::sin(2.0 * pi * u), 0.0, std::cos(2.0 * pi * u)); }, -1.0,
            "meridian/rotation"};
}

LoopFamily constant_family(const ManifoldSpec& M) {
    return {M, [](const Vec& x, double, double) { return x; }, [](const Vec&, double, double) { return 0.0; },
            "constant"};
}

LoopFamily tilted_axis_family(double tilt, double turns, double area_scale) {
    auto axis = [tilt](double s) { return Eigen::Vector3d(std::sin(tilt * s), 0.0, std::cos(tilt * s)); };
    LoopFamily F;
    F.manifold = ManifoldSpec::sphere2(area_scale);
    F.name = "tilted_axis";
    F.h = [axis, turns](const Vec& x, double t, double s) { return rotate_about(axis(s), -2.0 * pi * turns * t, x); };
    F.H = [axis, turns, area_scale](const Vec& x, double, double s) {
        return 2.0 * pi * turns * area_scale * axis(s).dot(x.head<3>());
    };
    return F;
}

ExactnessResult exactness_integral(const LoopFamily& family, const Vec& x, double s, bool require_loop, int t_nodes,
                                   double ds) {
    ExactnessResult r;
    r.loop_defect = std::max(distance(family.manifold, family.h(x, 0.0, s), x),
                             distance(family.manifold, family.h(x, 1.0, s), x));
    r.is_loop = r.loop_defect <= 1e-6;
    if (require_loop && !r.is_loop) {
        std::ostringstream os;
        os << "slice s = " << s << " is not a loop (defect " << r.loop_defect << ")";
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    const QuadratureRule q = gauss_legendre(t_nodes, 0.0, 1.0);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double t = q.nodes[i];
        const Vec y = family.h(x, t, s);
        const double d = (-family.H(y, t, s + 2 * ds) + 8.0 * family.H(y, t, s + ds) - 8.0 * family.H(y, t, s - ds) +
                          family.H(y, t, s - 2 * ds)) /
                         (12.0 * ds);
        r.value += q.weights[i] * d;
    }
    return r;
}

Hamiltonian doubled_loop(const Hamiltonian& H) {
    Hamiltonian G;
    G.manifold = H.manifold;
    G.name = "doubled(" + H.name + ")";
    G.time = {0.0, 2.0};
    G.autonomous = false;
    G.support = H.support;
    G.value = [H](const Vec& x, double t) { return t <= 1.0 ? H(x, t) : -H(x, 2.0 - t); };
    if (H.gradient) G.gradient = [H](const Vec& x, double t) -> Vec { return t <= 1.0 ? H.grad(x, t) : Vec(-H.grad(x, 2.0 - t)); };
    return G;
}

AnnulusArea annulus_area(const Hamiltonian& H, double eps, const Grid& g, int samples) {
    if (samples < 3 || samples % 2 == 0) throw Error(ErrorCode::invalid_argument, "samples must be odd and >= 3");
    const Hamiltonian G = doubled_loop(H);
    std::vector<double> width(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = 2.0 * i / (samples - 1);
        const OscillationEstimate o = oscillation(G, t, g);
        const double a_plus = -o.min.value + eps, a_minus = -o.max.value - eps;
        width[i] = a_plus - a_minus;
    }
    AnnulusArea out;
    out.area = simpson(width, 0.0, 2.0);
    out.length = path_length(H, {0.0, 1.0}, LengthKind::length_linf, g, (samples + 1) / 2 | 1);
    out.formula = 2.0 * out.length + 4.0 * eps;
    out.defect = std::abs(out.area - out.formula);
    return out;
}

double doubling_integral(const Hamiltonian& H, const Vec& x, int samples) {
    if (samples < 3 || samples % 2 == 0) throw Error(ErrorCode::invalid_argument, "samples must be odd and >= 3");
    const Hamiltonian G = doubled_loop(H);
    // G jumps at t = 1, so each half [0, 1] and [1, 2] gets its own Simpson rule
    std::vector<double> first(samples), second(samples);
    parallel_for(samples, [&](std::size_t i) {
        const double t = double(i) / (samples - 1);
        first[i] = G(flow_of(H, x, 0.0, t), t);
        const double u = 1.0 + t;  // g_u = h_{2-u}; the value at u = 1 is the right limit
        second[i] = -H(flow_of(H, x, 0.0, 2.0 - u), 2.0 - u);
    });
    return simpson(first, 0.0, 1.0) + simpson(second, 1.0, 2.0);
}

}  // namespace hofer
