#include "hofer/flow.hpp"
#include "hofer/numerics.hpp"

#include <cmath>
#include <sstream>

namespace hofer {

Scheme parse_scheme(const std::string& name) {
    if (name == "rk4") return Scheme::rk4;
    if (name == "implicit_midpoint") return Scheme::implicit_midpoint;
    if (name == "exact") return Scheme::exact;
    throw Error(ErrorCode::config, "unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::rk4: return "rk4";
        case Scheme::implicit_midpoint: return "implicit_midpoint";
        case Scheme::exact: return "exact";
    }
    return "?";
}

FlowOptions default_flow_options(const Hamiltonian& F) {
    FlowOptions o;
    o.scheme = F.autonomous ? Scheme::implicit_midpoint : Scheme::rk4;
    o.step = 1e-3;
    return o;
}

namespace {

void check_escape(const Hamiltonian& F, const FlowOptions& opt, const Vec& x, double t) {
    if (!x.allFinite()) throw Error(ErrorCode::escape, "trajectory became non-finite at t=" + std::to_string(t));
    if (opt.chart_box && F.manifold.kind == ManifoldKind::euclidean && !opt.chart_box->contains(x)) {
        std::ostringstream os;
        os << "trajectory left the chart box at t=" << t;
        throw Error(ErrorCode::escape, os.str());
    }
}

Vec project(const ManifoldSpec& M, Vec x) {
    if (M.kind == ManifoldKind::sphere2) x /= x.norm();
    return x;
}

Vec rk4_step(const Hamiltonian& F, const Vec& x, double t, double h) {
    const Vec k1 = sgrad(F, x, t);
    const Vec k2 = sgrad(F, x + 0.5 * h * k1, t + 0.5 * h);
    const Vec k3 = sgrad(F, x + 0.5 * h * k2, t + 0.5 * h);
    const Vec k4 = sgrad(F, x + h * k3, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec midpoint_step(const Hamiltonian& F, const Vec& x, double t, double h, const FlowOptions& opt) {
    Vec y = x + h * sgrad(F, x, t);
    for (int it = 0; it < opt.fixed_point_max_iter; ++it) {
        const Vec y_new = x + h * sgrad(F, 0.5 * (x + y), t + 0.5 * h);
        const double r = (y_new - y).norm();
        y = y_new;
        if (r <= opt.fixed_point_tol * std::max(1.0, y.norm())) return y;
    }
    std::ostringstream os;
    os << "implicit midpoint iteration did not converge at t=" << t << " (step " << h << ")";
    throw Error(ErrorCode::not_converged, os.str());
}

int step_count(double t0, double t1, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "step must be positive");
    const double span = std::abs(t1 - t0);
    return std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
}

}  // namespace

Trajectory integrate_flow(const Hamiltonian& F, const Vec& x0, double t0, double t1, const FlowOptions& opt) {
    check_point(F.manifold, x0);
    Trajectory tr;
    const int n = step_count(t0, t1, opt.step);
    const double h = (t1 - t0) / n;
    tr.times.reserve(n + 1);
    tr.points.reserve(n + 1);
    tr.times.push_back(t0);
    tr.points.push_back(x0);
    if (t1 == t0) return tr;
    if (opt.scheme == Scheme::exact && !F.exact_flow)
        throw Error(ErrorCode::unsupported, "Hamiltonian " + F.name + " has no closed-form flow");
    Vec x = x0;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + k * h;
        const double tn = (k + 1 == n) ? t1 : t0 + (k + 1) * h;
        switch (opt.scheme) {
            case Scheme::rk4: x = project(F.manifold, rk4_step(F, x, t, tn - t)); break;
            case Scheme::implicit_midpoint: x = project(F.manifold, midpoint_step(F, x, t, tn - t, opt)); break;
            case Scheme::exact: x = F.exact_flow(x0, t0, tn); break;
        }
        check_escape(F, opt, x, tn);
        tr.times.push_back(tn);
        tr.points.push_back(x);
    }
    return tr;
}

Vec flow_point(const Hamiltonian& F, const Vec& x0, double t0, double t1, const FlowOptions& opt) {
    if (opt.scheme == Scheme::exact) {
        check_point(F.manifold, x0);
        if (!F.exact_flow) throw Error(ErrorCode::unsupported, "Hamiltonian " + F.name + " has no closed-form flow");
        return F.exact_flow(x0, t0, t1);
    }
    check_point(F.manifold, x0);
    const int n = step_count(t0, t1, opt.step);
    const double h = (t1 - t0) / n;
    if (t1 == t0) return x0;
    Vec x = x0;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + k * h;
        const double tn = (k + 1 == n) ? t1 : t0 + (k + 1) * h;
        if (opt.scheme == Scheme::rk4) x = project(F.manifold, rk4_step(F, x, t, tn - t));
        else x = project(F.manifold, midpoint_step(F, x, t, tn - t, opt));
        check_escape(F, opt, x, tn);
    }
    return x;
}

FlowMap::FlowMap(Hamiltonian F, FlowOptions opt) : F_(std::move(F)), opt_(opt) {
    if (opt_.scheme == Scheme::exact && !F_.exact_flow)
        throw Error(ErrorCode::unsupported, "Hamiltonian " + F_.name + " has no closed-form flow");
}

FlowMap::FlowMap(Hamiltonian F) : FlowMap(F, default_flow_options(F)) {}

Vec FlowMap::operator()(const Vec& x, double t) const { return flow_point(F_, x, F_.time.lo, t, opt_); }

Vec FlowMap::inverse(const Vec& x, double t) const { return flow_point(F_, x, t, F_.time.lo, opt_); }

Vec FlowMap::evolve(const Vec& x, double t0, double t1) const { return flow_point(F_, x, t0, t1, opt_); }

const Trajectory& FlowMap::trajectory(const Vec& x, double t1) const {
    std::vector<double> key(x.data(), x.data() + x.size());
    key.push_back(t1);
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto tr = std::make_unique<Trajectory>(integrate_flow(F_, x, F_.time.lo, t1, opt_));
    auto& ref = *tr;
    cache_.emplace(std::move(key), std::move(tr));
    return ref;
}

std::size_t FlowMap::cache_size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.size();
}

namespace {

Mat rk4_linear(const Hamiltonian& F, const Vec& x, const Mat& M, double t, double h) {
    auto A = [&](double s) { return sgrad_jacobian(F, x, s); };
    const Mat A0 = A(t), Am = A(t + 0.5 * h), A1 = A(t + h);
    const Mat k1 = A0 * M;
    const Mat k2 = Am * (M + 0.5 * h * k1);
    const Mat k3 = Am * (M + 0.5 * h * k2);
    const Mat k4 = A1 * (M + h * k3);
    return M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

MonodromyMatrix monodromy(const Hamiltonian& F, const Vec& x_fixed, double t1, double step) {
    if (F.manifold.kind == ManifoldKind::sphere2) throw Error(ErrorCode::unsupported, "monodromy needs a canonical chart");
    check_point(F.manifold, x_fixed);
    const double t0 = F.time.lo;
    for (int k = 0; k <= 16; ++k) {
        const double t = t0 + (t1 - t0) * k / 16.0;
        const double r = sgrad(F, x_fixed, std::min(t, F.time.hi)).norm();
        if (r > 1e-8) {
            std::ostringstream os;
            os << "point is not fixed by the flow: |sgrad F| = " << r << " at t=" << t;
            throw Error(ErrorCode::invalid_argument, os.str());
        }
    }
    MonodromyMatrix mm;
    mm.base = x_fixed;
    mm.source = F;
    mm.step = step;
    const int d = F.manifold.dim();
    Mat M = Mat::Identity(d, d);
    const int n = step_count(t0, t1, step);
    const double h = (t1 - t0) / n;
    mm.times.push_back(t0);
    mm.matrices.push_back(M);
    for (int k = 0; k < n; ++k) {
        const double t = t0 + k * h;
        M = rk4_linear(F, x_fixed, M, t, h);
        mm.times.push_back(t0 + (k + 1) * h);
        mm.matrices.push_back(M);
    }
    return mm;
}

Mat MonodromyMatrix::at(double t) const {
    if (times.empty()) throw Error(ErrorCode::invalid_argument, "empty monodromy record");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw Error(ErrorCode::invalid_argument, "time outside the monodromy record");
    std::size_t k = 0;
    {
        // uniform grid
        const double h = (times.back() - times.front()) / (times.size() - 1);
        k = static_cast<std::size_t>(std::floor((t - times.front()) / h));
        if (k >= times.size() - 1) k = times.size() - 1;
    }
    const double dt = t - times[k];
    if (std::abs(dt) < 1e-15) return matrices[k];
    return rk4_linear(source, base, matrices[k], times[k], dt);
}

Mat linearized_flow(const Hamiltonian& F, const Vec& x0, double t0, double t1, double step) {
    if (F.manifold.kind == ManifoldKind::sphere2) throw Error(ErrorCode::unsupported, "linearized flow needs a canonical chart");
    const int d = F.manifold.dim();
    Vec x = x0;
    Mat M = Mat::Identity(d, d);
    const int n = step_count(t0, t1, step);
    const double h = (t1 - t0) / n;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + k * h;
        // joint rk4 on (x, M)
        const Vec kx1 = sgrad(F, x, t);
        const Mat km1 = sgrad_jacobian(F, x, t) * M;
        const Vec x2 = x + 0.5 * h * kx1;
        const Mat M2 = M + 0.5 * h * km1;
        const Vec kx2 = sgrad(F, x2, t + 0.5 * h);
        const Mat km2 = sgrad_jacobian(F, x2, t + 0.5 * h) * M2;
        const Vec x3 = x + 0.5 * h * kx2;
        const Mat M3 = M + 0.5 * h * km2;
        const Vec kx3 = sgrad(F, x3, t + 0.5 * h);
        const Mat km3 = sgrad_jacobian(F, x3, t + 0.5 * h) * M3;
        const Vec x4 = x + h * kx3;
        const Mat M4 = M + h * km3;
        const Vec kx4 = sgrad(F, x4, t + h);
        const Mat km4 = sgrad_jacobian(F, x4, t + h) * M4;
        x += (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        M += (h / 6.0) * (km1 + 2.0 * km2 + 2.0 * km3 + km4);
    }
    return M;
}

Report symplecticity_report(const FlowMap& flow, const Grid& g, double t, double fd_step) {
    const ManifoldSpec& M = flow.hamiltonian().manifold;
    std::vector<double> residual(g.size());
    parallel_for(g.size(), [&](std::size_t i) {
        const Vec& x = g.points[i];
        const auto basis = tangent_basis(M, x);
        const Vec fx = flow(x, t);
        std::vector<Vec> images;
        for (const auto& e : basis) {
            const Vec fp = flow(retract(M, x, fd_step * e), t);
            const Vec fm = flow(retract(M, x, -fd_step * e), t);
            Vec col = (fp - fm) / (2.0 * fd_step);
            if (M.kind == ManifoldKind::sphere2) {
                const Vec y = fx / fx.norm();
                col -= y * y.dot(col);
            }
            images.push_back(col);
        }
        double r = 0.0;
        const Vec y = M.kind == ManifoldKind::sphere2 ? Vec(fx / fx.norm()) : fx;
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b = a + 1; b < basis.size(); ++b)
                r = std::max(r, std::abs(omega_eval(M, y, images[a], images[b]) - omega_eval(M, x, basis[a], basis[b])));
        residual[i] = r;
    });
    Report rep;
    rep.experiment = "symplecticity";
    double mx = 0.0, mean = 0.0;
    for (double r : residual) {
        mx = std::max(mx, r);
        mean += r;
    }
    rep.add_scalar("max_residual", mx);
    rep.add_scalar("mean_residual", residual.empty() ? 0.0 : mean / residual.size());
    rep.add_scalar("t", t);
    rep.add_scalar("points", static_cast<double>(g.size()));
    rep.notes.push_back("scheme " + scheme_name(flow.options().scheme));
    return rep;
}

Report conservation_report(const FlowMap& flow, const Vec& x0, double t1) {
    const Hamiltonian& F = flow.hamiltonian();
    if (!F.autonomous) throw Error(ErrorCode::unsupported, "energy conservation needs an autonomous Hamiltonian");
    const Trajectory tr = integrate_flow(F, x0, F.time.lo, t1, flow.options());
    const double e0 = F(x0, F.time.lo);
    double drift = 0.0;
    for (std::size_t k = 0; k < tr.points.size(); ++k) drift = std::max(drift, std::abs(F(tr.points[k], tr.times[k]) - e0));
    Report rep;
    rep.experiment = "conservation";
    rep.add_scalar("max_energy_drift", drift);
    rep.add_scalar("t1", t1);
    rep.notes.push_back("scheme " + scheme_name(flow.options().scheme));
    return rep;
}

}  // namespace hofer
