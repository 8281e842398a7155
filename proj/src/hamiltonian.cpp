#include "hofer/hamiltonian.hpp"
#include "hofer/flow.hpp"
#include "hofer/numerics.hpp"

#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hofer {

namespace {

void check_time(const Hamiltonian& F, double t) {
    if (!std::isfinite(t) || !F.time.contains(t, 1e-9)) {
        std::ostringstream os;
        os << "time " << t << " is outside [" << F.time.lo << ", " << F.time.hi << "]"
           << (F.name.empty() ? "" : " of " + F.name);
        throw Error(ErrorCode::invalid_argument, os.str());
    }
}

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

}  // namespace

double Hamiltonian::operator()(const Vec& x, double t) const {
    check_time(*this, t);
    const double v = value(x, t);
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "Hamiltonian " + name + " evaluated to a non-finite value");
    return v;
}

Vec Hamiltonian::grad(const Vec& x, double t) const {
    check_time(*this, t);
    Vec g = gradient ? gradient(x, t) : fd_gradient([&](const Vec& y) { return value(y, t); }, x, 1e-5);
    if (!g.allFinite()) throw Error(ErrorCode::invalid_argument, "Hamiltonian " + name + " has a non-finite gradient");
    return g;
}

Mat Hamiltonian::hess(const Vec& x, double t) const {
    check_time(*this, t);
    if (hessian) return hessian(x, t);
    if (gradient) {
        // central differences of the analytic gradient, symmetrized
        const int n = static_cast<int>(x.size());
        Mat H(n, n);
        const double h = 1e-5;
        Vec y = x;
        for (int i = 0; i < n; ++i) {
            y[i] = x[i] + h;
            Vec gp = gradient(y, t);
            y[i] = x[i] - h;
            Vec gm = gradient(y, t);
            y[i] = x[i];
            H.col(i) = (gp - gm) / (2.0 * h);
        }
        return 0.5 * (H + H.transpose());
    }
    return fd_hessian([&](const Vec& y) { return value(y, t); }, x, 1e-4);
}

Vec sgrad(const Hamiltonian& F, const Vec& x, double t) {
    const Vec g = F.grad(x, t);
    const double s = F.manifold.area_scale;
    if (F.manifold.kind == ManifoldKind::sphere2) {
        Eigen::Vector3d X = x.head<3>(), G = g.head<3>();
        Eigen::Vector3d v = X.cross(G) / s;
        return vec3(v.x(), v.y(), v.z());
    }
    const int n = static_cast<int>(x.size()) / 2;
    Vec v(2 * n);
    for (int j = 0; j < n; ++j) {
        v[j] = -g[n + j] / s;
        v[n + j] = g[j] / s;
    }
    return v;
}

Mat sgrad_jacobian(const Hamiltonian& F, const Vec& x, double t) {
    const Mat H = F.hess(x, t);
    const double s = F.manifold.area_scale;
    if (F.manifold.kind == ManifoldKind::sphere2) {
        Eigen::Vector3d X = x.head<3>();
        Eigen::Vector3d g = F.grad(x, t).head<3>();
        Eigen::Matrix3d Hm = H.topLeftCorner<3, 3>();
        Eigen::Matrix3d D = (cross_matrix(X) * Hm - cross_matrix(g)) / s;
        return D;
    }
    const int n = static_cast<int>(x.size()) / 2;
    Mat D(2 * n, 2 * n);
    D.topRows(n) = -H.bottomRows(n) / s;
    D.bottomRows(n) = H.topRows(n) / s;
    return D;
}

namespace {

// Validates a declared support on a shell just outside the box.
void validate_support(const Hamiltonian& F, const Box& box, int time_samples) {
    if (box.dim() != F.manifold.dim()) throw Error(ErrorCode::invalid_argument, "support box has the wrong dimension");
    const int d = box.dim();
    const int per_axis = 9;
    const double shell = 1e-6 * std::max(1.0, box.volume());
    for (int k = 0; k < time_samples; ++k) {
        const double t = F.time.lo + F.time.width() * k / std::max(1, time_samples - 1);
        for (int axis = 0; axis < d; ++axis) {
            // the cylinder's q-circle is compact already
            if (F.manifold.kind == ManifoldKind::cylinder && axis == 1) continue;
            for (int side = 0; side < 2; ++side) {
                // lattice on the face, pushed just outside the box
                long count = 1;
                for (int i = 0; i < d - 1; ++i) count *= per_axis;
                for (long c = 0; c < count; ++c) {
                    Vec x(d);
                    long r = c;
                    for (int i = 0; i < d; ++i) {
                        if (i == axis) {
                            x[i] = side ? box.axes[i].hi + shell : box.axes[i].lo - shell;
                            continue;
                        }
                        int idx = static_cast<int>(r % per_axis);
                        r /= per_axis;
                        x[i] = box.axes[i].lo + box.axes[i].width() * idx / (per_axis - 1);
                    }
                    const double v = F.value(x, t);
                    if (std::abs(v) > 1e-12) {
                        std::ostringstream os;
                        os << "Hamiltonian " << F.name << " does not vanish outside its declared support (value " << v
                           << ")";
                        throw Error(ErrorCode::verification_failed, os.str());
                    }
                }
            }
        }
    }
}

std::vector<double> sample_times(const Interval& I, int n) {
    std::vector<double> ts;
    for (int k = 0; k < n; ++k) ts.push_back(I.lo + I.width() * k / std::max(1, n - 1));
    return ts;
}

// Per-time grid mean, cached by time value.
class MeanCache {
public:
    MeanCache(ScalarField f, ManifoldSpec M, Grid g) : f_(std::move(f)), M_(M), g_(std::move(g)) {}
    double operator()(double t) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(t);
            if (it != cache_.end()) return it->second;
        }
        const double m = mean_value(M_, [&](const Vec& x) { return f_(x, t); }, g_);
        std::lock_guard<std::mutex> lk(mu_);
        cache_.emplace(t, m);
        return m;
    }

private:
    ScalarField f_;
    ManifoldSpec M_;
    Grid g_;
    std::mutex mu_;
    std::unordered_map<double, double> cache_;
};

}  // namespace

NormalizedHamiltonian normalize(const Hamiltonian& F, const ManifoldSpec& M, const Grid& g, int time_samples) {
    NormalizedHamiltonian N;
    static_cast<Hamiltonian&>(N) = F;
    N.manifold = M;
    if (!M.closed()) {
        if (!F.support) throw Error(ErrorCode::invalid_argument, "open manifold needs a declared compact support");
        validate_support(F, *F.support, F.autonomous ? 1 : time_samples);
        N.evidence.support = F.support;
        return N;
    }
    if (F.autonomous) {
        const double m = mean_value(M, [&](const Vec& x) { return F.value(x, F.time.lo); }, g);
        auto base = F.value;
        N.value = [base, m](const Vec& x, double t) { return base(x, t) - m; };
    } else {
        auto cache = std::make_shared<MeanCache>(F.value, M, g);
        auto base = F.value;
        N.value = [base, cache](const Vec& x, double t) { return base(x, t) - (*cache)(t); };
    }
    N.name = F.name.empty() ? "normalized" : F.name;
    for (double t : sample_times(F.time, F.autonomous ? 1 : time_samples)) {
        N.evidence.times.push_back(t);
        N.evidence.means.push_back(mean_value(M, [&](const Vec& x) { return N.value(x, t); }, g));
    }
    return N;
}

NormalizedHamiltonian assume_normalized(const Hamiltonian& F, const Grid& g, int time_samples) {
    NormalizedHamiltonian N;
    static_cast<Hamiltonian&>(N) = F;
    if (!F.manifold.closed()) {
        if (!F.support) throw Error(ErrorCode::invalid_argument, "open manifold needs a declared compact support");
        validate_support(F, *F.support, F.autonomous ? 1 : time_samples);
        N.evidence.support = F.support;
        return N;
    }
    for (double t : sample_times(F.time, F.autonomous ? 1 : time_samples)) {
        const double m = mean_value(F.manifold, [&](const Vec& x) { return F.value(x, t); }, g);
        if (std::abs(m) > 1e-6) {
            std::ostringstream os;
            os << "Hamiltonian " << F.name << " has mean " << m << " at t=" << t;
            throw Error(ErrorCode::verification_failed, os.str());
        }
        N.evidence.times.push_back(t);
        N.evidence.means.push_back(m);
    }
    return N;
}

double poisson_bracket(const Hamiltonian& F, const Hamiltonian& G, const Vec& x, double t) {
    // {F,G} = -dG(sgrad F)
    return -G.grad(x, t).dot(sgrad(F, x, t));
}

namespace {

// Radial projection onto the sphere so that finite differences may probe off-sphere points.
Vec canonical_lift(const ManifoldSpec& M, const Vec& x) {
    if (M.kind == ManifoldKind::sphere2) return x / x.norm();
    return x;
}

void check_flow_matches(const Hamiltonian& F, const FlowMap& flow) {
    const Hamiltonian& Ff = flow.hamiltonian();
    if (Ff.manifold.kind != F.manifold.kind || Ff.manifold.area_scale != F.manifold.area_scale)
        throw Error(ErrorCode::invalid_argument, "flow and Hamiltonian live on different manifolds");
    // residual test: both fields agree at probe points
    const int d = F.manifold.ambient_dim();
    const double t = 0.5 * (F.time.lo + F.time.hi);
    for (int k = 0; k < 3; ++k) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = 0.1 + 0.23 * k + 0.17 * i;
        if (F.manifold.kind == ManifoldKind::sphere2) x /= x.norm();
        if (std::abs(F.value(x, t) - Ff.value(x, t)) > 1e-9)
            throw Error(ErrorCode::invalid_argument, "flow was not generated by this Hamiltonian");
    }
}

}  // namespace

Hamiltonian product_hamiltonian(const Hamiltonian& F, const Hamiltonian& G, std::shared_ptr<const FlowMap> flowF) {
    if (!flowF) throw Error(ErrorCode::invalid_argument, "product needs the flow of F");
    check_flow_matches(F, *flowF);
    Hamiltonian H;
    H.manifold = F.manifold;
    H.time = F.time;
    H.autonomous = false;
    H.name = "(" + F.name + ")#(" + G.name + ")";
    auto Fv = F.value, Gv = G.value;
    const ManifoldSpec M = F.manifold;
    H.value = [Fv, Gv, flowF, M](const Vec& x, double t) {
        return Fv(x, t) + Gv(flowF->inverse(canonical_lift(M, x), t), t);
    };
    if (F.exact_flow && G.exact_flow) {
        auto ff = F.exact_flow, gf = G.exact_flow;
        const double t0 = F.time.lo;
        // f_t1 g_t1 g_t0^{-1} f_t0^{-1}
        H.exact_flow = [ff, gf, t0](const Vec& x, double a, double b) {
            return ff(gf(ff(x, a, t0), a, b), t0, b);
        };
    }
    return H;
}

Hamiltonian inverse_hamiltonian(const Hamiltonian& F, std::shared_ptr<const FlowMap> flowF) {
    if (!flowF) throw Error(ErrorCode::invalid_argument, "inverse needs the flow of F");
    check_flow_matches(F, *flowF);
    Hamiltonian H;
    H.manifold = F.manifold;
    H.time = F.time;
    H.autonomous = F.autonomous;
    H.name = "inverse(" + F.name + ")";
    auto Fv = F.value;
    const ManifoldSpec M = F.manifold;
    H.value = [Fv, flowF, M](const Vec& x, double t) { return -Fv((*flowF)(canonical_lift(M, x), t), t); };
    if (F.exact_flow) {
        auto ff = F.exact_flow;
        const double t0 = F.time.lo;
        // path t -> f_t^{-1}: x(t1) = f_t1^{-1} f_t0 x
        H.exact_flow = [ff, t0](const Vec& x, double a, double b) { return ff(ff(x, t0, a), b, t0); };
    }
    return H;
}

Hamiltonian reparametrize(const Hamiltonian& F, const TimeMap& b, Interval new_time) {
    if (!b.b || !b.db) throw Error(ErrorCode::invalid_argument, "time map needs b and b'");
    if (std::abs(b.b(new_time.lo) - F.time.lo) > 1e-12)
        throw Error(ErrorCode::invalid_argument, "time map must send the start of the interval to the start of F's interval");
    Hamiltonian H = F;
    H.time = new_time;
    H.autonomous = false;
    H.name = "reparametrized(" + F.name + ")";
    auto Fv = F.value;
    H.value = [Fv, b](const Vec& x, double t) { return b.db(t) * Fv(x, b.b(t)); };
    if (F.gradient) {
        auto Fg = F.gradient;
        H.gradient = [Fg, b](const Vec& x, double t) -> Vec { return b.db(t) * Fg(x, b.b(t)); };
    } else {
        H.gradient = nullptr;
    }
    if (F.hessian) {
        auto Fh = F.hessian;
        H.hessian = [Fh, b](const Vec& x, double t) -> Mat { return b.db(t) * Fh(x, b.b(t)); };
    } else {
        H.hessian = nullptr;
    }
    if (F.exact_flow) {
        auto ff = F.exact_flow;
        H.exact_flow = [ff, b](const Vec& x, double t0, double t1) { return ff(x, b.b(t0), b.b(t1)); };
    }
    return H;
}

Hamiltonian cutoff(const ScalarField& Hf, const GradientField& gradH, const Box& region, double margin,
                   const ManifoldSpec& M, const std::string& name) {
    if (!(margin > 0.0)) throw Error(ErrorCode::invalid_argument, "cutoff margin must be positive");
    if (M.kind == ManifoldKind::sphere2) throw Error(ErrorCode::unsupported, "box cutoffs need a canonical chart");
    Hamiltonian C;
    C.manifold = M;
    C.autonomous = true;
    C.name = name;
    if (region.empty()) {
        const int d = M.dim();
        C.value = [](const Vec&, double) { return 0.0; };
        C.gradient = [d](const Vec&, double) -> Vec { return Vec::Zero(d); };
        return C;
    }
    if (region.dim() != M.dim()) throw Error(ErrorCode::invalid_argument, "cutoff region has the wrong dimension");
    C.support = region.inflated(margin);
    auto factor = [region, margin](const Vec& x) {
        double a = 1.0;
        for (int i = 0; i < region.dim(); ++i) {
            const auto& I = region.axes[i];
            const double d = std::max({I.lo - x[i], x[i] - I.hi, 0.0});
            a *= bump_profile(d, 0.0, margin);
        }
        return a;
    };
    C.value = [Hf, factor](const Vec& x, double t) {
        const double a = factor(x);
        return a == 0.0 ? 0.0 : a * Hf(x, t);
    };
    if (gradH) {
        C.gradient = [Hf, gradH, region, margin](const Vec& x, double t) -> Vec {
            const int d = region.dim();
            std::vector<double> s(d), ds(d);
            for (int i = 0; i < d; ++i) {
                const auto& I = region.axes[i];
                if (x[i] < I.lo) {
                    s[i] = bump_profile(I.lo - x[i], 0.0, margin);
                    ds[i] = -bump_profile_derivative(I.lo - x[i], 0.0, margin);
                } else if (x[i] > I.hi) {
                    s[i] = bump_profile(x[i] - I.hi, 0.0, margin);
                    ds[i] = bump_profile_derivative(x[i] - I.hi, 0.0, margin);
                } else {
                    s[i] = 1.0;
                    ds[i] = 0.0;
                }
            }
            double a = 1.0;
            for (double v : s) a *= v;
            Vec g = a * gradH(x, t);
            const double h = Hf(x, t);
            for (int i = 0; i < d; ++i) {
                double da = ds[i];
                for (int j = 0; j < d; ++j)
                    if (j != i) da *= s[j];
                g[i] += da * h;
            }
            return g;
        };
    }
    return C;
}

}  // namespace hofer
