#include "hofer/hamiltonian.hpp"
#include "hofer/numerics.hpp"

#include <cmath>
#include <set>

namespace hofer {

namespace {

double param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& name, const Params& p, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : p)
        if (!ok.count(k)) throw Error(ErrorCode::config, "catalog entry '" + name + "' has no parameter '" + k + "'");
}

Vec rotate(const Eigen::Vector3d& axis, double angle, const Vec& x) {
    Eigen::Vector3d y = Eigen::AngleAxisd(angle, axis) * Eigen::Vector3d(x.head<3>());
    return vec3(y.x(), y.y(), y.z());
}

// F = <a, x> on the sphere with area scale s; the flow rotates about a by angle -|a|(t1-t0)/s.
Hamiltonian sphere_height(const Eigen::Vector3d& a, double s, const std::string& name) {
    Hamiltonian F;
    F.manifold = ManifoldSpec::sphere2(s);
    F.name = name;
    F.value = [a](const Vec& x, double) { return a.dot(x.head<3>()); };
    F.gradient = [a](const Vec&, double) { return vec3(a.x(), a.y(), a.z()); };
    F.hessian = [](const Vec&, double) -> Mat { return Mat::Zero(3, 3); };
    const double norm = a.norm();
    if (norm > 0.0) {
        Eigen::Vector3d axis = a / norm;
        F.exact_flow = [axis, norm, s](const Vec& x, double t0, double t1) {
            return rotate(axis, -norm * (t1 - t0) / s, x);
        };
    } else {
        F.exact_flow = [](const Vec& x, double, double) { return x; };
    }
    return F;
}

// Time modulation c(t) = 1 + beta sin(2 pi t) and its primitive.
struct Modulation {
    double beta = 0.0;
    double c(double t) const { return 1.0 + beta * std::sin(2.0 * pi * t); }
    double C(double t) const { return t + beta * (1.0 - std::cos(2.0 * pi * t)) / (2.0 * pi); }
};

// Torus shear: F = c(t) a/(2 pi) sin(2 pi (u + phase)) with u = p (axis 0) or u = q (axis 1).
Hamiltonian torus_shear(int axis, double a, double phase, double beta, const std::string& name) {
    Hamiltonian F;
    F.manifold = ManifoldSpec::torus2();
    F.name = name;
    F.autonomous = beta == 0.0;
    Modulation m{beta};
    F.value = [=](const Vec& x, double t) { return m.c(t) * a / (2.0 * pi) * std::sin(2.0 * pi * (x[axis] + phase)); };
    F.gradient = [=](const Vec& x, double t) {
        Vec g = Vec::Zero(2);
        g[axis] = m.c(t) * a * std::cos(2.0 * pi * (x[axis] + phase));
        return g;
    };
    F.hessian = [=](const Vec& x, double t) {
        Mat H = Mat::Zero(2, 2);
        H(axis, axis) = -m.c(t) * a * 2.0 * pi * std::sin(2.0 * pi * (x[axis] + phase));
        return H;
    };
    F.exact_flow = [=](const Vec& x, double t0, double t1) {
        Vec y = x;
        const double slope = a * std::cos(2.0 * pi * (x[axis] + phase)) * (m.C(t1) - m.C(t0));
        // sgrad = (-F_q, F_p)
        if (axis == 0) y[1] += slope;
        else y[0] -= slope;
        return y;
    };
    return F;
}

// Profile bump in one canonical coordinate: F = A * bump(|u - center|) with periodic distance when wrap is set.
Hamiltonian coordinate_bump(ManifoldSpec M, int axis, double A, double center, double inner, double outer, bool wrap,
                            const std::string& name) {
    Hamiltonian F;
    F.manifold = M;
    F.name = name;
    auto dist = [=](double u) {
        double d = u - center;
        if (wrap) d -= std::round(d);
        return d;
    };
    F.value = [=](const Vec& x, double) { return A * bump_profile(std::abs(dist(x[axis])), inner, outer); };
    auto slope = [=](double u) {
        const double d = dist(u);
        const double s = d >= 0 ? 1.0 : -1.0;
        return A * s * bump_profile_derivative(std::abs(d), inner, outer);
    };
    F.gradient = [=](const Vec& x, double) {
        Vec g = Vec::Zero(2);
        g[axis] = slope(x[axis]);
        return g;
    };
    F.exact_flow = [=](const Vec& x, double t0, double t1) {
        Vec y = x;
        if (axis == 0) y[1] += (t1 - t0) * slope(x[0]);
        else y[0] -= (t1 - t0) * slope(x[1]);
        return y;
    };
    if (M.kind == ManifoldKind::cylinder && axis == 0) F.support = Box{{{center - outer, center + outer}, {0.0, 1.0}}};
    return F;
}

// Disc bump A * bump(|x - c|) in a planar chart; periodic minimum image in the wrapped axes.
Hamiltonian disc_bump(ManifoldSpec M, double A, double cp, double cq, double inner, double outer, bool wrap_p,
                      bool wrap_q, const std::string& name) {
    Hamiltonian F;
    F.manifold = M;
    F.name = name;
    auto offset = [=](const Vec& x) {
        double dp = x[0] - cp, dq = x[1] - cq;
        if (wrap_p) dp -= std::round(dp);
        if (wrap_q) dq -= std::round(dq);
        return Eigen::Vector2d(dp, dq);
    };
    F.value = [=](const Vec& x, double) { return A * bump_profile(offset(x).norm(), inner, outer); };
    F.gradient = [=](const Vec& x, double) {
        Eigen::Vector2d d = offset(x);
        const double r = d.norm();
        if (r <= inner || r >= outer) return Vec(Vec::Zero(2));
        const double s = A * bump_profile_derivative(r, inner, outer) / r;
        return vec2(s * d.x(), s * d.y());
    };
    if (!wrap_p) F.support = Box{{{cp - outer, cp + outer}, {cq - outer, cq + outer}}};
    return F;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"rotation_k", "height",       "oscillator", "translation_gen", "radial_bump", "cylinder_disc_bump",
            "torus_bump", "tilted_height", "shear_p",   "shear_q",         "strip_bump",  "q_bump",
            "zero"};
}

Hamiltonian catalog(const std::string& name_in, const Params& p) {
    std::string name = name_in;
    Params params = p;
    // rotation_<k> shorthand
    if (name.rfind("rotation_", 0) == 0 && name != "rotation_k") {
        const std::string tail = name.substr(9);
        char* end = nullptr;
        const double k = std::strtod(tail.c_str(), &end);
        if (tail.empty() || *end != '\0') throw Error(ErrorCode::config, "unknown Hamiltonian '" + name_in + "'");
        params["k"] = k;
        name = "rotation_k";
    }
    if (name == "rotation_k") {
        reject_unknown(name, params, {"k", "area_scale"});
        const double k = param(params, "k", 1.0), s = param(params, "area_scale", 1.0);
        return sphere_height(Eigen::Vector3d(0, 0, 2.0 * pi * k * s), s, "rotation_" + std::to_string(k));
    }
    if (name == "height") {
        reject_unknown(name, params, {"ax", "ay", "az", "amplitude", "area_scale"});
        Eigen::Vector3d a(param(params, "ax", 0.0), param(params, "ay", 0.0), param(params, "az", 1.0));
        if (a.norm() == 0.0) throw Error(ErrorCode::invalid_argument, "height needs a nonzero axis");
        a = a.normalized() * param(params, "amplitude", 1.0);
        return sphere_height(a, param(params, "area_scale", 1.0), "height");
    }
    if (name == "oscillator") {
        reject_unknown(name, params, {"lambda"});
        const double lam = param(params, "lambda", 1.0);
        Hamiltonian F;
        F.manifold = ManifoldSpec::euclidean(1);
        F.name = "oscillator";
        F.value = [lam](const Vec& x, double) { return pi * lam * x.squaredNorm(); };
        F.gradient = [lam](const Vec& x, double) -> Vec { return 2.0 * pi * lam * x; };
        F.hessian = [lam](const Vec&, double) -> Mat { return 2.0 * pi * lam * Mat::Identity(2, 2); };
        // z = p + iq turns by 2 pi lambda t
        F.exact_flow = [lam](const Vec& x, double t0, double t1) {
            const double a = 2.0 * pi * lam * (t1 - t0), c = std::cos(a), s = std::sin(a);
            return vec2(c * x[0] - s * x[1], s * x[0] + c * x[1]);
        };
        return F;
    }
    if (name == "translation_gen") {
        reject_unknown(name, params, {"u"});
        const double u = param(params, "u", 1.0);
        Hamiltonian F;
        F.manifold = ManifoldSpec::euclidean(1);
        F.name = "translation_gen";
        F.value = [u](const Vec& x, double) { return u * x[0]; };
        F.gradient = [u](const Vec&, double) { return vec2(u, 0.0); };
        F.hessian = [](const Vec&, double) -> Mat { return Mat::Zero(2, 2); };
        F.exact_flow = [u](const Vec& x, double t0, double t1) { return vec2(x[0], x[1] + u * (t1 - t0)); };
        return F;
    }
    if (name == "radial_bump") {
        reject_unknown(name, params, {"amplitude", "center", "inner", "outer"});
        return coordinate_bump(ManifoldSpec::cylinder(), 0, param(params, "amplitude", 1.0), param(params, "center", 0.0),
                               param(params, "inner", 0.1), param(params, "outer", 0.3), false, "radial_bump");
    }
    if (name == "cylinder_disc_bump") {
        reject_unknown(name, params, {"amplitude", "cp", "cq", "inner", "outer"});
        return disc_bump(ManifoldSpec::cylinder(), param(params, "amplitude", 1.0), param(params, "cp", 0.0),
                         param(params, "cq", 0.5), param(params, "inner", 0.1), param(params, "outer", 0.25), false, true,
                         "cylinder_disc_bump");
    }
    if (name == "torus_bump") {
        reject_unknown(name, params, {"amplitude", "cp", "cq", "inner", "outer"});
        return disc_bump(ManifoldSpec::torus2(), param(params, "amplitude", 1.0), param(params, "cp", 0.5),
                         param(params, "cq", 0.5), param(params, "inner", 0.1), param(params, "outer", 0.2), true, true,
                         "torus_bump");
    }
    if (name == "tilted_height") {
        reject_unknown(name, params, {"a", "b", "c"});
        const double a = param(params, "a", 1.0), b = param(params, "b", 0.7), c = param(params, "c", 0.1);
        const double w = 2.0 * pi;
        Hamiltonian F;
        F.manifold = ManifoldSpec::torus2();
        F.name = "tilted_height";
        F.value = [=](const Vec& x, double) {
            return a * std::cos(w * x[0]) + b * std::cos(w * x[1]) + c * std::sin(w * x[0]) * std::sin(w * x[1]);
        };
        F.gradient = [=](const Vec& x, double) {
            const double sp = std::sin(w * x[0]), cp = std::cos(w * x[0]), sq = std::sin(w * x[1]), cq = std::cos(w * x[1]);
            return vec2(w * (-a * sp + c * cp * sq), w * (-b * sq + c * sp * cq));
        };
        F.hessian = [=](const Vec& x, double) {
            const double sp = std::sin(w * x[0]), cp = std::cos(w * x[0]), sq = std::sin(w * x[1]), cq = std::cos(w * x[1]);
            Mat H(2, 2);
            H(0, 0) = w * w * (-a * cp - c * sp * sq);
            H(1, 1) = w * w * (-b * cq - c * sp * sq);
            H(0, 1) = H(1, 0) = w * w * c * cp * cq;
            return H;
        };
        return F;
    }
    if (name == "shear_p" || name == "shear_q") {
        reject_unknown(name, params, {"amplitude", "phase", "beta"});
        return torus_shear(name == "shear_p" ? 0 : 1, param(params, "amplitude", 1.0), param(params, "phase", 0.0),
                           param(params, "beta", 0.0), name);
    }
    if (name == "strip_bump" || name == "q_bump") {
        reject_unknown(name, params, {"amplitude", "center", "inner", "outer"});
        return coordinate_bump(ManifoldSpec::torus2(), name == "strip_bump" ? 0 : 1, param(params, "amplitude", 1.0),
                               param(params, "center", 0.25), param(params, "inner", 0.05), param(params, "outer", 0.15),
                               true, name);
    }
    if (name == "zero") {
        reject_unknown(name, params, {});
        Hamiltonian F;
        F.manifold = ManifoldSpec::torus2();
        F.name = "zero";
        F.value = [](const Vec&, double) { return 0.0; };
        F.gradient = [](const Vec& x, double) -> Vec { return Vec::Zero(x.size()); };
        F.hessian = [](const Vec& x, double) -> Mat { return Mat::Zero(x.size(), x.size()); };
        F.exact_flow = [](const Vec& x, double, double) { return x; };
        return F;
    }
    throw Error(ErrorCode::config, "unknown Hamiltonian '" + name_in + "'");
}

}  // namespace hofer
