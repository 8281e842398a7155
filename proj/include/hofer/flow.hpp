#pragma once

#include "hofer/hamiltonian.hpp"
#include "hofer/report.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace hofer {

enum class Scheme { rk4, implicit_midpoint, exact };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct FlowOptions {
    Scheme scheme = Scheme::rk4;
    double step = 1e-3;
    std::optional<Box> chart_box;  // euclidean escape region
    double fixed_point_tol = 1e-12;
    int fixed_point_max_iter = 50;
};

// Implicit midpoint for autonomous fields, rk4 otherwise; step 1e-3.
FlowOptions default_flow_options(const Hamiltonian& F);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> points;
    const Vec& back() const { return points.back(); }
};

// Trajectory of xdot = sgrad F_t(x) from t0 to t1 (t1 < t0 integrates backward).
// Torus and cylinder points are kept in the lifted chart; sphere points are renormalized per step.
Trajectory integrate_flow(const Hamiltonian& F, const Vec& x0, double t0, double t1, const FlowOptions& opt);
Vec flow_point(const Hamiltonian& F, const Vec& x0, double t0, double t1, const FlowOptions& opt);

// f_t generated by F with f_0 = id. Safe to share after construction; integration of
// new trajectories happens behind an internal lock and results are cached per start point.
class FlowMap {
public:
    FlowMap(Hamiltonian F, FlowOptions opt);
    explicit FlowMap(Hamiltonian F);

    const Hamiltonian& hamiltonian() const { return F_; }
    const FlowOptions& options() const { return opt_; }

    // f_t(x)
    Vec operator()(const Vec& x, double t) const;
    // f_t^{-1}(x)
    Vec inverse(const Vec& x, double t) const;
    // f_{t1} f_{t0}^{-1}(x)
    Vec evolve(const Vec& x, double t0, double t1) const;
    // Full trajectory of x from t = 0 to t1, cached.
    const Trajectory& trajectory(const Vec& x, double t1) const;
    std::size_t cache_size() const;

private:
    Hamiltonian F_;
    FlowOptions opt_;
    mutable std::mutex mu_;
    mutable std::map<std::vector<double>, std::unique_ptr<Trajectory>> cache_;
};

struct MonodromyMatrix {
    Vec base;
    std::vector<double> times;
    std::vector<Mat> matrices;

    Hamiltonian source;
    double step = 1e-3;

    // M(t), re-integrated from the nearest stored time not after t.
    Mat at(double t) const;
};

// Linearized flow at a fixed point; Mdot = D(sgrad F)(x) M, M(0) = I. Canonical charts only.
MonodromyMatrix monodromy(const Hamiltonian& F, const Vec& x_fixed, double t1, double step = 1e-3);

// Linearized flow along the trajectory of an arbitrary point (rk4 on the joint system).
Mat linearized_flow(const Hamiltonian& F, const Vec& x0, double t0, double t1, double step = 1e-3);

Report symplecticity_report(const FlowMap& flow, const Grid& g, double t, double fd_step = 1e-6);
Report conservation_report(const FlowMap& flow, const Vec& x0, double t1);

}  // namespace hofer
