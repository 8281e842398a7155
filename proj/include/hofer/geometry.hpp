#pragma once

#include "hofer/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

enum class ManifoldKind { euclidean, torus2, sphere2, cylinder };

// Model phase spaces. Canonical charts order coordinates as (p1..pn, q1..qn).
// The sphere is the unit sphere in R^3 with Omega = area_scale * induced area form.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::torus2;
    int n = 1;
    double area_scale = 1.0;

    static ManifoldSpec euclidean(int n = 1);
    static ManifoldSpec torus2();
    static ManifoldSpec sphere2(double area_scale = 1.0);
    // Sphere with total area 1.
    static ManifoldSpec normalized_sphere2();
    static ManifoldSpec cylinder();
    static ManifoldSpec parse(const std::string& name, double area_scale = 1.0);

    bool closed() const;
    int dim() const;          // 2n
    int ambient_dim() const;  // length of point vectors
    double total_area() const;  // symplectic volume of a closed manifold
    std::string name() const;
};

struct Grid {
    std::vector<Vec> points;
    std::vector<double> weights;
    int resolution = 0;
    double spacing = 0.0;  // nominal distance between neighbouring samples

    std::size_t size() const { return points.size(); }
    double total_weight() const;
};

double omega_eval(const ManifoldSpec& M, const Vec& x, const Vec& xi, const Vec& eta);

// Omega as a matrix in the chart (canonical charts only): Omega(xi, eta) = xi^T W eta.
Mat omega_matrix(const ManifoldSpec& M);

double mean_value(const ManifoldSpec& M, const std::function<double(const Vec&)>& f, const Grid& g);

Grid sample_grid(const ManifoldSpec& M, int resolution, const std::optional<Box>& region = std::nullopt);

// Checks shape and on-manifold condition; throws invalid_argument.
void check_point(const ManifoldSpec& M, const Vec& x);

// Wraps periodic coordinates into [0,1) and projects sphere points back to unit norm.
Vec canonical_point(const ManifoldSpec& M, const Vec& x);

// Chart distance: periodic minimum image on torus/cylinder, chordal on the sphere.
double distance(const ManifoldSpec& M, const Vec& a, const Vec& b);

// Orthonormal tangent basis at x (canonical charts: coordinate axes).
std::vector<Vec> tangent_basis(const ManifoldSpec& M, const Vec& x);

// Moves from x along tangent vector v and returns a point on the manifold.
Vec retract(const ManifoldSpec& M, const Vec& x, const Vec& v);

}  // namespace hofer
