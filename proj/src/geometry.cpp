#include "hofer/geometry.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace hofer {

ManifoldSpec ManifoldSpec::euclidean(int n) {
    if (n < 1 || n > 3) throw Error(ErrorCode::invalid_argument, "euclidean(n) supports 1 <= n <= 3");
    return ManifoldSpec{ManifoldKind::euclidean, n, 1.0};
}

ManifoldSpec ManifoldSpec::torus2() { return ManifoldSpec{ManifoldKind::torus2, 1, 1.0}; }

ManifoldSpec ManifoldSpec::sphere2(double area_scale) {
    if (!(area_scale > 0.0) || !std::isfinite(area_scale))
        throw Error(ErrorCode::invalid_argument, "area_scale must be a positive real");
    return ManifoldSpec{ManifoldKind::sphere2, 1, area_scale};
}

ManifoldSpec ManifoldSpec::normalized_sphere2() { return sphere2(1.0 / (4.0 * pi)); }

ManifoldSpec ManifoldSpec::cylinder() { return ManifoldSpec{ManifoldKind::cylinder, 1, 1.0}; }

ManifoldSpec ManifoldSpec::parse(const std::string& name, double area_scale) {
    ManifoldSpec m;
    if (name == "torus2") m = torus2();
    else if (name == "sphere2") m = sphere2(area_scale);
    else if (name == "cylinder") m = cylinder();
    else if (name == "euclidean" || name == "euclidean(1)") m = euclidean(1);
    else if (name == "euclidean(2)") m = euclidean(2);
    else if (name == "euclidean(3)") m = euclidean(3);
    else throw Error(ErrorCode::config, "unknown manifold '" + name + "'");
    if (m.kind != ManifoldKind::sphere2) {
        if (!(area_scale > 0.0)) throw Error(ErrorCode::invalid_argument, "area_scale must be positive");
        m.area_scale = area_scale;
    }
    return m;
}

bool ManifoldSpec::closed() const { return kind == ManifoldKind::torus2 || kind == ManifoldKind::sphere2; }

int ManifoldSpec::dim() const { return kind == ManifoldKind::euclidean ? 2 * n : 2; }

int ManifoldSpec::ambient_dim() const { return kind == ManifoldKind::sphere2 ? 3 : dim(); }

double ManifoldSpec::total_area() const {
    switch (kind) {
        case ManifoldKind::torus2: return area_scale;
        case ManifoldKind::sphere2: return 4.0 * pi * area_scale;
        default: return std::numeric_limits<double>::infinity();
    }
}

std::string ManifoldSpec::name() const {
    switch (kind) {
        case ManifoldKind::euclidean: return "euclidean(" + std::to_string(n) + ")";
        case ManifoldKind::torus2: return "torus2";
        case ManifoldKind::sphere2: return "sphere2";
        case ManifoldKind::cylinder: return "cylinder";
    }
    return "?";
}

double Grid::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void check_point(const ManifoldSpec& M, const Vec& x) {
    if (x.size() != M.ambient_dim()) {
        std::ostringstream os;
        os << "point has " << x.size() << " coordinates, " << M.name() << " expects " << M.ambient_dim();
        throw Error(ErrorCode::invalid_argument, os.str());
    }
    if (!x.allFinite()) throw Error(ErrorCode::invalid_argument, "point has non-finite coordinates");
    if (M.kind == ManifoldKind::sphere2 && std::abs(x.norm() - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "point is off the sphere, |x|-1 = " << (x.norm() - 1.0);
        throw Error(ErrorCode::invalid_argument, os.str());
    }
}

static void check_tangent(const Vec& x, const Vec& v) {
    const double r = std::abs(v.dot(x));
    if (r > 1e-9) {
        std::ostringstream os;
        os << "vector is not tangent to the sphere, residual " << r;
        throw Error(ErrorCode::invalid_argument, os.str());
    }
}

double omega_eval(const ManifoldSpec& M, const Vec& x, const Vec& xi, const Vec& eta) {
    check_point(M, x);
    if (xi.size() != M.ambient_dim() || eta.size() != M.ambient_dim())
        throw Error(ErrorCode::invalid_argument, "tangent vector has the wrong dimension");
    if (M.kind == ManifoldKind::sphere2) {
        check_tangent(x, xi);
        check_tangent(x, eta);
        Eigen::Vector3d X = x.head<3>(), a = xi.head<3>(), b = eta.head<3>();
        // symmetrized so that swapping xi and eta negates the result bit for bit
        const double ab = b.dot(X.cross(a)), ba = a.dot(X.cross(b));
        return M.area_scale * 0.5 * (ab - ba);
    }
    const int n = M.dim() / 2;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += xi[j] * eta[n + j] - xi[n + j] * eta[j];
    return M.area_scale * s;
}

Mat omega_matrix(const ManifoldSpec& M) {
    if (M.kind == ManifoldKind::sphere2) throw Error(ErrorCode::unsupported, "omega_matrix needs a canonical chart");
    const int d = M.dim(), n = d / 2;
    Mat W = Mat::Zero(d, d);
    for (int j = 0; j < n; ++j) {
        W(j, n + j) = M.area_scale;
        W(n + j, j) = -M.area_scale;
    }
    return W;
}

double mean_value(const ManifoldSpec& M, const std::function<double(const Vec&)>& f, const Grid& g) {
    if (!M.closed()) throw Error(ErrorCode::unsupported, "mean value is only the normalization rule on closed manifolds");
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        s += g.weights[i] * f(g.points[i]);
        w += g.weights[i];
    }
    return s / w;
}

namespace {

Eigen::Vector3d ico_vertex(int i) {
    static const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    static const double v[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                                    {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                                    {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    return Eigen::Vector3d(v[i][0], v[i][1], v[i][2]).normalized();
}

const int ico_faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

// Area of the spherical triangle spanned by unit vectors (Van Oosterom-Strackee).
double spherical_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    double num = std::abs(a.dot(b.cross(c)));
    double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

Grid sphere_grid(const ManifoldSpec& M, int k) {
    Grid g;
    g.resolution = k;
    g.points.reserve(20 * k * k);
    g.weights.reserve(20 * k * k);
    for (const auto& f : ico_faces) {
        Eigen::Vector3d A = ico_vertex(f[0]), B = ico_vertex(f[1]), C = ico_vertex(f[2]);
        auto node = [&](int i, int j) {
            // barycentric lattice point, projected to the sphere
            Eigen::Vector3d p = A + (B - A) * (double(i) / k) + (C - A) * (double(j) / k);
            return Eigen::Vector3d(p.normalized());
        };
        for (int i = 0; i < k; ++i) {
            for (int j = 0; i + j < k; ++j) {
                Eigen::Vector3d a = node(i, j), b = node(i + 1, j), c = node(i, j + 1);
                Eigen::Vector3d m = (a + b + c).normalized();
                g.points.push_back(vec3(m.x(), m.y(), m.z()));
                g.weights.push_back(M.area_scale * spherical_area(a, b, c));
                if (i + j + 1 < k) {
                    Eigen::Vector3d d = node(i + 1, j + 1);
                    Eigen::Vector3d m2 = (b + d + c).normalized();
                    g.points.push_back(vec3(m2.x(), m2.y(), m2.z()));
                    g.weights.push_back(M.area_scale * spherical_area(b, d, c));
                }
            }
        }
    }
    // edge of the base icosahedron is about 1.1 radians
    g.spacing = 1.1 / k;
    return g;
}

Grid box_grid(const Box& box, int res) {
    Grid g;
    g.resolution = res;
    const int d = box.dim();
    long total = 1;
    for (int i = 0; i < d; ++i) total *= res;
    double cell = 1.0;
    g.spacing = 0.0;
    for (const auto& a : box.axes) {
        cell *= a.width() / res;
        g.spacing = std::max(g.spacing, a.width() / res);
    }
    g.points.reserve(total);
    g.weights.assign(total, cell);
    std::vector<int> idx(d, 0);
    for (long c = 0; c < total; ++c) {
        long r = c;
        Vec x(d);
        // last axis varies fastest
        for (int i = d - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(r % res);
            r /= res;
            x[i] = box.axes[i].lo + (idx[i] + 0.5) * box.axes[i].width() / res;
        }
        g.points.push_back(x);
    }
    return g;
}

}  // namespace

Grid sample_grid(const ManifoldSpec& M, int resolution, const std::optional<Box>& region) {
    if (resolution < 4) throw Error(ErrorCode::invalid_argument, "grid resolution must be at least 4");
    if (region && (region->dim() != M.dim() || region->empty()))
        throw Error(ErrorCode::invalid_argument, "region box has the wrong dimension or is empty");
    switch (M.kind) {
        case ManifoldKind::sphere2: {
            if (region) throw Error(ErrorCode::invalid_argument, "sphere grids do not take a chart region");
            return sphere_grid(M, resolution);
        }
        case ManifoldKind::torus2: {
            Box b{{{0.0, 1.0}, {0.0, 1.0}}};
            if (region) {
                for (const auto& a : region->axes)
                    if (a.lo < -1e-12 || a.hi > 1.0 + 1e-12)
                        throw Error(ErrorCode::invalid_argument, "region lies outside the torus chart [0,1]^2");
                b = *region;
            }
            Grid g = box_grid(b, resolution);
            for (auto& w : g.weights) w *= M.area_scale;
            return g;
        }
        case ManifoldKind::cylinder: {
            Box b{{{-1.0, 1.0}, {0.0, 1.0}}};
            if (region) {
                if (region->axes[1].lo < -1e-12 || region->axes[1].hi > 1.0 + 1e-12)
                    throw Error(ErrorCode::invalid_argument, "region lies outside the cylinder chart q in [0,1]");
                b = *region;
            }
            Grid g = box_grid(b, resolution);
            for (auto& w : g.weights) w *= M.area_scale;
            return g;
        }
        case ManifoldKind::euclidean: {
            Box b;
            if (region) {
                for (const auto& a : region->axes)
                    if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
                        throw Error(ErrorCode::invalid_argument, "region must be a finite box");
                b = *region;
            } else {
                b.axes.assign(M.dim(), Interval{-1.0, 1.0});
            }
            Grid g = box_grid(b, resolution);
            for (auto& w : g.weights) w *= M.area_scale;
            return g;
        }
    }
    throw Error(ErrorCode::internal, "unreachable");
}

Vec canonical_point(const ManifoldSpec& M, const Vec& x) {
    Vec y = x;
    switch (M.kind) {
        case ManifoldKind::torus2:
            y[0] -= std::floor(y[0]);
            y[1] -= std::floor(y[1]);
            break;
        case ManifoldKind::cylinder: y[1] -= std::floor(y[1]); break;
        case ManifoldKind::sphere2: y /= y.norm(); break;
        default: break;
    }
    return y;
}

static double wrap_diff(double d) { return d - std::round(d); }

double distance(const ManifoldSpec& M, const Vec& a, const Vec& b) {
    switch (M.kind) {
        case ManifoldKind::torus2: return std::hypot(wrap_diff(a[0] - b[0]), wrap_diff(a[1] - b[1]));
        case ManifoldKind::cylinder: return std::hypot(a[0] - b[0], wrap_diff(a[1] - b[1]));
        default: return (a - b).norm();
    }
}

std::vector<Vec> tangent_basis(const ManifoldSpec& M, const Vec& x) {
    std::vector<Vec> basis;
    if (M.kind == ManifoldKind::sphere2) {
        Eigen::Vector3d X = x.head<3>();
        Eigen::Vector3d ref = std::abs(X.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
        Eigen::Vector3d e1 = (ref - X * X.dot(ref)).normalized();
        Eigen::Vector3d e2 = X.cross(e1);
        basis.push_back(vec3(e1.x(), e1.y(), e1.z()));
        basis.push_back(vec3(e2.x(), e2.y(), e2.z()));
        return basis;
    }
    for (int i = 0; i < M.dim(); ++i) {
        Vec e = Vec::Zero(M.dim());
        e[i] = 1.0;
        basis.push_back(e);
    }
    return basis;
}

Vec retract(const ManifoldSpec& M, const Vec& x, const Vec& v) {
    Vec y = x + v;
    if (M.kind == ManifoldKind::sphere2) y /= y.norm();
    return y;
}

}  // namespace hofer
