#include "hofer/dbar.hpp"

#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hofer {

namespace {

constexpr Complex I(0.0, 1.0);

CVec one(Complex c) {
    CVec v(1);
    v[0] = c;
    return v;
}

CVec central(const std::function<CVec(Complex)>& f, Complex z, Complex dir, double h) {
    return (-f(z + 2.0 * h * dir) + 8.0 * f(z + h * dir) - 8.0 * f(z - h * dir) + f(z - 2.0 * h * dir)) / (12.0 * h);
}

constexpr double fd_step = 1e-3;

}  // namespace

CVec DiscMap::dx(Complex z) const { return fx ? fx(z) : central(f, z, 1.0, fd_step); }
CVec DiscMap::dy(Complex z) const { return fy ? fy(z) : central(f, z, I, fd_step); }

DiscMap identity_disc() {
    return {[](Complex z) { return one(z); }, [](Complex) { return one(1.0); }, [](Complex) { return one(I); }, "z"};
}

DiscMap conjugate_disc() {
    return {[](Complex z) { return one(std::conj(z)); }, [](Complex) { return one(1.0); }, [](Complex) { return one(-I); },
            "conj(z)"};
}

DiscMap square_disc() {
    return {[](Complex z) { return one(z * z); }, [](Complex z) { return one(2.0 * z); },
            [](Complex z) { return one(2.0 * I * z); }, "z^2"};
}

DiscMap constant_disc(Complex c) {
    return {[c](Complex) { return one(c); }, [](Complex) { return one(0.0); }, [](Complex) { return one(0.0); },
            "constant"};
}

Complex family_eval(double s, Complex z) {
    if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_argument, "family parameter s must lie in [0, 1)");
    const Complex d = s * z + 1.0;
    if (std::abs(d) < 1e-14) throw Error(ErrorCode::invalid_argument, "pole of f_s hit");
    return s * std::conj(z) + (1.0 - s * s) / d;
}

DiscMap family_map(double s) {
    family_eval(s, 0.0);  // validates s
    // u'(z) = -s (1 - s^2) / (s z + 1)^2; f_x = s + u', f_y = -i s + i u'
    auto du = [s](Complex z) {
        const Complex d = s * z + 1.0;
        return -s * (1.0 - s * s) / (d * d);
    };
    std::ostringstream name;
    name << "f_" << s;
    return {[s](Complex z) { return one(family_eval(s, z)); }, [s, du](Complex z) { return one(s + du(z)); },
            [s, du](Complex z) { return one(-I * s + I * du(z)); }, name.str()};
}

PolarGrid polar_grid(int radial, int angular) {
    if (radial < 1 || angular < 3) throw Error(ErrorCode::invalid_argument, "polar grid too small");
    const QuadratureRule q = gauss_legendre(radial, 0.0, 1.0);
    PolarGrid g;
    g.radial = radial;
    g.angular = angular;
    for (int i = 0; i < radial; ++i)
        for (int j = 0; j < angular; ++j) {
            const double th = 2.0 * pi * j / angular;
            g.points.push_back(std::polar(q.nodes[i], th));
            g.weights.push_back(q.weights[i] * q.nodes[i] * 2.0 * pi / angular);
        }
    return g;
}

CVec dbar(const DiscMap& f, Complex z, double h) {
    if (f.analytic()) {
        if (std::abs(z) > 1.0 + 1e-12) throw Error(ErrorCode::invalid_argument, "point outside the disc");
        return 0.5 * (f.fx(z) + I * f.fy(z));
    }
    if (std::abs(z) + 2.0 * h >= 1.0) throw Error(ErrorCode::invalid_argument, "difference mode needs an interior point");
    return 0.5 * (central(f.f, z, 1.0, h) + I * central(f.f, z, I, h));
}

double omega_c(const CVec& xi, const CVec& eta) { return (xi.conjugate().cwiseProduct(eta)).sum().imag(); }

double area_density(const CVec& xi, const CVec& eta) {
    const double a = xi.squaredNorm(), b = eta.squaredNorm();
    const double c = (xi.conjugate().cwiseProduct(eta)).sum().real();
    return std::sqrt(std::max(0.0, a * b - c * c));
}

double dbar_bound_density(const CVec& xi, const CVec& eta) {
    return 0.5 * (xi + I * eta).squaredNorm() + omega_c(xi, eta);
}

namespace {

struct AreaSums {
    double omega = 0.0, area = 0.0, energy = 0.0;
};

AreaSums area_sums(const DiscMap& f, int radial, int angular) {
    const PolarGrid g = polar_grid(radial, angular);
    std::vector<double> om(g.points.size()), ar(g.points.size()), en(g.points.size());
    parallel_for(g.points.size(), [&](std::size_t k) {
        const Complex z = g.points[k];
        const CVec a = f.dx(z), b = f.dy(z);
        om[k] = g.weights[k] * omega_c(a, b);
        ar[k] = g.weights[k] * area_density(a, b);
        en[k] = g.weights[k] * 0.5 * (a + I * b).squaredNorm();  // 2 |dbar f|^2
    });
    AreaSums s;
    for (std::size_t k = 0; k < om.size(); ++k) {
        s.omega += om[k];
        s.area += ar[k];
        s.energy += en[k];
    }
    return s;
}

}  // namespace

DiscAreas areas(const DiscMap& f, int radial, int angular) {
    const AreaSums full = area_sums(f, radial, angular);
    const AreaSums half = area_sums(f, std::max(1, radial / 2), std::max(3, angular / 2));
    DiscAreas d;
    d.symplectic = full.omega;
    d.euclidean = full.area;
    d.dbar_energy = full.energy;
    d.error = std::max({std::abs(full.omega - half.omega), std::abs(full.area - half.area),
                        std::abs(full.energy - half.energy), 1e-12});
    Report& r = d.report;
    r.experiment = "disc-areas";
    r.add_scalar("omega", d.symplectic, d.error);
    r.add_scalar("area", d.euclidean, d.error);
    r.add_scalar("dbar_energy", d.dbar_energy, d.error);
    const double slack_i = d.dbar_energy + d.symplectic - d.euclidean;
    const double slack_ii = d.euclidean - std::abs(d.symplectic);
    r.add_scalar("slack_upper", slack_i, 2 * d.error);
    r.add_scalar("slack_lower", slack_ii, 2 * d.error);
    r.check_ge("area_le_energy_plus_omega", slack_i, -2 * d.error);
    r.check_ge("area_ge_abs_omega", slack_ii, -2 * d.error);
    return d;
}

double family_boundary_modulus_defect(double s, int angles) {
    double worst = 0.0;
    for (int k = 0; k < angles; ++k)
        worst = std::max(worst, std::abs(std::abs(family_eval(s, std::polar(1.0, 2.0 * pi * k / angles))) - 1.0));
    return worst;
}

int family_boundary_degree(double s, int angles) {
    if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_argument, "family parameter s must lie in [0, 1)");
    auto g = [s](double th) {
        const Complex z = std::polar(1.0, th);
        return s + z * (1.0 - s * s) / (s * z + 1.0);
    };
    double turn = 0.0;
    Complex prev = g(0.0);
    for (int k = 1; k <= angles; ++k) {
        const Complex cur = g(2.0 * pi * k / angles);
        turn += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(turn / (2.0 * pi)));
}

Complex family_alpha(double s, double theta) {
    if (!(s > 0.0)) throw Error(ErrorCode::invalid_argument, "alpha needs s > 0");
    return -std::polar(1.0, theta) / s;
}

double family_deviation(double s, double delta, bool inside, int radial, int angular) {
    double worst = 0.0;
    // include the boundary ring: the sup near -1 is attained there
    for (int i = 1; i <= radial; ++i)
        for (int j = 0; j < angular; ++j) {
            const Complex z = std::polar(double(i) / radial, 2.0 * pi * j / angular);
            const double d = std::abs(z + 1.0);
            if (inside ? d > delta : d < delta) continue;
            if (std::abs(s * z + 1.0) < 1e-12) continue;
            worst = std::max(worst, std::abs(family_eval(s, z) - std::conj(z)));
        }
    return worst;
}

SigmaResult boundary_sigma(const DiscMap& f, int angles) {
    if (angles < 3) throw Error(ErrorCode::invalid_argument, "too few angles");
    // z = e^{i theta}: dy - i dx = e^{i theta} d theta
    Complex acc = 0.0;
    SigmaResult r;
    for (int k = 0; k < angles; ++k) {
        const Complex z = std::polar(1.0, 2.0 * pi * k / angles);
        const Complex phi = f.f(z)[0];
        acc += phi * z;
        r.boundary_max = std::max(r.boundary_max, std::abs(phi));
    }
    r.sigma = acc / double(angles);
    r.bounded = std::abs(r.sigma) <= r.boundary_max + 1e-12;
    return r;
}

Curve real_section(double s, int samples) {
    if (samples < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples");
    Curve c{{"x", "f_s", "conj_z"}, {}};
    for (int k = 0; k < samples; ++k) {
        const double x = -1.0 + 2.0 * k / (samples - 1);
        if (std::abs(s * x + 1.0) < 1e-14) continue;
        c.rows.push_back({x, family_eval(s, x).real(), x});
    }
    return c;
}

}  // namespace hofer
