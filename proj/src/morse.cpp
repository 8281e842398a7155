#include "hofer/morse.hpp"

#include "hofer/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

namespace hofer {

namespace {

constexpr double grad_tol = 1e-8;
constexpr double eig_tol = 1e-4;
constexpr double merge_radius = 1e-4;

Mat frame(const ManifoldSpec& M, const Vec& x) {
    const std::vector<Vec> b = tangent_basis(M, x);
    Mat E(b[0].size(), 2);
    E.col(0) = b[0];
    E.col(1) = b[1];
    return E;
}

// Tangential part of the ambient gradient.
Vec ambient_gradient(const Hamiltonian& F, const ManifoldSpec& M, const Vec& x) {
    Vec g = F.grad(x, 0.0);
    if (M.kind == ManifoldKind::sphere2) g -= x * x.dot(g);
    return g;
}

Vec step_on(const ManifoldSpec& M, const Vec& x, const Vec& v) {
    Vec y = x + v;
    if (M.kind == ManifoldKind::sphere2) y.normalize();
    return y;
}

void check_surface(const ManifoldSpec& M) {
    if (M.kind != ManifoldKind::sphere2 && M.kind != ManifoldKind::torus2)
        throw Error(ErrorCode::unsupported, "Morse complexes are built on sphere2 or torus2");
}

}  // namespace

ConformalMetric::ConformalMetric(double amplitude, std::uint64_t seed) : amplitude_(amplitude), seed_(seed) {
    if (!std::isfinite(amplitude) || std::abs(amplitude) > 0.5)
        throw Error(ErrorCode::invalid_argument, "conformal amplitude must lie in [-0.5, 0.5]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    coef_.resize(18);  // torus: 9 modes x (cos, sin); sphere uses the first 9
    for (double& c : coef_) c = U(rng);
}

double ConformalMetric::factor(const ManifoldSpec& M, const Vec& x) const {
    if (amplitude_ == 0.0) return 1.0;
    double u = 0.0;
    if (M.kind == ManifoldKind::sphere2) {
        // linear and quadratic monomials
        const double m[9] = {x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2], x[0] * x[1], x[1] * x[2], x[0] * x[2]};
        for (int k = 0; k < 9; ++k) u += coef_[k] * m[k];
    } else {
        int k = 0;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b, ++k) {
                const double th = 2.0 * pi * (a * x[0] + b * x[1]);
                u += coef_[2 * k] * std::cos(th) + coef_[2 * k + 1] * std::sin(th);
            }
    }
    return std::exp(amplitude_ * u / 9.0);
}

Vec surface_gradient(const Hamiltonian& F, const ManifoldSpec& M, const Vec& x) {
    check_surface(M);
    return frame(M, x).transpose() * F.grad(x, 0.0);
}

Mat surface_hessian(const Hamiltonian& F, const ManifoldSpec& M, const Vec& x) {
    check_surface(M);
    const Mat E = frame(M, x);
    Mat H = F.hess(x, 0.0);
    // second fundamental form of the unit sphere
    if (M.kind == ManifoldKind::sphere2) H -= x.dot(F.grad(x, 0.0)) * Mat::Identity(3, 3);
    Mat R = E.transpose() * H * E;
    return 0.5 * (R + R.transpose());
}

std::vector<CriticalPoint> critical_points(const Hamiltonian& F, const ManifoldSpec& M, int seed_resolution) {
    check_surface(M);
    if (!F.autonomous) throw Error(ErrorCode::invalid_argument, "Morse functions are time independent");
    const Grid seeds = sample_grid(M, seed_resolution);
    std::vector<std::optional<Vec>> found(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) {
        Vec x = seeds.points[k];
        for (int it = 0; it < 60; ++it) {
            const Vec g = surface_gradient(F, M, x);
            if (g.norm() <= 0.1 * grad_tol) break;
            Vec v = surface_hessian(F, M, x).completeOrthogonalDecomposition().solve(-g);
            if (!v.allFinite()) return;
            if (v.norm() > 0.25) v *= 0.25 / v.norm();
            x = step_on(M, x, frame(M, x) * v);
        }
        if (surface_gradient(F, M, x).norm() <= grad_tol) found[k] = canonical_point(M, x);
    });
    std::vector<CriticalPoint> out;
    for (const auto& x : found) {
        if (!x) continue;
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const CriticalPoint& c) { return distance(M, c.x, *x) <= merge_radius; });
        if (seen) continue;
        CriticalPoint c;
        c.x = *x;
        c.value = F(*x, 0.0);
        c.grad_norm = surface_gradient(F, M, *x).norm();
        Eigen::SelfAdjointEigenSolver<Mat> es(surface_hessian(F, M, *x));
        c.eigenvalues = es.eigenvalues();
        c.index = int((c.eigenvalues.array() < 0.0).count());
        c.degenerate = c.eigenvalues.cwiseAbs().minCoeff() < eig_tol;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.index != b.index ? a.index < b.index : a.value < b.value;
    });
    return out;
}

MorseData morse_data(const Hamiltonian& F, const ManifoldSpec& M, const ConformalMetric& metric, int seed_resolution) {
    MorseData d{F, M, metric, critical_points(F, M, seed_resolution)};
    if (d.points.empty()) throw Error(ErrorCode::not_converged, "no critical points found");
    for (const CriticalPoint& c : d.points)
        if (c.degenerate || c.grad_norm > grad_tol) {
            std::ostringstream os;
            os << "degenerate critical point at (" << c.x.transpose() << "), eigenvalues " << c.eigenvalues.transpose()
               << ": not a Morse function";
            throw Error(ErrorCode::verification_failed, os.str());
        }
    return d;
}

namespace {

struct Shot {
    int end = -1;                 // critical point reached, -1 if none
    std::optional<Vec> crossing;  // entry into the level sphere around `end`
    bool timed_out = false;
};

double level_radius(const MorseData& data) {
    double r = 0.05;
    for (std::size_t i = 0; i < data.points.size(); ++i)
        for (std::size_t j = i + 1; j < data.points.size(); ++j)
            r = std::min(r, 0.25 * distance(data.M, data.points[i].x, data.points[j].x));
    return r;
}

double default_step(const MorseData& data) {
    double big = 0.0;
    for (const CriticalPoint& c : data.points) big = std::max(big, c.eigenvalues.cwiseAbs().maxCoeff());
    return 0.2 / big;
}

// RK4 on dx/ds = sign * grad_r F = sign * grad F / lambda until |grad| <= 1e-8.
Shot shoot(const MorseData& data, Vec x, double sign, double h, double rho, long max_steps) {
    const ManifoldSpec& M = data.M;
    auto field = [&](const Vec& y) {
        return Vec(sign * ambient_gradient(data.F, M, y) / data.metric.factor(M, y));
    };
    const std::size_t n = data.points.size();
    std::vector<std::optional<Vec>> entry(n);
    auto record = [&](const Vec& a, const Vec& b) {
        for (std::size_t k = 0; k < n; ++k) {
            if (entry[k]) continue;
            const double db = distance(M, b, data.points[k].x);
            if (db > rho) continue;
            const double da = distance(M, a, data.points[k].x);
            const double w = da > db ? (da - rho) / (da - db) : 0.0;
            entry[k] = canonical_point(M, step_on(M, a, std::clamp(w, 0.0, 1.0) * (b - a)));
        }
    };
    Shot s;
    for (long k = 0; k < max_steps; ++k) {
        if (ambient_gradient(data.F, M, x).norm() <= grad_tol) {
            for (std::size_t j = 0; j < n; ++j)
                if (distance(M, x, data.points[j].x) <= 1e-6) {
                    s.end = int(j);
                    s.crossing = entry[j];
                }
            return s;
        }
        const Vec k1 = field(x);
        const Vec k2 = field(step_on(M, x, 0.5 * h * k1));
        const Vec k3 = field(step_on(M, x, 0.5 * h * k2));
        const Vec k4 = field(step_on(M, x, h * k3));
        const Vec y = step_on(M, x, h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        record(x, y);
        x = y;
    }
    s.timed_out = true;
    return s;
}

}  // namespace

TrajectoryCount trajectory_count(const MorseData& data, int x, int y, const ShootingOptions& opt) {
    const int n = int(data.points.size());
    if (x < 0 || y < 0 || x >= n || y >= n) throw Error(ErrorCode::invalid_argument, "critical point index out of range");
    if (data.points[x].index - data.points[y].index != 1)
        throw Error(ErrorCode::invalid_argument, "trajectory counts need i(x) - i(y) = 1");
    if (!(opt.offset > 0.0) || opt.max_steps < 1) throw Error(ErrorCode::invalid_argument, "bad shooting options");
    const double h = opt.step > 0.0 ? opt.step : default_step(data);
    const double rho = level_radius(data);

    // descend from a saddle source, or ascend from the saddle target towards a maximum
    const bool from_source = data.points[x].index == 1;
    const CriticalPoint& base = from_source ? data.points[x] : data.points[y];
    const int target = from_source ? y : x;
    const double sign = from_source ? -1.0 : 1.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(surface_hessian(data.F, data.M, base.x));
    // unstable direction of the descending flow: negative eigenvalue; of the ascending flow: positive
    const Vec dir = frame(data.M, base.x) * es.eigenvectors().col(from_source ? 0 : 1);

    std::vector<Shot> shots(2);
    parallel_for(2, [&](std::size_t k) {
        const double side = k == 0 ? 1.0 : -1.0;
        shots[k] = shoot(data, step_on(data.M, base.x, side * opt.offset * dir), sign, h, rho, opt.max_steps);
    });

    TrajectoryCount c;
    c.from = x;
    c.to = y;
    c.shots = 2;
    std::vector<Vec> clusters;
    for (const Shot& s : shots) {
        if (s.timed_out) c.low_confidence = true;
        if (s.end != target) continue;
        ++c.landed;
        if (!s.crossing) {
            c.low_confidence = true;
            continue;
        }
        const bool same = std::any_of(clusters.begin(), clusters.end(), [&](const Vec& v) {
            return distance(data.M, v, *s.crossing) < 10.0 * opt.offset;
        });
        if (!same) clusters.push_back(*s.crossing);
    }
    c.trajectories = int(clusters.size());
    c.parity = c.trajectories % 2;
    return c;
}

bool ChainComplexZ2::square_is_zero() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            int s = 0;
            for (std::size_t k = 0; k < n; ++k) s ^= d[i][k] & d[k][j];
            if (s) return false;
        }
    return true;
}

ChainComplexZ2 make_complex(std::vector<int> degree, std::vector<std::vector<std::uint8_t>> d,
                            std::vector<std::string> labels) {
    const std::size_t n = degree.size();
    if (d.size() != n) throw Error(ErrorCode::invalid_argument, "boundary matrix has the wrong number of rows");
    for (const auto& row : d)
        if (row.size() != n) throw Error(ErrorCode::invalid_argument, "boundary matrix must be square");
    for (int g : degree)
        if (g < 0) throw Error(ErrorCode::invalid_argument, "degrees must be nonnegative");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (d[i][j] > 1) throw Error(ErrorCode::invalid_argument, "entries must be 0 or 1");
            if (d[i][j] && degree[i] != degree[j] - 1)
                throw Error(ErrorCode::invalid_argument, "the boundary must lower the degree by one");
        }
    if (labels.empty())
        for (std::size_t i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i));
    if (labels.size() != n) throw Error(ErrorCode::invalid_argument, "one label per basis element");
    return {std::move(degree), std::move(labels), std::move(d)};
}

MorseComplex boundary_operator(const MorseData& data, const ShootingOptions& opt) {
    const std::size_t n = data.points.size();
    std::vector<int> degree(n);
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        degree[i] = data.points[i].index;
        std::ostringstream os;
        os << "x" << i << "[i=" << degree[i] << "]";
        labels[i] = os.str();
    }
    std::vector<std::vector<std::uint8_t>> d(n, std::vector<std::uint8_t>(n, 0));
    MorseComplex out;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (degree[i] != degree[j] - 1) continue;
            const TrajectoryCount c = trajectory_count(data, int(j), int(i), opt);
            d[i][j] = std::uint8_t(c.parity);
            out.low_confidence = out.low_confidence || c.low_confidence;
            out.counts.push_back(c);
        }
    out.complex = make_complex(std::move(degree), std::move(d), std::move(labels));
    return out;
}

int rank_z2(std::vector<std::vector<std::uint8_t>> rows) {
    int rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && rank < int(rows.size()); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p][c]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != std::size_t(rank) && rows[r][c])
                for (std::size_t k = c; k < cols; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    return rank;
}

namespace {

// Columns of d as vectors, i.e. the images of the basis.
std::vector<std::vector<std::uint8_t>> images(const ChainComplexZ2& c) {
    const std::size_t n = c.size();
    std::vector<std::vector<std::uint8_t>> out(n, std::vector<std::uint8_t>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out[j][i] = c.d[i][j];
    return out;
}

// Basis of the null space of v -> M v, M given by its columns, restricted to coordinates in `allowed`.
std::vector<std::vector<std::uint8_t>> kernel(const std::vector<std::vector<std::uint8_t>>& cols,
                                              const std::vector<bool>& allowed) {
    const std::size_t n = cols.size();
    std::vector<std::size_t> vars;
    for (std::size_t j = 0; j < n; ++j)
        if (allowed[j]) vars.push_back(j);
    // augmented rows [image | unit]
    std::vector<std::vector<std::uint8_t>> rows;
    for (std::size_t v : vars) {
        std::vector<std::uint8_t> r(cols[v]);
        std::vector<std::uint8_t> e(n, 0);
        e[v] = 1;
        r.insert(r.end(), e.begin(), e.end());
        rows.push_back(r);
    }
    int rank = 0;
    for (std::size_t c = 0; c < n && rank < int(rows.size()); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p][c]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != std::size_t(rank) && rows[r][c])
                for (std::size_t k = 0; k < rows[r].size(); ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    std::vector<std::vector<std::uint8_t>> out;
    for (std::size_t r = rank; r < rows.size(); ++r) out.emplace_back(rows[r].begin() + n, rows[r].end());
    return out;
}

void require_complex(const ChainComplexZ2& c) {
    if (!c.square_is_zero()) throw Error(ErrorCode::verification_failed, "d^2 != 0: not a chain complex");
}

}  // namespace

std::vector<int> homology(const ChainComplexZ2& c) {
    require_complex(c);
    if (c.size() == 0) return {};
    const int top = *std::max_element(c.degree.begin(), c.degree.end());
    const auto cols = images(c);
    std::vector<int> betti(top + 1, 0);
    for (int m = 0; m <= top; ++m) {
        int dim = 0;
        std::vector<std::vector<std::uint8_t>> out_m, in_m;  // images of degree m and of degree m + 1
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (c.degree[j] == m) {
                ++dim;
                out_m.push_back(cols[j]);
            }
            if (c.degree[j] == m + 1) in_m.push_back(cols[j]);
        }
        betti[m] = dim - rank_z2(out_m) - rank_z2(in_m);
    }
    return betti;
}

bool essential_test(const ChainComplexZ2& c, int e) {
    if (c.size() > 20) throw Error(ErrorCode::invalid_argument, "basis too large for the essentiality test (> 20)");
    if (e < 0 || e >= int(c.size())) throw Error(ErrorCode::invalid_argument, "basis element out of range");
    require_complex(c);
    const std::size_t n = c.size();
    const auto cols = images(c);
    // cycles of the largest invariant K are the cycles supported away from e
    std::vector<bool> all(n, true), away(n, true);
    away[e] = false;
    const auto Z = kernel(cols, all);
    const auto ZK = kernel(cols, away);
    std::vector<std::vector<std::uint8_t>> span = ZK;
    for (const auto& b : cols) span.push_back(b);
    return rank_z2(span) < int(Z.size());
}

Report morse_report(const Hamiltonian& F, const ManifoldSpec& M, const ConformalMetric& metric,
                    const ShootingOptions& opt) {
    Report r;
    r.experiment = "morse-homology";
    const MorseData data = morse_data(F, M, metric);
    int counts[3] = {0, 0, 0};
    Curve pts;
    pts.columns = M.kind == ManifoldKind::sphere2 ? std::vector<std::string>{"x", "y", "z", "value", "index"}
                                                  : std::vector<std::string>{"p", "q", "value", "index"};
    for (const CriticalPoint& c : data.points) {
        ++counts[std::clamp(c.index, 0, 2)];
        std::vector<double> row(c.x.data(), c.x.data() + c.x.size());
        row.push_back(c.value);
        row.push_back(c.index);
        pts.rows.push_back(row);
    }
    r.curves["critical_points"] = pts;
    r.add_scalar("critical_points", double(data.points.size()));
    for (int m = 0; m < 3; ++m) r.add_scalar("index_" + std::to_string(m), counts[m]);
    const int euler = counts[0] - counts[1] + counts[2];
    const int expected_euler = M.kind == ManifoldKind::sphere2 ? 2 : 0;
    r.add_scalar("euler_characteristic", euler);
    r.check("euler_characteristic", euler == expected_euler, "expected " + std::to_string(expected_euler));
    r.add_scalar("conformal_amplitude", metric.amplitude());
    r.add_scalar("conformal_seed", double(metric.seed()));

    const MorseComplex mc = boundary_operator(data, opt);
    Curve tr{{"from", "to", "landed", "trajectories", "parity"}, {}};
    for (const TrajectoryCount& c : mc.counts)
        tr.rows.push_back({double(c.from), double(c.to), double(c.landed), double(c.trajectories), double(c.parity)});
    r.curves["trajectories"] = tr;
    r.check("counts_confident", !mc.low_confidence, "a shot exceeded its time budget or missed the level sphere");
    if (mc.low_confidence) {
        r.notes.push_back("low-confidence trajectory counts: complex verdicts withheld");
        return r;
    }
    const ChainComplexZ2& cx = mc.complex;
    const bool d2 = cx.square_is_zero();
    r.check("d_squared_zero", d2);
    if (!d2) return r;
    const std::vector<int> betti = homology(cx);
    for (std::size_t m = 0; m < betti.size(); ++m) r.add_scalar("betti_" + std::to_string(m), betti[m]);
    const std::vector<int> known = M.kind == ManifoldKind::sphere2 ? std::vector<int>{1, 0, 1} : std::vector<int>{1, 2, 1};
    r.check("betti_match", betti == known);

    // the maximum is last: highest index, then highest value
    const int top = int(data.points.size()) - 1;
    const bool unique_max = top == 0 || data.points[top - 1].value < data.points[top].value - 1e-9;
    if (unique_max) r.check("maximum_essential", essential_test(cx, top));

    ShootingOptions half = opt;
    half.offset *= 0.5;
    const MorseComplex mh = boundary_operator(data, half);
    r.check("offset_stable", !mh.low_confidence && mh.complex.d == cx.d, "parities with half the shooting offset");
    return r;
}

}  // namespace hofer
