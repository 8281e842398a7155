#include "hofer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace hofer {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::unsupported: return "unsupported";
        case ErrorCode::not_converged: return "not_converged";
        case ErrorCode::escape: return "escape";
        case ErrorCode::verification_failed: return "verification_failed";
        case ErrorCode::config: return "config";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

bool Box::contains(const Vec& x, double slack) const {
    if (x.size() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!axes[i].contains(x[i], slack)) return false;
    return true;
}

bool Box::empty() const {
    if (axes.empty()) return true;
    for (const auto& a : axes)
        if (!(a.hi > a.lo)) return true;
    return false;
}

Box Box::inflated(double margin) const {
    Box b = *this;
    for (auto& a : b.axes) {
        a.lo -= margin;
        a.hi += margin;
    }
    return b;
}

double Box::volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= std::max(0.0, a.width());
    return v;
}

Vec Box::center() const {
    Vec c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (axes[i].lo + axes[i].hi);
    return c;
}

int thread_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("HOFERLAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const int workers = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(thread_count())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

std::vector<double> simpson_weights(int n, double a, double b) {
    if (n < 3 || n % 2 == 0) throw Error(ErrorCode::invalid_argument, "simpson needs an odd number of samples >= 3");
    const double h = (b - a) / (n - 1);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        if (i == 0 || i == n - 1) w[i] = h / 3.0;
        else w[i] = (i % 2 ? 4.0 : 2.0) * h / 3.0;
    }
    return w;
}

double simpson(const std::vector<double>& samples, double a, double b) {
    auto w = simpson_weights(static_cast<int>(samples.size()), a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) s += w[i] * samples[i];
    return s;
}

Vec fd_gradient(const ScalarFn& f, const Vec& x, double h) {
    Vec g(x.size());
    Vec y = x;
    for (int i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        double fp = f(y);
        y[i] = x[i] - h;
        double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat fd_hessian(const ScalarFn& f, const Vec& x, double h) {
    const int n = static_cast<int>(x.size());
    Mat H(n, n);
    Vec y = x;
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        y[i] = x[i] + h;
        double fp = f(y);
        y[i] = x[i] - h;
        double fm = f(y);
        y[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            y[i] = x[i] + h; y[j] = x[j] + h;
            double fpp = f(y);
            y[j] = x[j] - h;
            double fpm = f(y);
            y[i] = x[i] - h;
            double fmm = f(y);
            y[j] = x[j] + h;
            double fmp = f(y);
            y[i] = x[i]; y[j] = x[j];
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    return H;
}

double smoothstep5(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_derivative(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double bump_profile(double d, double inner, double outer) {
    if (d <= inner) return 1.0;
    if (d >= outer) return 0.0;
    return 1.0 - smoothstep5((d - inner) / (outer - inner));
}

double bump_profile_derivative(double d, double inner, double outer) {
    if (d <= inner || d >= outer) return 0.0;
    return -smoothstep5_derivative((d - inner) / (outer - inner)) / (outer - inner);
}

std::vector<double> periodic_derivative(const std::vector<double>& y) {
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    const int n = static_cast<int>(y.size());
    if (n < 9) throw Error(ErrorCode::invalid_argument, "periodic_derivative needs at least 9 samples");
    std::vector<double> d(n);
    const double inv_h = static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= 4; ++k) s += c[k - 1] * (y[(i + k) % n] - y[(i - k + n) % n]);
        d[i] = s * inv_h;
    }
    return d;
}

}  // namespace hofer
