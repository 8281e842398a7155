#pragma once

#include "hofer/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace hofer {

// Worker count, capped by HOFERLAB_THREADS when set.
int thread_count();

// Runs body(i) for i in [0, n). Results must be written per index; the caller reduces in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

// Composite Simpson weights on n equally spaced samples of [a, b]; n odd, n >= 3.
std::vector<double> simpson_weights(int n, double a, double b);

// Integral of uniformly spaced samples over [a, b] by composite Simpson.
double simpson(const std::vector<double>& samples, double a, double b);

using ScalarFn = std::function<double(const Vec&)>;

Vec fd_gradient(const ScalarFn& f, const Vec& x, double h = 1e-5);
Mat fd_hessian(const ScalarFn& f, const Vec& x, double h = 1e-4);

// Quintic smoothstep: 0 for s <= 0, 1 for s >= 1, C2 at both joins.
double smoothstep5(double s);
double smoothstep5_derivative(double s);

// 1 for d <= inner, 0 for d >= outer, quintic in between.
double bump_profile(double d, double inner, double outer);
double bump_profile_derivative(double d, double inner, double outer);

// Periodic derivative of uniformly sampled closed data (8th order central stencil), period 1.
std::vector<double> periodic_derivative(const std::vector<double>& y);

}  // namespace hofer
